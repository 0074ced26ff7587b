#include "powermarket/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace powermarket {

void RunningStats::push(std::uint64_t step, double price) {
    ++n_;
    const double delta = price - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (price - mean_);
    if (n_ == 1) {
        first_ = price;
        max_ = price;
        max_series_.push_back({step, price});
    } else if (price > max_) {
        delta_max_series_.push_back({step, price - max_});
        max_ = price;
        max_series_.push_back({step, price});
    }
}

StepValue max_divergence_step(const RunningStats& rs) {
    if (rs.count() == 0) throw EmptyInput("max_divergence_step: no prices pushed");
    const auto& deltas = rs.delta_max_series();
    if (deltas.empty()) return {rs.max_series().front().step, 0.0};
    StepValue best = deltas.front();
    for (const auto& d : deltas)
        if (d.value > best.value) best = d;
    return best;
}

MeanVariance batch_mean_variance(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("batch_mean_variance: empty input");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, ss / n};
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw EmptyInput("ecdf: empty input");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> Ecdf::steps() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

UnitBinDensity::UnitBinDensity(std::span<const double> values, double bin_width)
    : bin_width_(bin_width) {
    if (values.empty()) throw EmptyInput("unit_bin_density: empty input");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw std::invalid_argument("unit_bin_density: bin width must be positive");
    for (double v : values) {
        const auto bin = static_cast<std::int64_t>(std::floor(v / bin_width_));
        ++counts_[bin];
    }
    total_ = values.size();
}

double UnitBinDensity::mass(std::int64_t bin) const {
    const auto it = counts_.find(bin);
    if (it == counts_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_);
}

std::vector<std::pair<double, double>> UnitBinDensity::masses() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(counts_.size());
    for (const auto& [bin, count] : counts_)
        out.emplace_back(bin_lo(bin), static_cast<double>(count) / static_cast<double>(total_));
    return out;
}

double window_spread_ratio(std::span<const double> prices, double early_frac,
                           double late_frac) {
    const auto n = static_cast<double>(prices.size());
    const auto early = static_cast<std::size_t>(std::floor(n * early_frac));
    const auto late = static_cast<std::size_t>(std::floor(n * late_frac));
    if (early < 2 || late < 2)
        throw std::invalid_argument("window_spread_ratio: windows need at least 2 prices (got " +
                                    std::to_string(early) + " early, " + std::to_string(late) +
                                    " late)");
    const double sd_early = std::sqrt(batch_mean_variance(prices.first(early)).variance);
    const double sd_late = std::sqrt(batch_mean_variance(prices.last(late)).variance);
    if (sd_early == 0.0)
        return sd_late == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return sd_late / sd_early;
}

}  // namespace powermarket
