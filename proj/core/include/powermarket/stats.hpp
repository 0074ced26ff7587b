#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace powermarket {

class EmptyInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct StepValue {
    std::uint64_t step = 0;
    double value = 0.0;

    bool operator==(const StepValue&) const = default;
};

// Streaming mean/variance (Welford) plus the running maximum and the record
// of every increase of that maximum.
class RunningStats {
public:
    void push(std::uint64_t step, double price);

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double m2() const { return m2_; }
    // Population variance, m2 / n.
    double variance() const { return n_ == 0 ? 0.0 : m2_ / static_cast<double>(n_); }
    double max() const { return max_; }
    double first() const { return first_; }

    // (step, max) each time the running maximum is set or raised.
    const std::vector<StepValue>& max_series() const { return max_series_; }
    // (step, increase) each time the running maximum is raised; strictly positive.
    const std::vector<StepValue>& delta_max_series() const { return delta_max_series_; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double max_ = 0.0;
    double first_ = 0.0;
    std::vector<StepValue> max_series_;
    std::vector<StepValue> delta_max_series_;
};

// Largest single increase of the running maximum; earliest step on ties.
// When the maximum never increased, returns the step of the first price
// with a zero increase.
StepValue max_divergence_step(const RunningStats& rs);

// Two-pass mean and population variance.
struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};
MeanVariance batch_mean_variance(std::span<const double> values);

class Ecdf {
public:
    explicit Ecdf(std::vector<double> values);

    // Fraction of values <= x.
    double operator()(double x) const;

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted_values() const { return sorted_; }

    // Distinct values with the ECDF evaluated at each, for export.
    std::vector<std::pair<double, double>> steps() const;

private:
    std::vector<double> sorted_;
};

// Supremum distance between the ECDF and a continuous CDF.
template <typename Cdf>
double ks_distance(const Ecdf& e, Cdf&& cdf) {
    const auto& v = e.sorted_values();
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(above, below));
    }
    return d;
}

// Histogram normalized to unit total mass; bin k covers [k w, (k + 1) w).
class UnitBinDensity {
public:
    UnitBinDensity(std::span<const double> values, double bin_width = 1.0);

    double bin_width() const { return bin_width_; }
    std::size_t total() const { return total_; }
    const std::map<std::int64_t, std::size_t>& counts() const { return counts_; }

    double mass(std::int64_t bin) const;
    double bin_lo(std::int64_t bin) const { return static_cast<double>(bin) * bin_width_; }
    // (bin_lo, mass) for each nonempty bin in ascending order.
    std::vector<std::pair<double, double>> masses() const;

private:
    double bin_width_;
    std::size_t total_ = 0;
    std::map<std::int64_t, std::size_t> counts_;
};

// Population standard deviation of the last late_frac of prices divided by
// that of the first early_frac. Windows hold floor(n * frac) prices. Returns
// 0 when both windows are flat and +inf when only the early one is.
double window_spread_ratio(std::span<const double> prices, double early_frac = 0.2,
                           double late_frac = 0.1);

}  // namespace powermarket
