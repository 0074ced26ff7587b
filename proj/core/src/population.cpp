#include "powermarket/population.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powermarket {

namespace {

void append_all(std::vector<std::string>& out, std::vector<std::string> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
}

std::vector<std::string> range_violations(const QuantityRange& r,
                                          const std::string& name) {
    std::vector<std::string> v;
    if (r.lo < 1) v.push_back(name + ".lo must be >= 1");
    if (r.lo > r.hi) v.push_back(name + ".lo must not exceed " + name + ".hi");
    return v;
}

std::vector<std::string> dist_violations(const UnitPriceDistribution& d,
                                         const std::string& name) {
    std::vector<std::string> v;
    if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo > 0.0) || !(d.lo < d.hi))
        v.push_back(name + " requires 0 < lo < hi");
    if (!std::isfinite(d.c)) v.push_back(name + ".c must be finite");
    return v;
}

void throw_if_any(const std::vector<std::string>& v) {
    if (v.empty()) return;
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
    throw InvalidParameter(os.str());
}

// Quantile for c > 0 on [lo, lo + width], written so nothing overflows.
double quantile_positive(double lo, double width, double c, double u) {
    return lo - std::log1p(u * std::expm1(-c * width)) / c;
}

double cdf_positive(double lo, double width, double c, double x) {
    return std::expm1(-c * (x - lo)) / std::expm1(-c * width);
}

}  // namespace

void QuantityRange::validate(const std::string& name) const {
    throw_if_any(range_violations(*this, name));
}

void UnitPriceDistribution::validate(const std::string& name) const {
    throw_if_any(dist_violations(*this, name));
}

std::vector<std::string> PopulationConfig::violations() const {
    std::vector<std::string> v;
    if (n_buyers < 1) v.emplace_back("n_buyers must be >= 1");
    if (n_sellers < 1) v.emplace_back("n_sellers must be >= 1");
    append_all(v, range_violations(demand_range, "demand"));
    append_all(v, range_violations(supply_range, "supply"));
    append_all(v, dist_violations(value_dist, "value"));
    append_all(v, dist_violations(cost_dist, "cost"));
    return v;
}

void PopulationConfig::validate() const { throw_if_any(violations()); }

PopulationConfig exp_preset() {
    PopulationConfig cfg;
    cfg.n_buyers = 1000;
    cfg.n_sellers = 500;
    cfg.supply_range = {10, 100};
    cfg.cost_dist = {10.0, 200.0, -0.15, true};
    cfg.demand_range = {10, 42};
    cfg.value_dist = {5.0, 50.0, 0.2, true};
    return cfg;
}

PopulationConfig lin_preset() {
    PopulationConfig cfg;
    cfg.n_buyers = 1000;
    cfg.n_sellers = 500;
    cfg.supply_range = {10, 100};
    cfg.cost_dist = {10.0, 35.0, -0.01, true};
    cfg.demand_range = {10, 42};
    cfg.value_dist = {30.0, 50.0, 0.01, true};
    return cfg;
}

Units sample_quantity(const QuantityRange& range, double u) {
    const double x = range.lo + u * static_cast<double>(range.hi - range.lo);
    const auto q = static_cast<Units>(std::lround(x));
    return std::clamp(q, range.lo, range.hi);
}

double truncated_exp_cdf(double lo, double hi, double c, double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double width = hi - lo;
    if (std::abs(c) * width < kLinearLimitThreshold) return (x - lo) / width;
    if (c > 0.0) return cdf_positive(lo, width, c, x);
    // F_c(x) = 1 - F_{-c}(lo + hi - x)
    return 1.0 - cdf_positive(lo, width, -c, lo + hi - x);
}

double inverse_cdf(double lo, double hi, double c, double u) {
    if (u <= 0.0) return lo;
    if (u >= 1.0) return hi;
    const double width = hi - lo;
    double x;
    if (std::abs(c) * width < kLinearLimitThreshold) {
        x = lo + u * width;
    } else if (c > 0.0) {
        x = quantile_positive(lo, width, c, u);
    } else {
        // Q_c(u) = lo + hi - Q_{-c}(1 - u)
        x = lo + hi - quantile_positive(lo, width, -c, 1.0 - u);
    }
    return std::clamp(x, lo, hi);
}

double cdf(const UnitPriceDistribution& d, double x) {
    return truncated_exp_cdf(d.lo, d.hi, d.effective_c(), x);
}

double sample_unit_price(const UnitPriceDistribution& d, double u) {
    if (!d.reflected) return inverse_cdf(d.lo, d.hi, d.c, u);
    return std::clamp(d.lo + d.hi - inverse_cdf(d.lo, d.hi, d.c, u), d.lo, d.hi);
}

Buyer make_buyer(AgentId id, const QuantityRange& demand_range,
                 const UnitPriceDistribution& value_dist, double u_quantity,
                 double u_price) {
    const Units d0 = sample_quantity(demand_range, u_quantity);
    const double value = sample_unit_price(value_dist, u_price);
    const double b0 = value * d0;
    return Buyer{id, b0, d0, b0, d0};
}

Seller make_seller(AgentId id, const QuantityRange& supply_range,
                   const UnitPriceDistribution& cost_dist, double u_quantity,
                   double u_price) {
    const Units s0 = sample_quantity(supply_range, u_quantity);
    const double cost = sample_unit_price(cost_dist, u_price);
    const double b0 = cost * s0;
    return Seller{id, b0, s0, b0, s0};
}

Buyer make_buyer(AgentId id, const QuantityRange& demand_range,
                 const UnitPriceDistribution& value_dist, Rng& rng) {
    const double uq = rng.uniform01();
    const double up = rng.uniform01();
    return make_buyer(id, demand_range, value_dist, uq, up);
}

Seller make_seller(AgentId id, const QuantityRange& supply_range,
                   const UnitPriceDistribution& cost_dist, Rng& rng) {
    const double uq = rng.uniform01();
    const double up = rng.uniform01();
    return make_seller(id, supply_range, cost_dist, uq, up);
}

Population build_population(const PopulationConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    Population pop;
    pop.buyers.reserve(cfg.n_buyers);
    pop.sellers.reserve(cfg.n_sellers);
    for (AgentId i = 0; i < cfg.n_buyers; ++i)
        pop.buyers.push_back(make_buyer(i, cfg.demand_range, cfg.value_dist, rng));
    for (AgentId i = 0; i < cfg.n_sellers; ++i)
        pop.sellers.push_back(make_seller(i, cfg.supply_range, cfg.cost_dist, rng));
    return pop;
}

std::uint64_t total_demand(std::span<const Buyer> buyers) {
    std::uint64_t total = 0;
    for (const auto& b : buyers) total += b.initial_demand;
    return total;
}

std::uint64_t total_supply(std::span<const Seller> sellers) {
    std::uint64_t total = 0;
    for (const auto& s : sellers) total += s.initial_supply;
    return total;
}

}  // namespace powermarket
