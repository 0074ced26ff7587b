#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "powermarket/rng.hpp"

namespace powermarket {

using AgentId = std::uint32_t;
using Units = std::uint32_t;

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Closed integer interval of initial quantities.
struct QuantityRange {
    Units lo = 1;
    Units hi = 1;

    void validate(const std::string& name) const;
};

// Truncated exponential law of a provisional unit value or cost on [lo, hi]:
//
//   F(x) = (exp(-c lo) - exp(-c x)) / (exp(-c lo) - exp(-c hi))
//
// When `reflected` is set the variate is mirrored about the interval
// midpoint, x -> lo + hi - x, which is the same law with c negated. The
// built-in EXP/LIN presets keep the tabulated c and sample reflected; see
// README for why.
struct UnitPriceDistribution {
    double lo = 0.0;
    double hi = 1.0;
    double c = 0.0;
    bool reflected = false;

    void validate(const std::string& name) const;

    // Parameter of the law actually sampled (c, or -c when reflected).
    double effective_c() const { return reflected ? -c : c; }
};

// Below this value of |c|(hi - lo) the linear limit of F is used.
inline constexpr double kLinearLimitThreshold = 1e-9;

// Nearest integer (half away from zero) of lo + u (hi - lo).
Units sample_quantity(const QuantityRange& range, double u);

// Truncated-exponential CDF at x, with the parameters taken literally (ignores
// `reflected`). Clamped to [0, 1] outside the support.
double truncated_exp_cdf(double lo, double hi, double c, double x);

// Inverse of truncated_exp_cdf for u in [0, 1]. Result is clamped to [lo, hi].
double inverse_cdf(double lo, double hi, double c, double u);

// CDF and quantile of the law the distribution actually samples.
double cdf(const UnitPriceDistribution& dist, double x);
double sample_unit_price(const UnitPriceDistribution& dist, double u);

struct Buyer {
    AgentId id = 0;
    double budget = 0.0;
    Units demand = 0;
    double initial_budget = 0.0;
    Units initial_demand = 0;

    double initial_value() const { return initial_budget / initial_demand; }
};

struct Seller {
    AgentId id = 0;
    double budget = 0.0;
    Units supply = 0;
    double initial_budget = 0.0;
    Units initial_supply = 0;

    double initial_cost() const { return initial_budget / initial_supply; }
};

struct PopulationConfig {
    std::uint32_t n_buyers = 1000;
    std::uint32_t n_sellers = 500;
    QuantityRange demand_range{10, 42};
    QuantityRange supply_range{10, 100};
    UnitPriceDistribution value_dist{5.0, 50.0, 0.2, true};
    UnitPriceDistribution cost_dist{10.0, 200.0, -0.15, true};

    // Returns every violation found; empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;
};

// Parameter presets. EXP gives inelastic initial curves, LIN nearly linear ones.
PopulationConfig exp_preset();
PopulationConfig lin_preset();

struct Population {
    std::vector<Buyer> buyers;
    std::vector<Seller> sellers;
};

// Agent construction from explicit variates: quantity first, then unit price.
Buyer make_buyer(AgentId id, const QuantityRange& demand_range,
                 const UnitPriceDistribution& value_dist, double u_quantity,
                 double u_price);
Seller make_seller(AgentId id, const QuantityRange& supply_range,
                   const UnitPriceDistribution& cost_dist, double u_quantity,
                   double u_price);

Buyer make_buyer(AgentId id, const QuantityRange& demand_range,
                 const UnitPriceDistribution& value_dist, Rng& rng);
Seller make_seller(AgentId id, const QuantityRange& supply_range,
                   const UnitPriceDistribution& cost_dist, Rng& rng);

// All buyers (ids 0..N_B-1) are drawn before all sellers (ids 0..N_S-1)
// from a single stream seeded with `seed`.
Population build_population(const PopulationConfig& cfg, std::uint64_t seed);

std::uint64_t total_demand(std::span<const Buyer> buyers);
std::uint64_t total_supply(std::span<const Seller> sellers);

}  // namespace powermarket
