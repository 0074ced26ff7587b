#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "powermarket/population.hpp"

namespace powermarket {

class NoCrossing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CurveSide { demand, supply };

const char* to_string(CurveSide side);

struct CurvePoint {
    double unit_price = 0.0;
    std::uint64_t cumulative_quantity = 0;
    AgentId agent = 0;
};

// Aggregate step curve of initial unit values (demand, descending) or
// initial unit costs (supply, ascending). Point k covers the quantity
// interval (cum[k-1], cum[k]] at price[k]. Equal prices are ordered by id.
struct StepCurve {
    CurveSide side = CurveSide::demand;
    std::vector<CurvePoint> points;

    std::uint64_t total_quantity() const {
        return points.empty() ? 0 : points.back().cumulative_quantity;
    }
};

StepCurve demand_curve(std::span<const Buyer> buyers);
StepCurve supply_curve(std::span<const Seller> sellers);

struct Equilibrium {
    double price = 0.0;
    std::uint64_t quantity = 0;
};

// Walks both curves over their merged breakpoints. The crossing quantity is
// the end of the last quantity interval on which the demand price exceeds
// the supply price (the last interval of trade); the reported price is the
// midpoint of the two step prices on that interval.
Equilibrium intersection(const StepCurve& demand, const StepCurve& supply);

}  // namespace powermarket
