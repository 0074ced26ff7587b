#include "powermarket/curves.hpp"

#include <algorithm>

namespace powermarket {

const char* to_string(CurveSide side) {
    return side == CurveSide::demand ? "demand" : "supply";
}

namespace {

struct Entry {
    double price;
    Units quantity;
    AgentId id;
};

StepCurve accumulate(CurveSide side, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [side](const Entry& a, const Entry& b) {
        if (a.price != b.price)
            return side == CurveSide::demand ? a.price > b.price : a.price < b.price;
        return a.id < b.id;
    });
    StepCurve curve{side, {}};
    curve.points.reserve(entries.size());
    std::uint64_t cum = 0;
    for (const auto& e : entries) {
        if (e.quantity == 0) continue;
        cum += e.quantity;
        curve.points.push_back({e.price, cum, e.id});
    }
    return curve;
}

}  // namespace

StepCurve demand_curve(std::span<const Buyer> buyers) {
    if (buyers.empty()) throw std::invalid_argument("demand_curve: no buyers");
    std::vector<Entry> entries;
    entries.reserve(buyers.size());
    for (const auto& b : buyers) entries.push_back({b.initial_value(), b.initial_demand, b.id});
    return accumulate(CurveSide::demand, std::move(entries));
}

StepCurve supply_curve(std::span<const Seller> sellers) {
    if (sellers.empty()) throw std::invalid_argument("supply_curve: no sellers");
    std::vector<Entry> entries;
    entries.reserve(sellers.size());
    for (const auto& s : sellers) entries.push_back({s.initial_cost(), s.initial_supply, s.id});
    return accumulate(CurveSide::supply, std::move(entries));
}

Equilibrium intersection(const StepCurve& demand, const StepCurve& supply) {
    const auto& d = demand.points;
    const auto& s = supply.points;
    if (d.empty() || s.empty()) throw NoCrossing("intersection: empty curve");

    std::size_t i = 0, j = 0;
    std::uint64_t q = 0;
    bool traded = false;
    Equilibrium eq;
    while (i < d.size() && j < s.size()) {
        if (!(d[i].unit_price > s[j].unit_price)) break;
        const std::uint64_t next = std::min(d[i].cumulative_quantity, s[j].cumulative_quantity);
        traded = true;
        eq.price = 0.5 * (d[i].unit_price + s[j].unit_price);
        q = next;
        if (d[i].cumulative_quantity == next) ++i;
        if (s[j].cumulative_quantity == next) ++j;
    }
    if (!traded)
        throw NoCrossing("intersection: every supply cost is at or above every demand value");
    eq.quantity = q;
    return eq;
}

}  // namespace powermarket
