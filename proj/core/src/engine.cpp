#include "powermarket/engine.hpp"

#include <string>

namespace powermarket {

StepLimitExceeded::StepLimitExceeded(std::uint64_t limit, std::size_t buyers_left,
                                     std::size_t sellers_left)
    : std::runtime_error("session did not close within " + std::to_string(limit) +
                         " steps (" + std::to_string(buyers_left) + " buyers, " +
                         std::to_string(sellers_left) + " sellers still active)"),
      limit_(limit),
      buyers_left_(buyers_left),
      sellers_left_(sellers_left) {}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::buyers_exhausted: return "buyers_exhausted";
        case Termination::sellers_exhausted: return "sellers_exhausted";
    }
    return "unknown";
}

AskRegime ask_regime(const Seller& s) {
    if (s.budget <= 0.0) return AskRegime::profit;
    return s.supply == 1 ? AskRegime::last_unit : AskRegime::revenue_target;
}

// (0, hi] is sampled as hi * (1 - u) so that zero is excluded.
double buyer_bid(const Buyer& b, double u) {
    return (b.budget / b.demand) * (1.0 - u);
}

double seller_ask(const Seller& s, double u) {
    switch (ask_regime(s)) {
        case AskRegime::revenue_target: {
            const double lo = s.budget / s.supply;
            return lo + u * (s.budget - lo);
        }
        case AskRegime::last_unit:
            return s.budget;
        case AskRegime::profit:
            return s.initial_cost() * (1.0 - u);
    }
    return s.budget;
}

double buyer_bid(const Buyer& b, Rng& rng) { return buyer_bid(b, rng.uniform01()); }
double seller_ask(const Seller& s, Rng& rng) { return seller_ask(s, rng.uniform01()); }

std::optional<double> settle(double bid, double ask, double kappa) {
    if (!(bid > ask)) return std::nullopt;
    const double price = (bid - ask) * kappa + ask;
    // Guard the bracket against rounding in the affine combination.
    return price < ask ? ask : (price > bid ? bid : price);
}

ExitFlags apply_trade(Buyer& b, Seller& s, double price) {
    b.budget -= price;
    b.demand -= 1;
    s.budget -= price;
    s.supply -= 1;
    return ExitFlags{b.demand == 0 || b.budget <= 0.0, s.supply == 0};
}

Market::Market(Population population)
    : buyers_(std::move(population.buyers)), sellers_(std::move(population.sellers)) {
    active_buyers_.reserve(buyers_.size());
    active_sellers_.reserve(sellers_.size());
    for (std::uint32_t i = 0; i < buyers_.size(); ++i)
        if (buyers_[i].demand >= 1 && buyers_[i].budget > 0.0) active_buyers_.push_back(i);
    for (std::uint32_t i = 0; i < sellers_.size(); ++i)
        if (sellers_[i].supply >= 1) active_sellers_.push_back(i);
}

std::pair<std::size_t, std::size_t> Market::draw_pair(Rng& rng) const {
    if (!open()) throw EmptyMarket("no active buyers or no active sellers left");
    const auto b = static_cast<std::size_t>(rng.index(active_buyers_.size()));
    const auto s = static_cast<std::size_t>(rng.index(active_sellers_.size()));
    return {b, s};
}

TradeRecord Market::step(Rng& rng) {
    const auto [b, s] = draw_pair(rng);
    const double bid = buyer_bid(active_buyer(b), rng);
    const double ask = seller_ask(active_seller(s), rng);
    return attempt(b, s, bid, ask, [&rng] { return rng.uniform01(); });
}

void Market::remove_slot(std::vector<std::uint32_t>& slots, std::size_t slot) {
    slots[slot] = slots.back();
    slots.pop_back();
}

std::vector<double> SessionResult::prices() const {
    std::vector<double> out;
    for (const auto& t : trades)
        if (t.success) out.push_back(t.price);
    return out;
}

std::vector<std::uint64_t> SessionResult::price_steps() const {
    std::vector<std::uint64_t> out;
    for (const auto& t : trades)
        if (t.success) out.push_back(t.step);
    return out;
}

SessionResult run_session(Population population, std::uint64_t seed,
                          const SessionOptions& options) {
    Market market(std::move(population));
    Rng rng(seed);
    SessionResult result;
    while (market.open()) {
        if (market.steps() >= options.step_limit)
            throw StepLimitExceeded(options.step_limit, market.active_buyer_count(),
                                    market.active_seller_count());
        TradeRecord rec = market.step(rng);
        if (rec.success || options.keep_failed_attempts) result.trades.push_back(rec);
    }
    result.total_steps = market.steps();
    result.termination = market.active_buyer_count() == 0 ? Termination::buyers_exhausted
                                                          : Termination::sellers_exhausted;
    result.final_buyers.assign(market.buyers().begin(), market.buyers().end());
    result.final_sellers.assign(market.sellers().begin(), market.sellers().end());
    return result;
}

}  // namespace powermarket
