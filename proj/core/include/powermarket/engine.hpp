#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "powermarket/population.hpp"
#include "powermarket/rng.hpp"

namespace powermarket {

// Raised when a pair is requested from a market with an empty side.
class EmptyMarket : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Raised by run_session when the attempt budget runs out before a side empties.
class StepLimitExceeded : public std::runtime_error {
public:
    StepLimitExceeded(std::uint64_t limit, std::size_t buyers_left,
                      std::size_t sellers_left);

    std::uint64_t limit() const { return limit_; }
    std::size_t buyers_left() const { return buyers_left_; }
    std::size_t sellers_left() const { return sellers_left_; }

private:
    std::uint64_t limit_;
    std::size_t buyers_left_;
    std::size_t sellers_left_;
};

struct TradeRecord {
    std::uint64_t step = 0;  // 1-based attempt index
    AgentId buyer_id = 0;
    AgentId seller_id = 0;
    double bid = 0.0;
    double ask = 0.0;
    double price = 0.0;  // meaningful only when success
    double kappa = 0.0;  // meaningful only when success
    bool success = false;
};

enum class Termination { buyers_exhausted, sellers_exhausted };

const char* to_string(Termination t);

// Seller asking regime for the current state of the seller.
enum class AskRegime {
    revenue_target,   // B > 0, S >= 2: uniform on [B/S, B]
    last_unit,        // B > 0, S == 1: exactly B
    profit,           // B <= 0: uniform on (0, B0/S0]
};

AskRegime ask_regime(const Seller& s);

// Uniform on (0, B/D], given u uniform on [0, 1).
double buyer_bid(const Buyer& b, double u);
// Ask for the seller's current regime, given u uniform on [0, 1). The
// last-unit regime ignores u.
double seller_ask(const Seller& s, double u);

double buyer_bid(const Buyer& b, Rng& rng);
double seller_ask(const Seller& s, Rng& rng);

// Price (bid - ask) * kappa + ask when bid > ask; no trade otherwise.
std::optional<double> settle(double bid, double ask, double kappa);

struct ExitFlags {
    bool buyer_exits = false;
    bool seller_exits = false;
};

// Debits the price from both budgets and one unit from both quantities.
// Buyers exit when their demand is met or their budget is spent; sellers
// exit only when sold out.
ExitFlags apply_trade(Buyer& b, Seller& s, double price);

// Active-agent bookkeeping for one session. Agents are addressed either by
// id (stable) or by slot in the active lists (changes when agents exit).
class Market {
public:
    explicit Market(Population population);

    std::size_t active_buyer_count() const { return active_buyers_.size(); }
    std::size_t active_seller_count() const { return active_sellers_.size(); }
    bool open() const { return !active_buyers_.empty() && !active_sellers_.empty(); }
    std::uint64_t steps() const { return steps_; }

    const Buyer& active_buyer(std::size_t slot) const { return buyers_[active_buyers_.at(slot)]; }
    const Seller& active_seller(std::size_t slot) const { return sellers_[active_sellers_.at(slot)]; }

    // All agents in id order, including those that have exited.
    std::span<const Buyer> buyers() const { return buyers_; }
    std::span<const Seller> sellers() const { return sellers_; }

    // Uniform draw of one active buyer slot and one active seller slot.
    std::pair<std::size_t, std::size_t> draw_pair(Rng& rng) const;

    // Resolves one attempted transaction with the given bid and ask. On
    // success, kappa is obtained from `draw_kappa` and agents are updated.
    // The step counter advances regardless of outcome.
    template <typename KappaSource>
    TradeRecord attempt(std::size_t buyer_slot, std::size_t seller_slot,
                        double bid, double ask, KappaSource&& draw_kappa) {
        const std::size_t bi = active_buyers_.at(buyer_slot);
        const std::size_t si = active_sellers_.at(seller_slot);
        TradeRecord rec;
        rec.step = ++steps_;
        rec.buyer_id = buyers_[bi].id;
        rec.seller_id = sellers_[si].id;
        rec.bid = bid;
        rec.ask = ask;
        if (bid > ask) {
            rec.kappa = draw_kappa();
            rec.price = *settle(bid, ask, rec.kappa);
            rec.success = true;
            const ExitFlags exits = apply_trade(buyers_[bi], sellers_[si], rec.price);
            if (exits.buyer_exits) remove_slot(active_buyers_, buyer_slot);
            if (exits.seller_exits) remove_slot(active_sellers_, seller_slot);
        }
        return rec;
    }

    // One full attempt: buyer slot, seller slot, bid, ask, then kappa only
    // on success, all from `rng` in that order.
    TradeRecord step(Rng& rng);

private:
    static void remove_slot(std::vector<std::uint32_t>& slots, std::size_t slot);

    std::vector<Buyer> buyers_;
    std::vector<Seller> sellers_;
    std::vector<std::uint32_t> active_buyers_;
    std::vector<std::uint32_t> active_sellers_;
    std::uint64_t steps_ = 0;
};

struct SessionResult {
    std::vector<TradeRecord> trades;  // every attempt, in step order
    std::vector<Buyer> final_buyers;
    std::vector<Seller> final_sellers;
    std::uint64_t total_steps = 0;
    Termination termination = Termination::buyers_exhausted;

    // Prices of successful trades with their step indices.
    std::vector<double> prices() const;
    std::vector<std::uint64_t> price_steps() const;
};

inline constexpr std::uint64_t kDefaultStepLimit = 100'000'000;

struct SessionOptions {
    std::uint64_t step_limit = kDefaultStepLimit;
    // When false only successful trades are kept in SessionResult::trades.
    bool keep_failed_attempts = true;
};

SessionResult run_session(Population population, std::uint64_t seed,
                          const SessionOptions& options = {});

}  // namespace powermarket
