#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "powermarket/config.hpp"
#include "powermarket/engine.hpp"
#include "powermarket/stats.hpp"

namespace powermarket {

// Statistics that depend only on the successful-trade trajectory.
struct TrajectorySummary {
    std::uint64_t trades = 0;
    std::uint64_t last_step = 0;
    double mean_price = 0.0;
    double variance = 0.0;
    double max_price = 0.0;
    StepValue max_jump;  // largest increase of the running maximum
    double divergence_ratio = 0.0;
};

TrajectorySummary summarize_trajectory(std::span<const double> prices,
                                       std::span<const std::uint64_t> steps,
                                       double early_frac, double late_frac);

struct SessionSummary {
    std::uint32_t session = 0;
    std::uint64_t population_seed = 0;
    std::uint64_t trading_seed = 0;
    std::uint64_t total_steps = 0;
    Termination termination = Termination::buyers_exhausted;
    TrajectorySummary trajectory;
    double max_jump_position = 0.0;  // max_jump.step / total_steps
    std::uint32_t buyers_unmet = 0;  // buyers ending with demand left
    double unsold_seller_fraction = 0.0;
    double positive_budget_seller_fraction = 0.0;
    double spent = 0.0;    // total buyer budget spent
    double revenue = 0.0;  // total seller revenue collected
};

struct ExperimentSummary {
    std::string case_name;
    std::uint64_t master_seed = 0;
    std::vector<SessionSummary> sessions;
    // Successful-trade prices of every session, concatenated in session order.
    std::vector<double> pooled_prices;
    double pooled_mean = 0.0;
    double pooled_variance = 0.0;
    double pooled_max = 0.0;
};

// Per-session RNG seeds derived from the master seed.
std::uint64_t population_seed(std::uint64_t master_seed, std::uint32_t session);
std::uint64_t trading_seed(std::uint64_t master_seed, std::uint32_t session);

// Raised when a session fails; carries the failing session index.
class SessionFailed : public std::runtime_error {
public:
    SessionFailed(std::uint32_t session, const std::string& what);

    std::uint32_t session() const { return session_; }

private:
    std::uint32_t session_;
};

struct RunOptions {
    bool write_outputs = true;
    // Overrides the resolved worker count when nonzero.
    unsigned workers = 0;
};

// Runs every session of the experiment, sessions in parallel. Output files
// (under cfg.output_dir):
//   session_NNN_trajectory.csv  step,price,running_mean,running_variance,running_max
//   session_NNN_max.csv         step,running_max,delta_max
//   session_NNN_trades.csv      step,buyer_id,seller_id,bid,ask,success,price  (trade_log)
//   session_NNN_population.csv  id,role,q0,b0                                (population_dump)
//   summary.csv, summary.json
//   pooled_ecdf.csv             x,cdf
//   pooled_density.csv          bin_lo,mass
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

void write_population_csv(const std::filesystem::path& path, const Population& pop);
void write_trade_log_csv(const std::filesystem::path& path, std::span<const TradeRecord> trades);
void write_trajectory_csv(const std::filesystem::path& path, std::span<const double> prices,
                          std::span<const std::uint64_t> steps);
void write_ecdf_csv(const std::filesystem::path& path, const Ecdf& ecdf);
void write_density_csv(const std::filesystem::path& path, const UnitBinDensity& density);

struct Trajectory {
    std::vector<std::uint64_t> steps;
    std::vector<double> prices;
};

// Reads the step and price columns of a trajectory CSV.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace powermarket
