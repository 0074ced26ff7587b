#include "powermarket/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "powermarket/csv.hpp"

namespace powermarket {

namespace {

constexpr std::uint64_t kPopulationStream = 0;
constexpr std::uint64_t kTradingStream = 1;

std::string session_file(std::uint32_t session, std::string_view suffix) {
    std::ostringstream os;
    os << "session_" << std::setw(3) << std::setfill('0') << session << '_' << suffix;
    return os.str();
}

void write_max_csv(const std::filesystem::path& path, const RunningStats& rs) {
    CsvWriter out(path, {"step", "running_max", "delta_max"});
    const auto& maxes = rs.max_series();
    const auto& deltas = rs.delta_max_series();
    // max_series has one more entry than delta_max_series (the first price).
    for (std::size_t i = 0; i < maxes.size(); ++i) {
        out.field(maxes[i].step).field(maxes[i].value).field(i == 0 ? 0.0 : deltas[i - 1].value);
        out.end_row();
    }
    out.close();
}

SessionSummary run_one(const ExperimentConfig& cfg, std::uint32_t session, bool write,
                       std::vector<double>& prices_out) {
    SessionSummary s;
    s.session = session;
    s.population_seed = population_seed(cfg.master_seed, session);
    s.trading_seed = trading_seed(cfg.master_seed, session);

    Population pop = build_population(cfg.population, s.population_seed);
    if (write && cfg.population_dump)
        write_population_csv(cfg.output_dir / session_file(session, "population.csv"), pop);

    SessionOptions opts;
    opts.step_limit = cfg.step_limit;
    opts.keep_failed_attempts = write && cfg.trade_log;
    SessionResult result = run_session(std::move(pop), s.trading_seed, opts);

    s.total_steps = result.total_steps;
    s.termination = result.termination;
    std::vector<double> prices = result.prices();
    const std::vector<std::uint64_t> steps = result.price_steps();
    s.trajectory = summarize_trajectory(prices, steps, cfg.early_frac, cfg.late_frac);
    s.max_jump_position = s.total_steps == 0
                              ? 0.0
                              : static_cast<double>(s.trajectory.max_jump.step) /
                                    static_cast<double>(s.total_steps);

    std::uint32_t unsold = 0, positive = 0;
    for (const auto& b : result.final_buyers) {
        if (b.demand > 0) ++s.buyers_unmet;
        s.spent += b.initial_budget - b.budget;
    }
    for (const auto& sel : result.final_sellers) {
        if (sel.supply > 0) ++unsold;
        if (sel.budget > 0.0) ++positive;
        s.revenue += sel.initial_budget - sel.budget;
    }
    const auto n_sellers = static_cast<double>(result.final_sellers.size());
    s.unsold_seller_fraction = unsold / n_sellers;
    s.positive_budget_seller_fraction = positive / n_sellers;

    if (write) {
        write_trajectory_csv(cfg.output_dir / session_file(session, "trajectory.csv"), prices, steps);
        RunningStats rs;
        for (std::size_t i = 0; i < prices.size(); ++i) rs.push(steps[i], prices[i]);
        write_max_csv(cfg.output_dir / session_file(session, "max.csv"), rs);
        if (cfg.trade_log)
            write_trade_log_csv(cfg.output_dir / session_file(session, "trades.csv"), result.trades);
    }
    prices_out = std::move(prices);
    return s;
}

void write_summary_csv(const std::filesystem::path& path, const ExperimentSummary& summary) {
    CsvWriter out(path, {"session", "population_seed", "trading_seed", "total_steps", "trades",
                         "termination", "mean_price", "variance", "max_price", "max_jump_step",
                         "max_jump", "max_jump_position", "divergence_ratio", "buyers_unmet",
                         "unsold_seller_fraction", "positive_budget_seller_fraction"});
    for (const auto& s : summary.sessions) {
        const auto& t = s.trajectory;
        out.field(std::uint64_t{s.session})
            .field(s.population_seed)
            .field(s.trading_seed)
            .field(s.total_steps)
            .field(t.trades)
            .field(to_string(s.termination))
            .field(t.mean_price)
            .field(t.variance)
            .field(t.max_price)
            .field(t.max_jump.step)
            .field(t.max_jump.value)
            .field(s.max_jump_position)
            .field(t.divergence_ratio)
            .field(std::uint64_t{s.buyers_unmet})
            .field(s.unsold_seller_fraction)
            .field(s.positive_budget_seller_fraction);
        out.end_row();
    }
    out.close();
}

nlohmann::ordered_json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

void write_summary_json(const std::filesystem::path& path, const ExperimentConfig& cfg,
                        const ExperimentSummary& summary) {
    using nlohmann::ordered_json;
    const auto& p = cfg.population;
    auto dist = [](const UnitPriceDistribution& d) {
        return ordered_json{{"lo", d.lo}, {"hi", d.hi}, {"c", d.c}, {"reflected", d.reflected}};
    };
    ordered_json j;
    j["case"] = summary.case_name;
    j["master_seed"] = summary.master_seed;
    j["population"] = {{"n_buyers", p.n_buyers},
                       {"n_sellers", p.n_sellers},
                       {"demand", {p.demand_range.lo, p.demand_range.hi}},
                       {"supply", {p.supply_range.lo, p.supply_range.hi}},
                       {"value", dist(p.value_dist)},
                       {"cost", dist(p.cost_dist)}};
    j["pooled"] = {{"trades", summary.pooled_prices.size()},
                   {"mean_price", summary.pooled_mean},
                   {"variance", summary.pooled_variance},
                   {"max_price", summary.pooled_max}};
    ordered_json sessions = ordered_json::array();
    for (const auto& s : summary.sessions) {
        const auto& t = s.trajectory;
        sessions.push_back({{"session", s.session},
                            {"population_seed", s.population_seed},
                            {"trading_seed", s.trading_seed},
                            {"total_steps", s.total_steps},
                            {"trades", t.trades},
                            {"termination", to_string(s.termination)},
                            {"mean_price", t.mean_price},
                            {"variance", t.variance},
                            {"max_price", t.max_price},
                            {"max_jump_step", t.max_jump.step},
                            {"max_jump", t.max_jump.value},
                            {"max_jump_position", s.max_jump_position},
                            {"divergence_ratio", finite_or_null(t.divergence_ratio)},
                            {"buyers_unmet", s.buyers_unmet},
                            {"unsold_seller_fraction", s.unsold_seller_fraction},
                            {"positive_budget_seller_fraction", s.positive_budget_seller_fraction}});
    }
    j["sessions"] = std::move(sessions);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path, "write failed");
}

}  // namespace

SessionFailed::SessionFailed(std::uint32_t session, const std::string& what)
    : std::runtime_error("session " + std::to_string(session) + ": " + what), session_(session) {}

std::uint64_t population_seed(std::uint64_t master_seed, std::uint32_t session) {
    return derive_seed(master_seed, 2 * std::uint64_t{session} + kPopulationStream);
}

std::uint64_t trading_seed(std::uint64_t master_seed, std::uint32_t session) {
    return derive_seed(master_seed, 2 * std::uint64_t{session} + kTradingStream);
}

TrajectorySummary summarize_trajectory(std::span<const double> prices,
                                       std::span<const std::uint64_t> steps,
                                       double early_frac, double late_frac) {
    if (prices.size() != steps.size())
        throw std::invalid_argument("summarize_trajectory: prices and steps differ in length");
    TrajectorySummary t;
    if (prices.empty()) return t;
    RunningStats rs;
    for (std::size_t i = 0; i < prices.size(); ++i) rs.push(steps[i], prices[i]);
    t.trades = rs.count();
    t.last_step = steps.back();
    t.mean_price = rs.mean();
    t.variance = rs.variance();
    t.max_price = rs.max();
    t.max_jump = max_divergence_step(rs);
    try {
        t.divergence_ratio = window_spread_ratio(prices, early_frac, late_frac);
    } catch (const std::invalid_argument&) {
        t.divergence_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    return t;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    if (auto v = cfg.violations(); !v.empty()) throw ConfigError(std::move(v));
    if (options.write_outputs) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec) throw IoError(cfg.output_dir, "cannot create directory: " + ec.message());
    }

    const std::uint32_t n = cfg.sessions;
    std::vector<SessionSummary> summaries(n);
    std::vector<std::vector<double>> prices(n);
    std::vector<std::exception_ptr> failures(n);
    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> abort{false};

    auto worker = [&] {
        for (std::uint32_t i = next++; i < n && !abort; i = next++) {
            try {
                summaries[i] = run_one(cfg, i, options.write_outputs, prices[i]);
            } catch (...) {
                failures[i] = std::current_exception();
                abort = true;
            }
        }
    };

    const unsigned workers =
        std::min(options.workers ? options.workers : resolve_workers(cfg), n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (std::uint32_t i = 0; i < n; ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw SessionFailed(i, e.what());
        }
    }

    ExperimentSummary summary;
    summary.case_name = cfg.case_name;
    summary.master_seed = cfg.master_seed;
    summary.sessions = std::move(summaries);
    for (auto& p : prices)
        summary.pooled_prices.insert(summary.pooled_prices.end(), p.begin(), p.end());

    if (!summary.pooled_prices.empty()) {
        const auto mv = batch_mean_variance(summary.pooled_prices);
        summary.pooled_mean = mv.mean;
        summary.pooled_variance = mv.variance;
        summary.pooled_max =
            *std::max_element(summary.pooled_prices.begin(), summary.pooled_prices.end());
    }

    if (options.write_outputs) {
        write_summary_csv(cfg.output_dir / "summary.csv", summary);
        write_summary_json(cfg.output_dir / "summary.json", cfg, summary);
        if (!summary.pooled_prices.empty()) {
            write_ecdf_csv(cfg.output_dir / "pooled_ecdf.csv", Ecdf(summary.pooled_prices));
            write_density_csv(cfg.output_dir / "pooled_density.csv",
                              UnitBinDensity(summary.pooled_prices, cfg.bin_width));
        }
    }
    return summary;
}

void write_population_csv(const std::filesystem::path& path, const Population& pop) {
    CsvWriter out(path, {"id", "role", "q0", "b0"});
    for (const auto& b : pop.buyers) {
        out.field(std::uint64_t{b.id}).field("buyer").field(std::uint64_t{b.initial_demand}).field(b.initial_budget);
        out.end_row();
    }
    for (const auto& s : pop.sellers) {
        out.field(std::uint64_t{s.id}).field("seller").field(std::uint64_t{s.initial_supply}).field(s.initial_budget);
        out.end_row();
    }
    out.close();
}

void write_trade_log_csv(const std::filesystem::path& path, std::span<const TradeRecord> trades) {
    CsvWriter out(path, {"step", "buyer_id", "seller_id", "bid", "ask", "success", "price"});
    for (const auto& t : trades) {
        out.field(t.step)
            .field(std::uint64_t{t.buyer_id})
            .field(std::uint64_t{t.seller_id})
            .field(t.bid)
            .field(t.ask)
            .field(t.success ? "1" : "0");
        if (t.success)
            out.field(t.price);
        else
            out.field("");
        out.end_row();
    }
    out.close();
}

void write_trajectory_csv(const std::filesystem::path& path, std::span<const double> prices,
                          std::span<const std::uint64_t> steps) {
    CsvWriter out(path, {"step", "price", "running_mean", "running_variance", "running_max"});
    RunningStats rs;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        rs.push(steps[i], prices[i]);
        out.field(steps[i]).field(prices[i]).field(rs.mean()).field(rs.variance()).field(rs.max());
        out.end_row();
    }
    out.close();
}

void write_ecdf_csv(const std::filesystem::path& path, const Ecdf& ecdf) {
    CsvWriter out(path, {"x", "cdf"});
    for (const auto& [x, p] : ecdf.steps()) {
        out.field(x).field(p);
        out.end_row();
    }
    out.close();
}

void write_density_csv(const std::filesystem::path& path, const UnitBinDensity& density) {
    CsvWriter out(path, {"bin_lo", "mass"});
    for (const auto& [lo, m] : density.masses()) {
        out.field(lo).field(m);
        out.end_row();
    }
    out.close();
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    const CsvTable table = read_delimited(path, true);
    const auto step_col = table.column("step");
    const auto price_col = table.column("price");
    if (!step_col || !price_col) throw IoError(path, "missing 'step' or 'price' column");
    Trajectory t;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto need = std::max(*step_col, *price_col);
        std::optional<double> price;
        std::uint64_t step = 0;
        bool ok = row.size() > need;
        if (ok) {
            price = parse_double(row[*price_col]);
            const auto& s = row[*step_col];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), step);
            ok = price && ec == std::errc{} && ptr == s.data() + s.size();
        }
        if (!ok) throw IoError(path, "malformed row on line " + std::to_string(table.lines[r]));
        t.steps.push_back(step);
        t.prices.push_back(*price);
    }
    return t;
}

}  // namespace powermarket
