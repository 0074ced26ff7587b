#include "powermarket/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "powermarket/csv.hpp"

namespace powermarket {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "\n  " : "  ") << items[i];
    return os.str();
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view s) {
    const std::string v = lower(trim(s));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    return std::nullopt;
}

const std::set<std::string>& population_keys() {
    static const std::set<std::string> keys{
        "n_buyers", "n_sellers", "demand_lo", "demand_hi", "supply_lo",     "supply_hi",
        "value_lo", "value_hi",  "value_c",   "cost_lo",   "cost_hi",       "cost_c",
        "value_reflected", "cost_reflected"};
    return keys;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error("invalid configuration:\n" + join(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

std::vector<std::string> ExperimentConfig::violations() const {
    std::vector<std::string> v = population.violations();
    if (sessions < 1) v.emplace_back("sessions must be >= 1");
    if (!(early_frac > 0.0 && early_frac <= 1.0)) v.emplace_back("early_frac must be in (0, 1]");
    if (!(late_frac > 0.0 && late_frac <= 1.0)) v.emplace_back("late_frac must be in (0, 1]");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) v.emplace_back("bin_width must be positive");
    if (step_limit < 1) v.emplace_back("step_limit must be >= 1");
    if (output_dir.empty()) v.emplace_back("output_dir must not be empty");
    return v;
}

std::optional<PopulationConfig> preset(std::string_view name) {
    const std::string n = lower(name);
    if (n == "exp") return exp_preset();
    if (n == "lin") return lin_preset();
    return std::nullopt;
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::string> errors;
    std::map<std::string, std::pair<std::string, std::size_t>> entries;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = lower(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (auto [it, fresh] = entries.try_emplace(key, value, line_no); !fresh)
            errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                             "' (first set on line " + std::to_string(it->second.second) + ")");
    }

    ExperimentConfig cfg;
    auto where = [&](const std::string& key) {
        return "line " + std::to_string(entries.at(key).second) + ": " + key;
    };

    // Case selection decides the population defaults.
    bool custom = false;
    if (const auto it = entries.find("case"); it == entries.end()) {
        errors.emplace_back("case: required key missing (EXP, LIN or custom)");
    } else if (auto p = preset(it->second.first)) {
        cfg.case_name = lower(it->second.first) == "exp" ? "EXP" : "LIN";
        cfg.population = *p;
    } else if (lower(it->second.first) == "custom") {
        cfg.case_name = "custom";
        custom = true;
    } else {
        errors.push_back(where("case") + ": unknown case '" + it->second.first + "'");
    }
    if (!entries.contains("master_seed"))
        errors.emplace_back("master_seed: required key missing");
    if (custom)
        for (const auto& k : population_keys())
            if (!entries.contains(k) && k != "value_reflected" && k != "cost_reflected")
                errors.push_back(k + ": required for case = custom");

    using Setter = std::function<bool(const std::string&)>;
    auto u32 = [](std::uint32_t& dst) -> Setter {
        return [&dst](const std::string& v) {
            auto p = parse_int<std::uint32_t>(v);
            if (p) dst = *p;
            return p.has_value();
        };
    };
    auto u64 = [](std::uint64_t& dst) -> Setter {
        return [&dst](const std::string& v) {
            auto p = parse_int<std::uint64_t>(v);
            if (p) dst = *p;
            return p.has_value();
        };
    };
    auto real = [](double& dst) -> Setter {
        return [&dst](const std::string& v) {
            auto p = parse_double(v);
            if (p && std::isfinite(*p)) dst = *p;
            return p.has_value() && std::isfinite(*p);
        };
    };
    auto flag = [](bool& dst) -> Setter {
        return [&dst](const std::string& v) {
            auto p = parse_bool(v);
            if (p) dst = *p;
            return p.has_value();
        };
    };

    auto& pop = cfg.population;
    const std::map<std::string, Setter> setters{
        {"case", [](const std::string&) { return true; }},
        {"master_seed", u64(cfg.master_seed)},
        {"sessions", u32(cfg.sessions)},
        {"output_dir",
         [&cfg](const std::string& v) {
             cfg.output_dir = v;
             return !v.empty();
         }},
        {"n_buyers", u32(pop.n_buyers)},
        {"n_sellers", u32(pop.n_sellers)},
        {"demand_lo", u32(pop.demand_range.lo)},
        {"demand_hi", u32(pop.demand_range.hi)},
        {"supply_lo", u32(pop.supply_range.lo)},
        {"supply_hi", u32(pop.supply_range.hi)},
        {"value_lo", real(pop.value_dist.lo)},
        {"value_hi", real(pop.value_dist.hi)},
        {"value_c", real(pop.value_dist.c)},
        {"value_reflected", flag(pop.value_dist.reflected)},
        {"cost_lo", real(pop.cost_dist.lo)},
        {"cost_hi", real(pop.cost_dist.hi)},
        {"cost_c", real(pop.cost_dist.c)},
        {"cost_reflected", flag(pop.cost_dist.reflected)},
        {"trade_log", flag(cfg.trade_log)},
        {"population_dump", flag(cfg.population_dump)},
        {"early_frac", real(cfg.early_frac)},
        {"late_frac", real(cfg.late_frac)},
        {"bin_width", real(cfg.bin_width)},
        {"workers",
         [&cfg](const std::string& v) {
             auto p = parse_int<unsigned>(v);
             if (p) cfg.workers = *p;
             return p.has_value();
         }},
        {"step_limit", u64(cfg.step_limit)},
    };

    if (custom) {
        pop.value_dist.reflected = false;
        pop.cost_dist.reflected = false;
    }

    for (const auto& [key, entry] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            errors.push_back(where(key) + ": unknown key");
            continue;
        }
        if (!it->second(entry.first))
            errors.push_back(where(key) + ": invalid value '" + entry.first + "'");
    }

    if (errors.empty())
        for (auto& v : cfg.violations()) errors.push_back("validation: " + v);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

unsigned resolve_workers(const ExperimentConfig& cfg) {
    unsigned workers = cfg.workers;
    if (const char* env = std::getenv(kWorkersEnvVar)) {
        if (auto v = parse_int<unsigned>(env); v && *v > 0) workers = *v;
    }
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return std::min(workers, cfg.sessions);
}

}  // namespace powermarket
