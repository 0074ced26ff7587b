#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "powermarket/engine.hpp"
#include "powermarket/population.hpp"

namespace powermarket {

// Parse or validation failure. `diagnostics` lists every problem found,
// each prefixed with the line number or key it concerns.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

struct ExperimentConfig {
    std::string case_name = "EXP";
    PopulationConfig population = exp_preset();
    std::uint32_t sessions = 10;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir = "out";
    bool trade_log = false;
    bool population_dump = false;
    double early_frac = 0.2;
    double late_frac = 0.1;
    double bin_width = 1.0;
    // 0 selects the hardware concurrency.
    unsigned workers = 0;
    std::uint64_t step_limit = kDefaultStepLimit;

    std::vector<std::string> violations() const;
};

// Flat `key = value` text, one pair per line, '#' starts a comment.
//
//   case            EXP | LIN | custom (required)
//   master_seed     unsigned 64-bit integer (required)
//   sessions        >= 1, default 10
//   output_dir      path, default "out"
//   n_buyers n_sellers
//   demand_lo demand_hi supply_lo supply_hi
//   value_lo value_hi value_c value_reflected
//   cost_lo cost_hi cost_c cost_reflected
//   trade_log population_dump      true | false
//   early_frac late_frac bin_width workers step_limit
//
// EXP and LIN fill every population key from the built-in presets; any
// key given explicitly overrides the preset. `custom` requires all
// population keys. Unknown and repeated keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Preset lookup by case name (EXP, LIN; case-insensitive).
std::optional<PopulationConfig> preset(std::string_view name);

// Worker count after applying the POWERMARKET_WORKERS override.
unsigned resolve_workers(const ExperimentConfig& cfg);

inline constexpr const char* kWorkersEnvVar = "POWERMARKET_WORKERS";

}  // namespace powermarket
