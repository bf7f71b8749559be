#pragma once

#include "synbeats/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synbeats {

enum class Profile { smoke, paper };

[[nodiscard]] std::string_view to_string(Profile profile) noexcept;
[[nodiscard]] Profile parse_profile(std::string_view text);

/**
 * @brief Everything a CLI run needs.
 *
 * Sections and keys of the config file:
 *   [run]       data, estimators, horizon, threads, seeds, output, profile,
 *               first_year, window, treated_unit, treatment_start, events
 *   [synbeats]  n_lag, stacks, blocks_per_stack, layers, width, epochs, lr
 *   [nbeats]    same keys as [synbeats]
 *   [sc]        mode, tolerance, max_iterations
 *   [mc]        fixed_effects, tolerance, max_iterations, folds, holdout, cv_seed, grid_size, grid_ratio
 */
struct RunConfig {
    std::string data;
    std::string events;
    std::vector<std::string> estimators{"twfe", "sc", "synbeats"};
    std::size_t horizon = 1;
    std::size_t threads = 1;
    std::vector<std::uint64_t> seeds{0};
    std::string output = "out";
    Profile profile = Profile::smoke;
    std::optional<int> first_year;
    std::optional<std::size_t> window;
    std::optional<std::string> treated_unit;
    std::optional<int> treatment_start;
    EstimatorSettings settings;

    RunConfig();
};

/// Resets both neural estimators' network size and epochs to the profile.
void apply_profile(RunConfig& config, Profile profile);

/// Sets one `section.key`. Throws on unknown keys or out-of-range values.
void apply_setting(RunConfig& config, std::string_view section, std::string_view key, std::string_view value);

/// Reads `[section]` headers and `key = value` lines; '#' and ';' start comments.
void parse_config(std::istream& in, RunConfig& config, std::string_view source = "<config>");
void load_config(const std::string& path, RunConfig& config);

/// Effective configuration in the same format parse_config reads.
void write_config(const RunConfig& config, std::ostream& out);

[[nodiscard]] std::vector<std::string> split_list(std::string_view text);

} // namespace synbeats
