#pragma once

#include "synbeats/estimator.hpp"
#include "synbeats/metrics.hpp"
#include "synbeats/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace synbeats {

/// One estimator run on one iteration. errors = truths - predictions; effects = observed - predictions.
struct EstimatorResult {
    std::string estimator;       // label; "name@seed" for multi-seed stochastic runs
    std::size_t iteration = 0;   // unit index, start column or event number
    std::string iteration_label; // unit name, start time or event id
    std::vector<int> periods;    // time labels of the predicted periods
    std::vector<double> predictions;
    std::vector<double> truths;
    std::vector<double> errors;
    std::vector<double> effects;
    std::vector<double> observed_path; // treated unit, every period of the panel the estimator saw
    std::vector<int> observed_times;
    std::uint64_t seed = 0;
    double wall_time = 0.0; // seconds
    bool failed = false;
    std::string failure;
};

struct EstimatorSummary {
    std::string estimator;
    std::size_t horizon = 0;
    Metrics metrics;
    double best_share = 0.0;
    std::size_t iterations = 0;
    std::size_t failures = 0;
    bool median_of_seeds = false;
};

struct PlaceboReport {
    std::string mode; // pseudo_units, pseudo_years, events
    std::size_t horizon = 0;
    std::vector<std::string> labels;                // one per row of `results`
    std::vector<std::vector<EstimatorResult>> results; // [label][iteration]
    std::vector<EstimatorSummary> summary;
    std::vector<std::string> warnings;

    [[nodiscard]] const EstimatorSummary& row(const std::string& label) const;
};

struct RunOptions {
    std::size_t threads = 1; // 0 = hardware concurrency
    /// Base seeds for stochastic estimators. Iteration seeds are derive_seed(base, iteration id).
    std::vector<std::uint64_t> seeds{0};
};

/**
 * @brief Runs every estimator on every panel and aggregates errors.
 *
 * Each panel is cut at treatment_start + horizon before estimation. Results
 * are stored by index, so the report does not depend on thread count.
 */
[[nodiscard]] PlaceboReport run_iterations(const std::vector<Panel>& panels, const std::vector<std::size_t>& ids,
                                           std::size_t horizon, const std::vector<EstimatorPtr>& estimators,
                                           const RunOptions& options, const std::string& mode);

[[nodiscard]] PlaceboReport run_placebo(const Panel& panel, const PlaceboSpec& spec,
                                        const std::vector<EstimatorPtr>& estimators, const RunOptions& options = {});

/// Each event panel supplies its own treated unit and treatment start.
[[nodiscard]] PlaceboReport run_event_study(const std::vector<Panel>& events, std::size_t horizon,
                                            const std::vector<EstimatorPtr>& estimators,
                                            const RunOptions& options = {});

struct ApplicationResult {
    std::vector<std::string> labels;
    std::vector<EstimatorResult> results; // one per label, every post-period
    std::vector<double> mean_effects;     // over the averaging window
    std::vector<int> window;              // first and last time label averaged
    std::vector<std::string> warnings;
};

/// Fits on the real treatment and averages effects over the first `window_periods` post-periods (all if unset).
[[nodiscard]] ApplicationResult run_application(const Panel& panel, const std::vector<EstimatorPtr>& estimators,
                                                const RunOptions& options = {},
                                                std::optional<std::size_t> window_periods = std::nullopt);

struct CompareOptions {
    std::size_t short_horizon = 1;
    std::size_t long_horizon = 5;
    /// First pseudo start time label for the year exercises; earliest admissible when unset.
    std::optional<int> first_year;
    std::size_t n_lag = 1;
};

struct CompareColumn {
    std::string name; // units_short, units_long, years_short, years_long, events
    PlaceboReport report;
};

/// Units/years by short/long placebo grid on one panel.
[[nodiscard]] std::vector<CompareColumn> compare_modern(const Panel& panel, const std::vector<EstimatorPtr>& estimators,
                                                        const RunOptions& options = {},
                                                        const CompareOptions& compare = {});

/// Pseudo-unit spec for horizon h. For h > 1 the pseudo treatment starts h - 1 periods before the real one.
[[nodiscard]] Panel shift_for_horizon(const Panel& panel, std::size_t horizon);

} // namespace synbeats
