#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace synbeats {

struct Metrics {
    double rmse = 0.0;
    double mape = 0.0;            // percent
    std::size_t count = 0;        // errors used for rmse
    std::size_t zero_truths = 0;  // periods left out of mape
};

/// rmse = sqrt(mean e^2); mape = 100 mean(|e| / |truth|) over nonzero truths.
/// Throws on empty or mismatched input, and when every truth is zero.
[[nodiscard]] Metrics compute_metrics(std::span<const double> errors, std::span<const double> truths);

/**
 * @brief Share of iterations in which each estimator has the lowest score.
 *
 * `scores[e][i]` is estimator e's loss on iteration i; NaN marks a failed
 * run, which cannot win. Ties split the credit equally. Iterations where
 * every estimator failed are left out of the denominator.
 */
[[nodiscard]] std::vector<double> best_shares(const std::vector<std::vector<double>>& scores);

/// Median of a copy; the mean of the middle pair for even sizes. Throws on empty input.
[[nodiscard]] double median(std::vector<double> values);

} // namespace synbeats
