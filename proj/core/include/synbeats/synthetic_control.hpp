#pragma once

#include "synbeats/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

namespace synbeats {

enum class ScMode { abadie_simplex, di_regression };

[[nodiscard]] std::string_view to_string(ScMode mode) noexcept;
[[nodiscard]] ScMode parse_sc_mode(std::string_view text);

struct ScOptions {
    ScMode mode = ScMode::abadie_simplex;
    double tolerance = 1e-8;
    std::size_t max_iterations = 500000;
    bool record_history = false;
};

struct SCWeights {
    Eigen::VectorXd weights; // one per control, control_units() order
    double intercept = 0.0;
    ScMode mode = ScMode::abadie_simplex;
    std::size_t iterations = 0;
    bool converged = true;
    double objective = 0.0; // pre-period sum of squared residuals
    std::vector<double> objective_history;

    /// intercept + sum_i w_i Y_it for every column of the panel.
    [[nodiscard]] Eigen::VectorXd fitted(const PanelView& view) const;
};

/// Vertical regression of the treated pre-period on the controls.
[[nodiscard]] SCWeights fit_sc(const PanelView& view, const ScOptions& options = {});

} // namespace synbeats
