#pragma once

#include "synbeats/panel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace synbeats {

struct SdidOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 50000;
};

struct SdidFit {
    Eigen::VectorXd unit_weights; // control_units() order, on the simplex
    double unit_intercept = 0.0;
    Eigen::VectorXd time_weights; // pre-periods, on the simplex
    double time_intercept = 0.0;
    double sigma = 0.0;           // sd of first differences of control outcomes, pre-period
    double zeta = 0.0;            // (T_post)^(1/4) * sigma
    Eigen::VectorXd counterfactual;     // one per post-period
    Eigen::VectorXd per_period_effects; // observed treated minus counterfactual
    double pooled_effect = 0.0;         // mean of per_period_effects
    std::vector<std::string> warnings;
};

/**
 * @brief Synthetic difference-in-differences with per-period effects.
 *
 * Weights use only what the view exposes. The effects are read from the
 * treated unit's observed post-period in the underlying panel.
 */
[[nodiscard]] SdidFit fit_sdid(const PanelView& view, const SdidOptions& options = {});

} // namespace synbeats
