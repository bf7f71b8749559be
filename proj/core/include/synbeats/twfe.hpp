#pragma once

#include "synbeats/panel.hpp"

#include <Eigen/Dense>

namespace synbeats {

/**
 * @brief Two-way fixed effects with one treatment dummy per post-treatment period.
 *
 * Identification pins the first unit effect and the first time effect to zero
 * and carries an intercept. The per-period dummies saturate the treated
 * post-period cells, so the fixed effects are the least squares fit on the
 * remaining cells.
 */
struct TwfeFit {
    double intercept = 0.0;
    Eigen::VectorXd unit_effects;      // N, unit_effects(0) = 0
    Eigen::VectorXd time_effects;      // T, time_effects(0) = 0
    Eigen::VectorXd treatment_effects; // one per post-period
    Eigen::VectorXd counterfactual;    // Y_Nt(1) - tau_t for each post-period
    Eigen::MatrixXd residuals;         // N x T, zero on treated cells
};

/// Uses the full unmasked panel, including the treated post-period.
[[nodiscard]] TwfeFit fit_twfe(const Panel& panel);

} // namespace synbeats
