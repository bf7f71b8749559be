#pragma once

#include "synbeats/linalg.hpp"
#include "synbeats/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace synbeats {

struct McOptions {
    bool fixed_effects = true;
    /// Stop when ||L_new - L_old||_F <= tolerance * max(1, ||L_old||_F).
    double tolerance = 1e-7;
    std::size_t max_iterations = 2000;
    std::size_t folds = 10;
    double holdout_fraction = 0.1;
    std::uint64_t cv_seed = 0;
    bool record_history = false;
};

struct McFit {
    Eigen::MatrixXd low_rank;          // L, N x T
    Eigen::VectorXd unit_fixed_effects; // includes the intercept
    Eigen::VectorXd time_fixed_effects;
    double lambda = 0.0;
    std::vector<std::pair<double, double>> cv_curve; // (lambda, mean held-out MSE over folds)
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    bool converged = false;

    /// L + Gamma + Delta.
    [[nodiscard]] Eigen::MatrixXd completed() const;
};

/// max(sigma - lambda, 0) elementwise.
[[nodiscard]] Eigen::VectorXd soft_threshold(const Eigen::VectorXd& sigma, double lambda);

/**
 * @brief Nuclear-norm penalized completion at a fixed penalty.
 *
 * Minimizes 1/2 ||P_O(Y - L - Gamma - Delta)||^2 + lambda ||L||_* by
 * alternating exact fixed-effect updates with soft-impute steps. Entries of
 * `y` outside `observed` are never read. `warm` seeds L.
 */
[[nodiscard]] McFit fit_mc_fixed(const Eigen::MatrixXd& y, const BoolMatrix& observed, double lambda,
                                 const McOptions& options = {}, const Eigen::MatrixXd* warm = nullptr);

/// 20 log-spaced values from the top singular value of the observed residual down to 1e-4 of it.
[[nodiscard]] std::vector<double> default_lambda_grid(const PanelView& view, const McOptions& options = {},
                                                      std::size_t count = 20, double ratio = 1e-4);

/// Chooses lambda from `grid` by k-fold CV on held-out observed cells, then refits on all observed cells.
[[nodiscard]] McFit fit_mc(const PanelView& view, const std::vector<double>& grid, const McOptions& options = {});

} // namespace synbeats
