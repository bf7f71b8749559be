#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace synbeats {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SvdResult {
    Eigen::MatrixXd u;      // m x k, orthonormal columns
    Eigen::VectorXd sigma;  // k = min(m, n), descending, nonnegative
    Eigen::MatrixXd v;      // n x k, orthonormal columns
};

/**
 * @brief Thin SVD by one-sided (Hestenes) Jacobi rotations.
 *
 * Accurate to working precision for the small dense matrices used here.
 * Columns of U belonging to zero singular values are completed to an
 * orthonormal set. Throws std::invalid_argument on non-finite input.
 */
[[nodiscard]] SvdResult svd_small(const Eigen::MatrixXd& m);

/// Euclidean projection onto {w >= 0, sum w = 1}.
[[nodiscard]] Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

struct SimplexLsOptions {
    bool intercept = false;
    /// Adds ridge * ||w||^2 to the objective.
    double ridge = 0.0;
    /// Stop when the gradient-mapping norm falls below this.
    double tolerance = 1e-8;
    std::size_t max_iterations = 500000;
    bool record_history = false;
};

struct SimplexLsResult {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_history; // before each iteration, when requested
};

/**
 * @brief min ||A w + b 1 - y||^2 + ridge ||w||^2 over the simplex.
 *
 * b is free when `intercept` is set and zero otherwise. Solved by projected
 * gradient with backtracking, starting from uniform weights.
 */
[[nodiscard]] SimplexLsResult simplex_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                                    const SimplexLsOptions& options = {});

struct AdditiveEffects {
    double intercept = 0.0;
    Eigen::VectorXd unit;  // unit(0) = 0
    Eigen::VectorXd time;  // time(0) = 0

    [[nodiscard]] double fitted(Eigen::Index i, Eigen::Index t) const { return intercept + unit(i) + time(t); }
    [[nodiscard]] Eigen::MatrixXd fitted() const;
};

/**
 * @brief Least squares fit of r_it ~ mu + a_i + d_t over the cells where `observed` is true.
 *
 * The normal equations depend only on the mask, so they are factored once
 * and reused across right-hand sides.
 */
class AdditiveEffectsSolver {
public:
    explicit AdditiveEffectsSolver(const BoolMatrix& observed);

    [[nodiscard]] AdditiveEffects solve(const Eigen::MatrixXd& r) const;

private:
    BoolMatrix observed_;
    Eigen::LDLT<Eigen::MatrixXd> factor_;
};

[[nodiscard]] AdditiveEffects fit_additive_effects(const Eigen::MatrixXd& r, const BoolMatrix& observed);

} // namespace synbeats
