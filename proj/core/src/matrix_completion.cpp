#include "synbeats/matrix_completion.hpp"

#include "synbeats/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace synbeats {

Eigen::MatrixXd McFit::completed() const {
    Eigen::MatrixXd out = low_rank;
    out.colwise() += unit_fixed_effects;
    out.rowwise() += time_fixed_effects.transpose();
    return out;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& sigma, double lambda) {
    return (sigma.array() - lambda).cwiseMax(0.0).matrix();
}

namespace {

struct Effects {
    Eigen::VectorXd unit;
    Eigen::VectorXd time;
};

Effects solve_effects(const std::optional<AdditiveEffectsSolver>& solver, const Eigen::MatrixXd& r) {
    if (!solver) return {Eigen::VectorXd::Zero(r.rows()), Eigen::VectorXd::Zero(r.cols())};
    const auto fe = solver->solve(r);
    return {(fe.unit.array() + fe.intercept).matrix(), fe.time};
}

Eigen::MatrixXd effects_matrix(const Effects& e) {
    Eigen::MatrixXd f(e.unit.size(), e.time.size());
    for (Eigen::Index t = 0; t < e.time.size(); ++t) f.col(t) = (e.unit.array() + e.time(t)).matrix();
    return f;
}

double observed_sq(const Eigen::MatrixXd& m, const BoolMatrix& observed) {
    return observed.select(m, 0.0).squaredNorm();
}

} // namespace

McFit fit_mc_fixed(const Eigen::MatrixXd& y_in, const BoolMatrix& observed, double lambda, const McOptions& options,
                   const Eigen::MatrixXd* warm) {
    if (y_in.rows() != observed.rows() || y_in.cols() != observed.cols()) {
        throw std::invalid_argument("matrix completion: mask shape mismatch");
    }
    if (lambda < 0.0) throw std::invalid_argument("matrix completion: negative lambda");
    const Eigen::MatrixXd y = observed.select(y_in, 0.0);
    std::optional<AdditiveEffectsSolver> solver;
    if (options.fixed_effects) solver.emplace(observed);

    McFit out;
    out.lambda = lambda;
    out.low_rank = warm != nullptr ? *warm : Eigen::MatrixXd::Zero(y.rows(), y.cols());
    Effects fe = solve_effects(solver, y - out.low_rank);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        Eigen::MatrixXd f = effects_matrix(fe);
        const Eigen::MatrixXd z = observed.select(y - f, out.low_rank);
        const SvdResult svd = svd_small(z);
        const Eigen::VectorXd s = soft_threshold(svd.sigma, lambda);
        Eigen::MatrixXd next = svd.u * s.asDiagonal() * svd.v.transpose();
        const double change = (next - out.low_rank).norm() / std::max(1.0, out.low_rank.norm());
        out.low_rank = std::move(next);
        fe = solve_effects(solver, y - out.low_rank);
        f = effects_matrix(fe);
        const double objective = 0.5 * observed_sq(y - out.low_rank - f, observed) + lambda * s.sum();
        ++out.iterations;
        if (options.record_history) out.objective_history.push_back(objective);
        if (change <= options.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.unit_fixed_effects = fe.unit;
    out.time_fixed_effects = fe.time;
    return out;
}

std::vector<double> default_lambda_grid(const PanelView& view, const McOptions& options, std::size_t count,
                                        double ratio) {
    if (count == 0) throw std::invalid_argument("lambda grid size must be positive");
    const BoolMatrix observed = view.observed_mask();
    const Eigen::MatrixXd y = observed.select(view.unmask().outcomes(), 0.0);
    Eigen::MatrixXd residual = y;
    if (options.fixed_effects) {
        const auto fe = fit_additive_effects(y, observed);
        residual = observed.select(y - fe.fitted(), 0.0);
    }
    const double lambda_max = svd_small(residual).sigma(0);
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        grid.push_back(lambda_max * std::pow(ratio, frac));
    }
    return grid;
}

namespace {

bool keeps_lines(const BoolMatrix& mask) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        if (!mask.row(i).any()) return false;
    }
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        if (!mask.col(j).any()) return false;
    }
    return true;
}

} // namespace

McFit fit_mc(const PanelView& view, const std::vector<double>& grid, const McOptions& options) {
    if (grid.empty()) throw std::invalid_argument("matrix completion needs a non-empty lambda grid");
    const BoolMatrix observed = view.observed_mask();
    const Eigen::MatrixXd y = observed.select(view.unmask().outcomes(), 0.0);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (Eigen::Index j = 0; j < observed.cols(); ++j) {
        for (Eigen::Index i = 0; i < observed.rows(); ++i) {
            if (observed(i, j)) cells.emplace_back(i, j);
        }
    }
    const auto holdout = static_cast<std::size_t>(options.holdout_fraction * static_cast<double>(cells.size()));

    std::vector<double> cv_error(grid.size(), 0.0);
    std::size_t folds_used = 0;
    if (options.folds > 0 && holdout > 0) {
        SplitMix64 rng(options.cv_seed);
        for (std::size_t fold = 0; fold < options.folds; ++fold) {
            BoolMatrix train;
            std::vector<std::pair<Eigen::Index, Eigen::Index>> picked;
            for (int attempt = 0; attempt < 100; ++attempt) {
                auto pool = cells;
                for (std::size_t k = 0; k < holdout; ++k) {
                    const auto r = k + static_cast<std::size_t>(rng.below(pool.size() - k));
                    std::swap(pool[k], pool[r]);
                }
                picked.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(holdout));
                train = observed;
                for (const auto& [i, j] : picked) train(i, j) = false;
                if (keeps_lines(train)) break;
                picked.clear();
            }
            if (picked.empty()) continue;
            ++folds_used;
            Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(y.rows(), y.cols());
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const McFit f = fit_mc_fixed(y, train, grid[g], options, &warm);
                warm = f.low_rank;
                const Eigen::MatrixXd pred = f.completed();
                double sse = 0.0;
                for (const auto& [i, j] : picked) {
                    const double d = y(i, j) - pred(i, j);
                    sse += d * d;
                }
                cv_error[g] += sse / static_cast<double>(picked.size());
            }
        }
    }

    std::size_t best = 0;
    if (folds_used > 0) {
        for (std::size_t g = 1; g < grid.size(); ++g) {
            if (cv_error[g] < cv_error[best]) best = g;
        }
    }
    McFit out = fit_mc_fixed(y, observed, grid[best], options);
    out.cv_curve.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out.cv_curve.emplace_back(grid[g], folds_used > 0 ? cv_error[g] / static_cast<double>(folds_used)
                                                          : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

} // namespace synbeats
