#include "synbeats/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace synbeats {

namespace {

// Tall case (rows >= cols).
SvdResult jacobi_tall(const Eigen::MatrixXd& m) {
    const Eigen::Index rows = m.rows();
    const Eigen::Index n = m.cols();
    Eigen::MatrixXd a = m;
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    constexpr double tol = 1e-15;
    constexpr int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = a.col(p).squaredNorm();
                const double beta = a.col(q).squaredNorm();
                const double gamma = a.col(p).dot(a.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index i = 0; i < rows; ++i) {
                    const double ap = a(i, p);
                    const double aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    Eigen::VectorXd norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms(j) = a.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

    SvdResult out;
    out.u = Eigen::MatrixXd::Zero(rows, n);
    out.sigma.resize(n);
    out.v.resize(n, n);
    const double smax = n > 0 ? norms(order[0]) : 0.0;
    const double floor = smax * static_cast<double>(rows) * std::numeric_limits<double>::epsilon();
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index j = order[static_cast<std::size_t>(k)];
        out.sigma(k) = norms(j);
        out.v.col(k) = v.col(j);
        if (norms(j) > floor && norms(j) > 0.0) {
            out.u.col(k) = a.col(j) / norms(j);
            filled[static_cast<std::size_t>(k)] = true;
        }
    }
    // Complete U for (numerically) zero singular values.
    Eigen::Index candidate = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (filled[static_cast<std::size_t>(k)]) continue;
        while (candidate < rows) {
            Eigen::VectorXd e = Eigen::VectorXd::Unit(rows, candidate++);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (filled[static_cast<std::size_t>(j)]) e -= out.u.col(j).dot(e) * out.u.col(j);
                }
            }
            const double norm = e.norm();
            if (norm > 1e-8) {
                out.u.col(k) = e / norm;
                filled[static_cast<std::size_t>(k)] = true;
                break;
            }
        }
    }
    return out;
}

} // namespace

SvdResult svd_small(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw std::invalid_argument("svd_small: matrix has non-finite entries");
    if (m.rows() >= m.cols()) return jacobi_tall(m);
    SvdResult t = jacobi_tall(m.transpose());
    std::swap(t.u, t.v);
    return t;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    if (n == 0) return v;
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += u[static_cast<std::size_t>(k)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

SimplexLsResult simplex_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                      const SimplexLsOptions& options) {
    if (a.rows() != y.size()) throw std::invalid_argument("simplex_least_squares: row count mismatch");
    if (a.cols() == 0) throw std::invalid_argument("simplex_least_squares: no columns");
    if (options.ridge < 0.0) throw std::invalid_argument("simplex_least_squares: negative ridge");

    Eigen::MatrixXd ac = a;
    Eigen::VectorXd yc = y;
    if (options.intercept) {
        ac.rowwise() -= a.colwise().mean();
        yc.array() -= y.mean();
    }
    const auto objective = [&](const Eigen::VectorXd& w) {
        return (ac * w - yc).squaredNorm() + options.ridge * w.squaredNorm();
    };

    const double smax = ac.size() > 0 ? svd_small(ac).sigma(0) : 0.0;
    double lipschitz = 2.0 * (smax * smax + options.ridge);
    if (!(lipschitz > 0.0)) lipschitz = 1.0;
    double step = 1.0 / lipschitz;

    const auto gradient = [&](const Eigen::VectorXd& w) {
        return Eigen::VectorXd(2.0 * (ac.transpose() * (ac * w - yc)) + 2.0 * options.ridge * w);
    };

    // Monotone FISTA: accelerated projected gradient that never accepts an objective increase.
    SimplexLsResult out;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(a.cols(), 1.0 / static_cast<double>(a.cols()));
    Eigen::VectorXd extrapolated = w;
    double f = objective(w);
    double momentum = 1.0;
    for (std::size_t k = 0; k < options.max_iterations; ++k) {
        if (options.record_history) out.objective_history.push_back(f);
        // Stationarity test at the current iterate.
        const Eigen::VectorXd grad_w = gradient(w);
        const double mapping_norm = (project_to_simplex(w - step * grad_w) - w).norm() / step;
        if (mapping_norm < options.tolerance) {
            out.converged = true;
            break;
        }
        const Eigen::VectorXd grad = gradient(extrapolated);
        const double f_extrapolated = objective(extrapolated);
        Eigen::VectorXd z;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            z = project_to_simplex(extrapolated - step * grad);
            const Eigen::VectorXd d = z - extrapolated;
            if (objective(z) <= f_extrapolated + grad.dot(d) + d.squaredNorm() / (2.0 * step)) break;
            step *= 0.5;
        }
        ++out.iterations;
        const double f_z = objective(z);
        const Eigen::VectorXd previous = w;
        if (f_z <= f) {
            w = z;
            f = f_z;
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        extrapolated = w + (momentum / next_momentum) * (z - w) + ((momentum - 1.0) / next_momentum) * (w - previous);
        momentum = next_momentum;
    }
    out.weights = w;
    out.objective = f;
    out.intercept = options.intercept ? (y - a * w).mean() : 0.0;
    return out;
}

Eigen::MatrixXd AdditiveEffects::fitted() const {
    Eigen::MatrixXd f(unit.size(), time.size());
    for (Eigen::Index t = 0; t < time.size(); ++t) f.col(t) = (unit.array() + intercept + time(t)).matrix();
    return f;
}

AdditiveEffectsSolver::AdditiveEffectsSolver(const BoolMatrix& observed) : observed_(observed) {
    const Eigen::Index n = observed.rows();
    const Eigen::Index t = observed.cols();
    if (n == 0 || t == 0) throw std::invalid_argument("additive effects: empty matrix");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!observed.row(i).any()) throw std::invalid_argument("additive effects: row " + std::to_string(i) + " has no observed cells");
    }
    for (Eigen::Index j = 0; j < t; ++j) {
        if (!observed.col(j).any()) throw std::invalid_argument("additive effects: column " + std::to_string(j) + " has no observed cells");
    }
    // Parameters: [mu, a_1 .. a_{n-1}, d_1 .. d_{t-1}].
    const Eigen::Index p = n + t - 1;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) {
            if (!observed(i, j)) continue;
            Eigen::Index idx[3];
            int k = 0;
            idx[k++] = 0;
            if (i > 0) idx[k++] = i;
            if (j > 0) idx[k++] = n - 1 + j;
            for (int x = 0; x < k; ++x) {
                for (int y = 0; y < k; ++y) gram(idx[x], idx[y]) += 1.0;
            }
        }
    }
    factor_.compute(gram);
    const Eigen::VectorXd d = factor_.vectorD();
    if (factor_.info() != Eigen::Success || d.minCoeff() <= 1e-10 * d.cwiseAbs().maxCoeff()) {
        throw std::invalid_argument("additive effects are not identified by the observed cells");
    }
}

AdditiveEffects AdditiveEffectsSolver::solve(const Eigen::MatrixXd& r) const {
    const Eigen::Index n = observed_.rows();
    const Eigen::Index t = observed_.cols();
    if (r.rows() != n || r.cols() != t) throw std::invalid_argument("additive effects: shape mismatch");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + t - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) {
            if (!observed_(i, j)) continue;
            const double v = r(i, j);
            rhs(0) += v;
            if (i > 0) rhs(i) += v;
            if (j > 0) rhs(n - 1 + j) += v;
        }
    }
    const Eigen::VectorXd theta = factor_.solve(rhs);
    AdditiveEffects out;
    out.intercept = theta(0);
    out.unit = Eigen::VectorXd::Zero(n);
    out.time = Eigen::VectorXd::Zero(t);
    out.unit.tail(n - 1) = theta.segment(1, n - 1);
    out.time.tail(t - 1) = theta.tail(t - 1);
    return out;
}

AdditiveEffects fit_additive_effects(const Eigen::MatrixXd& r, const BoolMatrix& observed) {
    return AdditiveEffectsSolver(observed).solve(r);
}

} // namespace synbeats
