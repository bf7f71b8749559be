#include "synbeats/synthetic_control.hpp"

#include "synbeats/linalg.hpp"

#include <stdexcept>
#include <string>

namespace synbeats {

std::string_view to_string(ScMode mode) noexcept {
    return mode == ScMode::abadie_simplex ? "abadie_simplex" : "di_regression";
}

ScMode parse_sc_mode(std::string_view text) {
    if (text == "abadie_simplex") return ScMode::abadie_simplex;
    if (text == "di_regression") return ScMode::di_regression;
    throw std::invalid_argument("unknown SC mode '" + std::string(text) + "'");
}

Eigen::VectorXd SCWeights::fitted(const PanelView& view) const {
    const Eigen::MatrixXd controls = view.controls();
    if (controls.rows() != weights.size()) throw std::invalid_argument("SC weights do not match the panel's controls");
    Eigen::VectorXd out = controls.transpose() * weights;
    out.array() += intercept;
    return out;
}

SCWeights fit_sc(const PanelView& view, const ScOptions& options) {
    const std::size_t t0 = view.pre_periods();
    const auto ctrl = view.control_units();
    if (t0 < 2) throw std::invalid_argument("synthetic control needs at least 2 pre-treatment periods");
    if (ctrl.empty()) throw std::invalid_argument("synthetic control needs at least one control unit");

    const Eigen::MatrixXd x = view.controls().leftCols(static_cast<Eigen::Index>(t0)).transpose(); // T0 x (N-1)
    const Eigen::VectorXd y = view.treated_pre();

    SCWeights out;
    out.mode = options.mode;
    if (options.mode == ScMode::abadie_simplex) {
        SimplexLsOptions o;
        o.tolerance = options.tolerance;
        o.max_iterations = options.max_iterations;
        o.record_history = options.record_history;
        auto r = simplex_least_squares(x, y, o);
        out.weights = std::move(r.weights);
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.objective = r.objective;
        out.objective_history = std::move(r.objective_history);
        return out;
    }

    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw std::invalid_argument("di_regression design is singular (" + std::to_string(ctrl.size()) + " controls, " +
                                    std::to_string(t0) + " pre-periods); use abadie_simplex mode instead");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    out.intercept = beta(0);
    out.weights = beta.tail(x.cols());
    out.objective = (design * beta - y).squaredNorm();
    return out;
}

} // namespace synbeats
