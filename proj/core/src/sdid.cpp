#include "synbeats/sdid.hpp"

#include "synbeats/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace synbeats {

SdidFit fit_sdid(const PanelView& view, const SdidOptions& options) {
    const auto t0 = static_cast<Eigen::Index>(view.pre_periods());
    const auto t = static_cast<Eigen::Index>(view.num_periods());
    const auto tpost = t - t0;
    if (t0 < 2) throw std::invalid_argument("SDID needs at least 2 pre-treatment periods");
    if (view.num_units() < 2) throw std::invalid_argument("SDID needs at least one control unit");
    if (tpost < 1) throw std::invalid_argument("SDID needs at least one post-treatment period");

    const Eigen::MatrixXd c = view.controls();
    const Eigen::MatrixXd c_pre = c.leftCols(t0);
    const Eigen::VectorXd y_pre = view.treated_pre();

    SdidFit out;
    const Eigen::MatrixXd diffs = c_pre.rightCols(t0 - 1) - c_pre.leftCols(t0 - 1);
    const auto count = static_cast<double>(diffs.size());
    if (count >= 2.0) {
        const double mean = diffs.mean();
        out.sigma = std::sqrt((diffs.array() - mean).square().sum() / (count - 1.0));
    }
    out.zeta = std::pow(static_cast<double>(tpost), 0.25) * out.sigma;
    if (!(out.sigma > 0.0)) {
        out.zeta = 0.0;
        out.warnings.emplace_back("control first differences have zero spread; unit weights are unregularized");
    }

    SimplexLsOptions unit_opts;
    unit_opts.intercept = true;
    unit_opts.ridge = out.zeta * out.zeta * static_cast<double>(t0);
    unit_opts.tolerance = options.tolerance;
    unit_opts.max_iterations = options.max_iterations;
    const auto unit = simplex_least_squares(c_pre.transpose(), y_pre, unit_opts);
    out.unit_weights = unit.weights;
    out.unit_intercept = unit.intercept;

    SimplexLsOptions time_opts = unit_opts;
    time_opts.ridge = 0.0;
    const Eigen::VectorXd post_means = c.rightCols(tpost).rowwise().mean();
    const auto time = simplex_least_squares(c_pre, post_means, time_opts);
    out.time_weights = time.weights;
    out.time_intercept = time.intercept;

    const double treated_pre_avg = y_pre.dot(out.time_weights);
    const double synthetic_pre_avg = out.unit_weights.dot(c_pre * out.time_weights);
    const Eigen::VectorXd synthetic_post = c.rightCols(tpost).transpose() * out.unit_weights;
    out.counterfactual = (synthetic_post.array() - synthetic_pre_avg + treated_pre_avg).matrix();

    const Eigen::VectorXd observed =
        view.unmask().outcomes().row(static_cast<Eigen::Index>(view.treated_unit())).tail(tpost).transpose();
    out.per_period_effects = observed - out.counterfactual;
    out.pooled_effect = out.per_period_effects.mean();
    return out;
}

} // namespace synbeats
