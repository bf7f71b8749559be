#include "synbeats/horizontal.hpp"

#include <stdexcept>
#include <string>

namespace synbeats {

double HorizontalWeights::predict(const PanelView& view) const {
    const Eigen::VectorXd pre = view.treated_pre();
    if (pre.size() != coefficients.size()) throw std::invalid_argument("horizontal weights do not match the pre-period");
    return intercept + coefficients.dot(pre);
}

HorizontalWeights fit_horizontal(const PanelView& view, std::size_t target_period) {
    const std::size_t t0 = view.pre_periods();
    if (t0 == 0) throw std::invalid_argument("horizontal regression needs at least one pre-treatment period");
    if (target_period >= view.num_periods()) {
        throw std::invalid_argument("target period " + std::to_string(target_period) + " is outside the panel");
    }
    const Eigen::MatrixXd controls = view.controls();
    if (controls.rows() < 2) throw std::invalid_argument("horizontal regression needs at least two control units");

    Eigen::MatrixXd x = controls.leftCols(static_cast<Eigen::Index>(t0));
    Eigen::VectorXd y = controls.col(static_cast<Eigen::Index>(target_period));
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    x.rowwise() -= x_mean;
    y.array() -= y_mean;

    HorizontalWeights out;
    out.target_period = target_period;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() == x.cols()) {
        out.coefficients = qr.solve(y);
    } else {
        out.ridge_fallback = true;
        Eigen::MatrixXd gram = x.transpose() * x;
        const double scale = gram.trace() / static_cast<double>(gram.rows());
        gram.diagonal().array() += 1e-8 * (scale > 0.0 ? scale : 1.0);
        out.coefficients = gram.ldlt().solve(x.transpose() * y);
    }
    out.intercept = y_mean - x_mean.dot(out.coefficients);
    return out;
}

std::vector<double> predict_horizontal(const PanelView& view, std::size_t horizon) {
    const std::size_t t0 = view.pre_periods();
    if (t0 + horizon > view.num_periods()) throw std::invalid_argument("horizon exceeds the panel");
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) out.push_back(fit_horizontal(view, t0 + h).predict(view));
    return out;
}

} // namespace synbeats
