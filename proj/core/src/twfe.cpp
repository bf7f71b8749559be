#include "synbeats/twfe.hpp"

#include "synbeats/linalg.hpp"

#include <stdexcept>

namespace synbeats {

TwfeFit fit_twfe(const Panel& panel) {
    if (panel.num_units() < 2) throw std::invalid_argument("TWFE needs at least two units");
    if (panel.pre_periods() == 0) throw std::invalid_argument("TWFE needs at least one pre-treatment period");
    const auto n = static_cast<Eigen::Index>(panel.num_units());
    const auto t = static_cast<Eigen::Index>(panel.num_periods());
    const auto t0 = static_cast<Eigen::Index>(panel.pre_periods());
    const auto treated = static_cast<Eigen::Index>(panel.treated_unit());

    BoolMatrix observed = BoolMatrix::Constant(n, t, true);
    observed.row(treated).tail(t - t0).setConstant(false);
    const AdditiveEffects fe = fit_additive_effects(panel.outcomes(), observed);

    TwfeFit out;
    out.intercept = fe.intercept;
    out.unit_effects = fe.unit;
    out.time_effects = fe.time;
    out.treatment_effects.resize(t - t0);
    out.counterfactual.resize(t - t0);
    for (Eigen::Index c = t0; c < t; ++c) {
        out.counterfactual(c - t0) = fe.fitted(treated, c);
        out.treatment_effects(c - t0) = panel.outcomes()(treated, c) - out.counterfactual(c - t0);
    }
    out.residuals = panel.outcomes() - fe.fitted();
    out.residuals.row(treated).tail(t - t0).setZero();
    return out;
}

} // namespace synbeats
