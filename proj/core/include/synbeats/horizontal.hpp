#pragma once

#include "synbeats/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace synbeats {

struct HorizontalWeights {
    Eigen::VectorXd coefficients; // one per pre-period
    double intercept = 0.0;
    std::size_t target_period = 0;
    /// Set when the cross-unit design was rank deficient and a 1e-8-scale ridge was added.
    bool ridge_fallback = false;

    /// beta_0 + sum_s beta_s Y_Ns over the treated unit's pre-period.
    [[nodiscard]] double predict(const PanelView& view) const;
};

/// Regresses control outcomes at `target_period` on their pre-period outcomes, across control units.
[[nodiscard]] HorizontalWeights fit_horizontal(const PanelView& view, std::size_t target_period);

/// One horizontal regression per post-period column, T0 .. T0 + horizon - 1.
[[nodiscard]] std::vector<double> predict_horizontal(const PanelView& view, std::size_t horizon);

} // namespace synbeats
