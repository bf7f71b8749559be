#include "synbeats/synthetic_control.hpp"
#include "synbeats/rng.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace synbeats;
using synbeats::test::make_panel;
using synbeats::test::prop99;

TEST(SyntheticControl, CopiesIdenticalControl) {
    SplitMix64 rng(13);
    Eigen::MatrixXd y(6, 14);
    for (Eigen::Index k = 0; k < y.size(); ++k) y.data()[k] = rng.normal();
    y.row(5) = y.row(3);
    y(5, 12) += 10.0; // post-period values are hidden anyway
    const Panel p = make_panel(y, 12);
    const SCWeights w = fit_sc(mask_post_treatment(p));
    EXPECT_GE(w.weights(3), 0.99);
    EXPECT_LT(w.objective, 1e-10);
    EXPECT_NEAR(w.weights.sum(), 1.0, 1e-12);
}

TEST(SyntheticControl, SingleControlWeightIsOne) {
    Eigen::MatrixXd y(2, 6);
    y << 1, 2, 3, 4, 5, 6, 3, 1, 4, 1, 5, 9;
    const PanelView v = mask_post_treatment(make_panel(y, 4));
    EXPECT_DOUBLE_EQ(fit_sc(v).weights(0), 1.0);
}

TEST(SyntheticControl, DiRegressionExactLine) {
    Eigen::MatrixXd y(2, 7);
    y.row(0) << 1, 4, 2, 8, 5, 7, 3;
    y.row(1) = 2.0 * y.row(0).array() + 5.0;
    const SCWeights w = fit_sc(mask_post_treatment(make_panel(y, 5)), {ScMode::di_regression});
    EXPECT_NEAR(w.intercept, 5.0, 1e-12);
    EXPECT_NEAR(w.weights(0), 2.0, 1e-12);
}

TEST(SyntheticControl, DiRegressionSingularDesignAdvisesSimplex) {
    const PanelView v = mask_post_treatment(prop99());
    try {
        (void)fit_sc(v, {ScMode::di_regression});
        FAIL() << "expected an error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("abadie_simplex"), std::string::npos);
    }
}

TEST(SyntheticControl, Prop99ObjectiveMonotoneAndFeasible) {
    ScOptions o;
    o.record_history = true;
    const SCWeights w = fit_sc(mask_post_treatment(prop99()), o);
    ASSERT_GT(w.objective_history.size(), 2u);
    for (std::size_t k = 1; k < w.objective_history.size(); ++k) {
        EXPECT_LE(w.objective_history[k], w.objective_history[k - 1] * (1 + 1e-12)) << "iteration " << k;
    }
    EXPECT_GE(w.weights.minCoeff(), 0.0);
    EXPECT_NEAR(w.weights.sum(), 1.0, 1e-12);
    EXPECT_TRUE(w.converged);
}

TEST(SyntheticControl, FittedCoversAllPeriods) {
    const PanelView v = mask_post_treatment(prop99());
    const SCWeights w = fit_sc(v);
    const Eigen::VectorXd f = w.fitted(v);
    EXPECT_EQ(f.size(), 31);
    EXPECT_NEAR(f(30), v.controls().col(30).dot(w.weights), 1e-12);
    EXPECT_EQ(parse_sc_mode("di_regression"), ScMode::di_regression);
    EXPECT_THROW((void)parse_sc_mode("lasso"), std::invalid_argument);
}
