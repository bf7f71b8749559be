#include "synbeats/estimator.hpp"
#include "synbeats/harness.hpp"
#include "synbeats/rng.hpp"
#include "synbeats/stocks.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace synbeats;
using synbeats::test::prop99;

namespace {

std::vector<double> post_truths(const Panel& p) {
    std::vector<double> out;
    for (std::size_t t = p.treatment_start(); t < p.num_periods(); ++t) out.push_back(p.at(p.treated_unit(), t));
    return out;
}

class Oracle : public CounterfactualEstimator {
public:
    explicit Oracle(std::string name) : name_(std::move(name)) {}
    std::string name() const override { return name_; }
    std::vector<double> predict(const Panel& p, std::uint64_t) const override { return post_truths(p); }

private:
    std::string name_;
};

// Truth plus seed-dependent noise; cheap stand-in for a neural estimator.
class Noisy : public CounterfactualEstimator {
public:
    std::string name() const override { return "noisy"; }
    bool stochastic() const override { return true; }
    std::vector<double> predict(const Panel& p, std::uint64_t seed) const override {
        SplitMix64 rng(seed);
        auto out = post_truths(p);
        for (double& v : out) v += rng.normal();
        return out;
    }
};

class Failing : public CounterfactualEstimator {
public:
    std::string name() const override { return "failing"; }
    std::vector<double> predict(const Panel& p, std::uint64_t) const override {
        if (p.units()[p.treated_unit()] == "Utah") throw std::runtime_error("did not converge");
        return std::vector<double>(p.post_periods(), 100.0);
    }
};

PlaceboSpec units_spec(std::size_t horizon = 1) {
    return default_placebo_spec(prop99(), PlaceboMode::pseudo_units, horizon);
}

} // namespace

TEST(Harness, OracleIsPerfect) {
    const auto r = run_placebo(prop99(), units_spec(), {std::make_shared<Oracle>("oracle"), make_estimator("twfe")});
    const auto& o = r.row("oracle");
    EXPECT_EQ(o.metrics.rmse, 0.0);
    EXPECT_EQ(o.metrics.mape, 0.0);
    EXPECT_EQ(o.best_share, 1.0);
    EXPECT_EQ(r.row("twfe").best_share, 0.0);
}

TEST(Harness, IdenticalEstimatorsSplitBest) {
    const auto r = run_placebo(prop99(), units_spec(), {std::make_shared<Oracle>("a"), std::make_shared<Oracle>("b")});
    EXPECT_DOUBLE_EQ(r.row("a").best_share, 0.5);
    EXPECT_DOUBLE_EQ(r.row("b").best_share, 0.5);
}

TEST(Harness, Prop99ReportInvariants) {
    const auto r = run_placebo(prop99(), units_spec(), make_estimators({"twfe", "sc", "horizontal"}));
    ASSERT_EQ(r.labels.size(), 3u);
    double share_sum = 0.0;
    for (std::size_t l = 0; l < r.labels.size(); ++l) {
        ASSERT_EQ(r.results[l].size(), 38u);
        double sq = 0.0;
        std::size_t n = 0;
        for (const auto& it : r.results[l]) {
            ASSERT_FALSE(it.failed) << it.failure;
            ASSERT_EQ(it.errors.size(), 1u);
            EXPECT_EQ(it.periods[0], 1989);
            for (std::size_t k = 0; k < it.errors.size(); ++k) {
                // Placebo effect minus true effect (zero) is the prediction error.
                EXPECT_EQ(it.effects[k] - 0.0, it.errors[k]);
                EXPECT_EQ(it.errors[k], it.truths[k] - it.predictions[k]);
                sq += it.errors[k] * it.errors[k];
                ++n;
            }
        }
        const auto& s = r.row(r.labels[l]);
        EXPECT_NEAR(s.metrics.rmse * s.metrics.rmse, sq / static_cast<double>(n), 1e-12 * sq);
        EXPECT_EQ(s.iterations, 38u);
        share_sum += s.best_share;
    }
    EXPECT_NEAR(share_sum, 1.0, 1e-12);
}

TEST(Harness, ThreadCountDoesNotChangeResults) {
    RunOptions one, three;
    three.threads = 3;
    const auto est = make_estimators({"twfe", "sc"});
    const auto a = run_placebo(prop99(), units_spec(), est, one);
    const auto b = run_placebo(prop99(), units_spec(), est, three);
    for (std::size_t l = 0; l < a.labels.size(); ++l) {
        for (std::size_t i = 0; i < a.results[l].size(); ++i) EXPECT_EQ(a.results[l][i].predictions, b.results[l][i].predictions);
        EXPECT_EQ(a.summary[l].metrics.rmse, b.summary[l].metrics.rmse);
    }
}

TEST(Harness, SeedsMakeLanesAndMedianRow) {
    RunOptions o;
    o.seeds = {0, 1, 2};
    const auto r = run_placebo(prop99(), units_spec(), {std::make_shared<Noisy>(), make_estimator("twfe")}, o);
    EXPECT_EQ(r.labels, (std::vector<std::string>{"noisy@0", "noisy@1", "noisy@2", "twfe"}));
    const auto& med = r.row("noisy");
    EXPECT_TRUE(med.median_of_seeds);
    std::vector<double> rmse{r.row("noisy@0").metrics.rmse, r.row("noisy@1").metrics.rmse, r.row("noisy@2").metrics.rmse};
    EXPECT_EQ(med.metrics.rmse, median(rmse));
    // Each seed round is a separate contest against twfe, whose share is averaged over rounds.
    double noisy_total = 0.0;
    for (const auto* label : {"noisy@0", "noisy@1", "noisy@2"}) {
        EXPECT_GT(r.row(label).best_share, 0.8) << label;
        noisy_total += r.row(label).best_share;
    }
    EXPECT_NEAR(noisy_total + 3.0 * r.row("twfe").best_share, 3.0, 1e-12);
    const auto again = run_placebo(prop99(), units_spec(), {std::make_shared<Noisy>(), make_estimator("twfe")}, o);
    EXPECT_EQ(again.row("noisy").metrics.rmse, med.metrics.rmse);
    // Iteration seeds derive from (base, unit index).
    EXPECT_EQ(r.results[1][0].seed, derive_seed(1, r.results[1][0].iteration));
}

TEST(Harness, FailuresAreReportedNotImputed) {
    const auto r = run_placebo(prop99(), units_spec(), {std::make_shared<Failing>(), make_estimator("twfe")});
    const auto& s = r.row("failing");
    EXPECT_EQ(s.failures, 1u);
    EXPECT_EQ(s.iterations, 38u);
    EXPECT_FALSE(r.warnings.empty());
    std::size_t failed = 0;
    for (const auto& it : r.results[0]) failed += it.failed ? 1 : 0;
    EXPECT_EQ(failed, 1u);
}

TEST(Harness, HorizonShiftAndTruncation) {
    const Panel shifted = shift_for_horizon(prop99(), 5);
    EXPECT_EQ(shifted.times()[shifted.treatment_start()], 1985);
    const auto r = run_placebo(shifted, default_placebo_spec(shifted, PlaceboMode::pseudo_units, 5), make_estimators({"twfe"}));
    const auto& it = r.results[0][0];
    EXPECT_EQ(it.periods, (std::vector<int>{1985, 1986, 1987, 1988, 1989}));
    EXPECT_EQ(it.observed_times.back(), 1989);
    EXPECT_THROW((void)shift_for_horizon(prop99(), 0), std::invalid_argument);
}

TEST(Harness, PseudoYearsUseOnlyPrePeriod) {
    const Panel& p = prop99();
    const auto spec = default_placebo_spec(p, PlaceboMode::pseudo_years, 1, 1, p.period_index(1975));
    const auto r = run_placebo(p, spec, make_estimators({"twfe"}));
    ASSERT_EQ(r.results[0].size(), 14u);
    EXPECT_EQ(r.results[0].front().iteration_label, "1975");
    EXPECT_EQ(r.results[0].back().periods, (std::vector<int>{1988}));
}

TEST(Harness, ApplicationWindow) {
    const auto a = run_application(prop99(), make_estimators({"twfe", "sc"}), {}, 10);
    EXPECT_EQ(a.window, (std::vector<int>{1989, 1998}));
    ASSERT_EQ(a.results[0].effects.size(), 12u);
    double s = 0.0;
    for (std::size_t k = 0; k < 10; ++k) s += a.results[0].effects[k];
    EXPECT_DOUBLE_EQ(a.mean_effects[0], s / 10.0);
    EXPECT_LT(a.mean_effects[0], 0.0);
    EXPECT_THROW((void)run_application(prop99(), make_estimators({"twfe"}), {}, 13), std::invalid_argument);
}

TEST(Harness, DuplicateAndUnknownEstimators) {
    EXPECT_THROW((void)run_placebo(prop99(), units_spec(), make_estimators({"twfe", "twfe"})), std::invalid_argument);
    EXPECT_THROW((void)make_estimator("lasso"), std::invalid_argument);
    EXPECT_EQ(known_estimators().size(), 8u);
}

TEST(Stocks, ShapeAndDeterminism) {
    StockOptions o;
    o.events = 5;
    o.seed = 7;
    const auto a = generate_stock_events(o);
    const auto b = generate_stock_events(o);
    ASSERT_EQ(a.size(), 5u);
    for (std::size_t e = 0; e < a.size(); ++e) {
        EXPECT_EQ(a[e], b[e]);
        EXPECT_EQ(a[e].num_units(), 9u);
        EXPECT_EQ(a[e].pre_periods(), 250u);
        EXPECT_EQ(a[e].post_periods(), 1u);
        EXPECT_EQ(a[e].times().front(), -250);
    }
    const auto r = run_event_study(a, 1, make_estimators({"twfe", "sc"}));
    EXPECT_EQ(r.results[0].size(), 5u);
    o.peers = 3;
    EXPECT_THROW((void)generate_stock_events(o), std::invalid_argument);
}
