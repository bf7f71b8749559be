// Acceptance checks. Usage: synbeats_acceptance [criterion...]
// Exit codes: 0 all pass, 1 any failure, 77 everything requested was skipped.

#include "synbeats/cli.hpp"
#include "synbeats/config.hpp"
#include "synbeats/csv.hpp"
#include "synbeats/estimator.hpp"
#include "synbeats/harness.hpp"
#include "synbeats/linalg.hpp"
#include "synbeats/matrix_completion.hpp"
#include "synbeats/metrics.hpp"
#include "synbeats/nbeats.hpp"
#include "synbeats/nn.hpp"
#include "synbeats/rng.hpp"
#include "synbeats/sdid.hpp"
#include "synbeats/synthetic_control.hpp"
#include "synbeats/twfe.hpp"

#include <Eigen/Dense>

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace synbeats;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

std::string fmt_num(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

std::string data_dir() {
    if (const char* env = std::getenv("SYNBEATS_DATA_DIR")) return env;
    return SYNBEATS_TEST_DATA_DIR;
}

std::optional<Panel> load_optional(const std::string& name) {
    const fs::path p = fs::path(data_dir()) / name;
    if (!fs::exists(p)) return std::nullopt;
    return load_panel_csv(p.string());
}

const Panel& prop99() {
    static const Panel panel = load_panel_csv((fs::path(data_dir()) / "prop99.csv").string());
    return panel;
}

std::string fmt_sci(double v) {
    std::ostringstream s;
    s.precision(2);
    s << std::scientific << v;
    return s.str();
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

PlaceboReport units_report(const Panel& panel, std::size_t horizon, const std::vector<EstimatorPtr>& est,
                           const RunOptions& options = {}) {
    const Panel shifted = shift_for_horizon(panel, horizon);
    return run_placebo(shifted, default_placebo_spec(shifted, PlaceboMode::pseudo_units, horizon), est, options);
}

EstimatorSettings profile_settings(Profile profile) {
    RunConfig c;
    apply_profile(c, profile);
    return c.settings;
}

// ---------------------------------------------------------------- criterion 1

Outcome twfe_units(const Panel& panel, double target_short, std::optional<double> target_long) {
    const auto start = std::chrono::steady_clock::now();
    const auto twfe = make_estimators({"twfe"});
    const double short_rmse = units_report(panel, 1, twfe).row("twfe").metrics.rmse;
    bool ok = within_rel(short_rmse, target_short, 0.02);
    std::string detail = "1-year RMSE " + fmt_num(short_rmse, 3) + " (target " + fmt_num(target_short, 3) + " +-2%)";
    if (target_long) {
        const double long_rmse = units_report(panel, 5, twfe).row("twfe").metrics.rmse;
        ok = ok && within_rel(long_rmse, *target_long, 0.02);
        detail += ", 5-year RMSE " + fmt_num(long_rmse, 3) + " (target " + fmt_num(*target_long, 3) + " +-2%)";
    }
    const double secs = seconds_since(start);
    ok = ok && secs < 60.0;
    return {ok ? Status::pass : Status::fail, detail + ", " + fmt_num(secs, 1) + " s"};
}

Outcome c1_prop99() { return twfe_units(prop99(), 14.420, 15.386); }

Outcome c1_germany() {
    const auto g = load_optional("germany.csv");
    if (!g) return {Status::skip, "data/germany.csv not available"};
    return twfe_units(*g, 2254.893, std::nullopt);
}

// ---------------------------------------------------------------- criterion 2

Outcome twfe_effect(const Panel& panel, double target, const std::string& unit) {
    const auto start = std::chrono::steady_clock::now();
    const auto app = run_application(panel, make_estimators({"twfe"}));
    const double effect = app.mean_effects.at(0);
    const bool ok = within_rel(effect, target, 0.03);
    return {ok ? Status::pass : Status::fail,
            "TWFE mean effect " + std::to_string(app.window[0]) + "-" + std::to_string(app.window[1]) + " " +
                fmt_num(effect, 3) + " " + unit + " (target " + fmt_num(target, 2) + " +-3%), " +
                fmt_num(seconds_since(start), 2) + " s"};
}

Outcome c2_prop99() { return twfe_effect(prop99(), -27.35, "packs"); }

Outcome c2_germany() {
    const auto g = load_optional("germany.csv");
    if (!g) return {Status::skip, "data/germany.csv not available"};
    return twfe_effect(*g, 604.0, "$/capita");
}

// ---------------------------------------------------------------- criterion 3

double sc_units_rmse() {
    static const double rmse = units_report(prop99(), 1, make_estimators({"sc"})).row("sc").metrics.rmse;
    return rmse;
}

Outcome c3() {
    const auto start = std::chrono::steady_clock::now();
    const double rmse = sc_units_rmse();
    const double secs = seconds_since(start);
    const bool ok = rmse >= 6.5 && rmse <= 9.5 && secs < 300.0;
    return {ok ? Status::pass : Status::fail,
            "SC (abadie_simplex) 1-year RMSE " + fmt_num(rmse, 3) + " in [6.5, 9.5], " + fmt_num(secs, 1) + " s"};
}

// ---------------------------------------------------------------- criteria 4 and 5, smoke

// Five units: y_it = 10 + a_i + b_i f_t + u_it with a random-walk common factor and
// unit-specific AR(1) deviations u_it = 0.9 u_i,t-1 + e_it. Loadings differ across units.
Panel factor_panel(std::uint64_t seed) {
    const Eigen::Index n = 5, t = 60;
    SplitMix64 rng(seed);
    Eigen::VectorXd f(t);
    f(0) = 0.0;
    for (Eigen::Index s = 1; s < t; ++s) f(s) = f(s - 1) + rng.normal();
    Eigen::MatrixXd y(n, t);
    const double loadings[] = {0.5, 0.8, 1.0, 1.3, 1.6};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = 3.0 * rng.normal();
        double u = 0.0;
        for (Eigen::Index s = 0; s < t; ++s) {
            u = 0.9 * u + 0.5 * rng.normal();
            y(i, s) = 10.0 + a + loadings[i] * f(s) + u;
        }
    }
    std::vector<std::string> units{"f0", "f1", "f2", "f3", "f4"};
    std::vector<int> times(static_cast<std::size_t>(t));
    for (std::size_t s = 0; s < times.size(); ++s) times[s] = static_cast<int>(s);
    return Panel(units, times, y, 4, 55);
}

constexpr std::size_t kSmokeReplicates = 10;
const std::vector<std::uint64_t> kSeeds{0, 1, 2};

// Pooled RMSE over replicate panels: per label, per horizon.
std::map<std::string, double> pooled_rmse(const std::vector<std::string>& names, std::size_t horizon,
                                          const EstimatorSettings& settings, const std::vector<Panel>& panels) {
    RunOptions options;
    options.seeds = kSeeds;
    std::map<std::string, std::vector<double>> errors;
    for (const auto& panel : panels) {
        const auto r = units_report(panel, horizon, make_estimators(names, settings), options);
        for (std::size_t l = 0; l < r.labels.size(); ++l) {
            for (const auto& it : r.results[l]) {
                if (it.failed) {
                    errors[r.labels[l]].push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                errors[r.labels[l]].insert(errors[r.labels[l]].end(), it.errors.begin(), it.errors.end());
            }
        }
    }
    std::map<std::string, double> rmse;
    for (const auto& [label, e] : errors) {
        double sq = 0.0;
        for (double v : e) sq += v * v;
        rmse[label] = std::sqrt(sq / static_cast<double>(e.size()));
    }
    // Median over seeds for stochastic estimators.
    for (const auto& name : names) {
        std::vector<double> per_seed;
        for (auto s : kSeeds) {
            const auto it = rmse.find(name + "@" + std::to_string(s));
            if (it != rmse.end()) per_seed.push_back(it->second);
        }
        if (!per_seed.empty()) rmse[name] = median(per_seed);
    }
    return rmse;
}

std::vector<Panel> smoke_panels() {
    std::vector<Panel> out;
    for (std::size_t r = 0; r < kSmokeReplicates; ++r) out.push_back(factor_panel(1000 + r));
    return out;
}

Outcome c4_smoke() {
    const auto start = std::chrono::steady_clock::now();
    const auto rmse = pooled_rmse({"synbeats", "sc", "twfe"}, 1, profile_settings(Profile::smoke), smoke_panels());
    const double secs = seconds_since(start);
    const bool ok = rmse.at("synbeats") < rmse.at("sc") && rmse.at("sc") < rmse.at("twfe") && secs < 120.0;
    return {ok ? Status::pass : Status::fail,
            "5-unit factor panels x" + std::to_string(kSmokeReplicates) + ", smoke profile, median of 3 seeds: SyNBEATS " +
                fmt_num(rmse.at("synbeats"), 3) + ", SC " + fmt_num(rmse.at("sc"), 3) + ", TWFE " +
                fmt_num(rmse.at("twfe"), 3) + " (want SyNBEATS < SC < TWFE), " + fmt_num(secs, 1) + " s"};
}

Outcome c5_smoke() {
    const auto start = std::chrono::steady_clock::now();
    const auto panels = smoke_panels();
    const auto settings = profile_settings(Profile::smoke);
    const auto s1 = pooled_rmse({"synbeats", "nbeats"}, 1, settings, panels);
    const auto s5 = pooled_rmse({"synbeats", "nbeats"}, 5, settings, panels);
    const bool ok = s1.at("nbeats") > s1.at("synbeats") && s5.at("nbeats") > s5.at("synbeats");
    return {ok ? Status::pass : Status::fail,
            "5-unit factor panels, median of 3 seeds: 1-year N-BEATS " + fmt_num(s1.at("nbeats"), 3) + " vs SyNBEATS " +
                fmt_num(s1.at("synbeats"), 3) + ", 5-year N-BEATS " + fmt_num(s5.at("nbeats"), 3) + " vs SyNBEATS " +
                fmt_num(s5.at("synbeats"), 3) + " (want N-BEATS higher at both), " + fmt_num(seconds_since(start), 1) + " s"};
}

// ---------------------------------------------------------------- criteria 4 and 5, full-size profile

bool full_runs_enabled() {
    const char* env = std::getenv("SYNBEATS_RUN_FULL");
    return env != nullptr && std::string(env) == "1";
}

double median_rmse(const PlaceboReport& r, const std::string& name) { return r.row(name).metrics.rmse; }

Outcome c4_full() {
    if (!full_runs_enabled()) return {Status::skip, "set SYNBEATS_RUN_FULL=1 to run (hours on one core)"};
    const auto start = std::chrono::steady_clock::now();
    RunOptions options;
    options.seeds = kSeeds;
    options.threads = 0;
    const auto r = units_report(prop99(), 1, make_estimators({"synbeats", "sc", "twfe"}, profile_settings(Profile::paper)),
                                options);
    const double syn = median_rmse(r, "synbeats");
    const double sc = median_rmse(r, "sc");
    const double twfe = median_rmse(r, "twfe");
    const bool ok = syn <= 6.0 && syn < sc && sc < twfe;
    return {ok ? Status::pass : Status::fail,
            "paper profile, median of 3 seeds: SyNBEATS " + fmt_num(syn, 3) + ", SC " + fmt_num(sc, 3) + ", TWFE " +
                fmt_num(twfe, 3) + " (want SyNBEATS <= 6.0 and SyNBEATS < SC < TWFE), " + fmt_num(seconds_since(start) / 60.0, 1) + " min"};
}

Outcome c5_full() {
    if (!full_runs_enabled()) return {Status::skip, "set SYNBEATS_RUN_FULL=1 to run (hours on one core)"};
    const auto start = std::chrono::steady_clock::now();
    RunOptions options;
    options.seeds = kSeeds;
    options.threads = 0;
    const auto est = make_estimators({"synbeats", "nbeats"}, profile_settings(Profile::paper));
    const auto r1 = units_report(prop99(), 1, est, options);
    const auto r5 = units_report(prop99(), 5, est, options);
    const bool ok = median_rmse(r1, "nbeats") > median_rmse(r1, "synbeats") &&
                    median_rmse(r5, "nbeats") > median_rmse(r5, "synbeats");
    return {ok ? Status::pass : Status::fail,
            "paper profile, median of 3 seeds: 1-year N-BEATS " + fmt_num(median_rmse(r1, "nbeats"), 3) + " vs SyNBEATS " +
                fmt_num(median_rmse(r1, "synbeats"), 3) + ", 5-year N-BEATS " + fmt_num(median_rmse(r5, "nbeats"), 3) +
                " vs SyNBEATS " + fmt_num(median_rmse(r5, "synbeats"), 3) + " (want N-BEATS higher at both), " +
                fmt_num(seconds_since(start) / 60.0, 1) + " min"};
}

// ---------------------------------------------------------------- criterion 6

// Controls are the treated series shifted by constants; the treated unit gets +delta after treatment.
double sdid_level_shift_error() {
    SplitMix64 rng(99);
    const Eigen::Index t = 16, t0 = 11;
    Eigen::RowVectorXd base(t);
    for (Eigen::Index s = 0; s < t; ++s) base(s) = 40.0 + 4.0 * rng.normal();
    const double delta = 6.5;
    Eigen::MatrixXd y(4, t);
    y.row(0) = base.array() + 12.0;
    y.row(1) = base.array() - 5.0;
    y.row(2) = base.array() + 0.75;
    y.row(3) = base;
    y.row(3).tail(t - t0).array() += delta;
    const Panel p({"a", "b", "c", "treated"}, std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}, y, 3,
                  static_cast<std::size_t>(t0));
    const SdidFit f = fit_sdid(mask_post_treatment(p));
    double worst = std::abs(f.pooled_effect - delta);
    for (Eigen::Index k = 0; k < f.per_period_effects.size(); ++k) {
        worst = std::max(worst, std::abs(f.per_period_effects(k) - delta));
    }
    return worst;
}

Outcome c6() {
    const auto start = std::chrono::steady_clock::now();
    const auto r = units_report(prop99(), 1, make_estimators({"sdid", "mc"}));
    const double sdid = r.row("sdid").metrics.rmse;
    const double mc = r.row("mc").metrics.rmse;
    const double shift = sdid_level_shift_error();
    const double secs = seconds_since(start);
    const bool sdid_ok = sdid >= 3.0 && sdid <= 4.8;
    const bool mc_ok = mc >= 5.5 && mc <= 9.5;
    const bool ok = sdid_ok && mc_ok && shift <= 1e-6 && secs < 600.0;
    return {ok ? Status::pass : Status::fail,
            "SDID 1-year RMSE " + fmt_num(sdid, 3) + (sdid_ok ? " in" : " NOT in") + " [3.0, 4.8], MC " + fmt_num(mc, 3) +
                (mc_ok ? " in" : " NOT in") + " [5.5, 9.5], level-shift error " + fmt_num(shift, 10) + " (<= 1e-6), " +
                fmt_num(secs, 1) + " s"};
}

// ---------------------------------------------------------------- criterion 7

struct Check {
    std::string name;
    bool ok;
    std::string value;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

Check gradient_check() {
    SplitMix64 rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t depth = 1 + rng.below(3);
        std::vector<std::size_t> w{1 + rng.below(8)};
        for (std::size_t l = 0; l < depth; ++l) w.push_back(1 + rng.below(8));
        std::vector<nn::DenseLayer> layers;
        for (std::size_t l = 0; l < depth; ++l) {
            layers.emplace_back(w[l], w[l + 1], l + 1 == depth ? nn::Activation::identity : nn::Activation::relu);
            nn::glorot_uniform(layers.back(), rng);
            for (Eigen::Index k = 0; k < layers.back().biases.size(); ++k) layers.back().biases(k) = 0.1 * rng.normal();
        }
        nn::Sequential net(std::move(layers));
        Eigen::MatrixXd x(static_cast<Eigen::Index>(w.front()), 3);
        for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = rng.normal();
        const auto loss = [&] { return 0.5 * net.forward(x).squaredNorm(); };
        nn::Tape tape;
        const Eigen::MatrixXd y = net.forward(x, tape);
        const auto g = net.backward(tape, y);
        const double h = 1e-5;
        for (int c = 0; c < 100; ++c) {
            const std::size_t l = rng.below(depth);
            auto& layer = net.layers()[l];
            const bool bias = rng.below(4) == 0;
            const auto k = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(bias ? layer.biases.size() : layer.weights.size())));
            double& p = bias ? layer.biases(k) : layer.weights.data()[k];
            const double analytic = bias ? g.layers[l].biases(k) : g.layers[l].weights.data()[k];
            const double saved = p;
            p = saved + h;
            const double up = loss();
            p = saved - h;
            const double down = loss();
            p = saved;
            worst = std::max(worst, rel_err(analytic, (up - down) / (2 * h)));
        }
    }
    return {"gradient finite differences", worst < 1e-4, "max rel err " + fmt_sci(worst)};
}

Check nbeats_gradient_check() {
    SplitMix64 rng(8);
    BlockConfig c;
    c.num_stacks = 3;
    c.layers_per_block = 3;
    c.layer_width = 8;
    c.input_dim = 5;
    ForecastModel m = make_model(c, 1, ForecastMode::synbeats, 4);
    Eigen::MatrixXd x(5, 6), y(1, 6);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = rng.normal();
    for (Eigen::Index k = 0; k < y.size(); ++k) y.data()[k] = rng.normal();
    std::vector<BlockGradient> g;
    (void)loss_and_gradient(m, x, y, g);
    const auto loss = [&] { return (nbeats_forward_batch(m, x) - y).squaredNorm() / 6.0; };
    double worst = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
        const std::size_t b = rng.below(m.blocks.size());
        const std::size_t part = rng.below(c.layers_per_block + 2);
        nn::DenseLayer& layer = part < c.layers_per_block ? m.blocks[b].trunk.layers()[part]
                                : part == c.layers_per_block ? m.blocks[b].forecast_head
                                                             : m.blocks[b].backcast_head;
        const nn::LayerGradient& lg = part < c.layers_per_block ? g[b].trunk[part]
                                      : part == c.layers_per_block ? g[b].forecast
                                                                   : g[b].backcast;
        const auto idx = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(layer.weights.size())));
        double& p = layer.weights.data()[idx];
        const double saved = p;
        p = saved + h;
        const double up = loss();
        p = saved - h;
        const double down = loss();
        p = saved;
        worst = std::max(worst, rel_err(lg.weights.data()[idx], (up - down) / (2 * h)));
    }
    return {"N-BEATS stack gradient finite differences", worst < 1e-4, "max rel err " + fmt_sci(worst)};
}

Check telescoping() {
    SplitMix64 rng(10);
    BlockConfig c = BlockConfig::paper();
    c.input_dim = 39;
    const ForecastModel m = make_model(c, 1, ForecastMode::synbeats, 12);
    Eigen::VectorXd x(39);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = rng.normal();
    const auto trace = nbeats_forward(m, x);
    Eigen::VectorXd backcasts = Eigen::VectorXd::Zero(39);
    double forecast = 0.0;
    for (std::size_t k = 0; k < m.blocks.size(); ++k) {
        Eigen::VectorXd h = trace.residuals[k];
        for (const auto& layer : m.blocks[k].trunk.layers()) h = nn::forward(layer, h);
        backcasts += nn::forward(m.blocks[k].backcast_head, h);
        forecast += nn::forward(m.blocks[k].forecast_head, h)(0);
    }
    const double tele = (trace.residuals.back() - (x - backcasts)).cwiseAbs().maxCoeff();
    const double add = std::abs(trace.forecast(0) - forecast);
    return {"N-BEATS telescoping and additivity", tele < 1e-12 && add < 1e-12,
            "residual err " + fmt_sci(tele) + ", forecast err " + fmt_sci(add)};
}

Check simplex_projection() {
    SplitMix64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Vector2d v(rng.uniform(-2, 3), rng.uniform(-2, 3));
        const Eigen::VectorXd p = project_to_simplex(v);
        double best = std::numeric_limits<double>::infinity();
        Eigen::Vector2d arg;
        for (int i = 0; i <= 10000; ++i) {
            const Eigen::Vector2d g(i * 1e-4, 1.0 - i * 1e-4);
            const double d = (g - v).squaredNorm();
            if (d < best) best = d, arg = g;
        }
        worst = std::max(worst, (p - arg).cwiseAbs().maxCoeff());
    }
    return {"simplex projection vs grid", worst < 1e-4, "max diff " + fmt_num(worst, 8)};
}

Check twfe_did() {
    Eigen::MatrixXd y(2, 2);
    y << 1, 2, 3, 5;
    const Panel p({"a", "b"}, {1, 2}, y, 1, 1);
    const TwfeFit f = fit_twfe(p);
    const double did = (y(1, 1) - y(1, 0)) - (y(0, 1) - y(0, 0));
    return {"TWFE vs 2x2 DID", f.treatment_effects(0) == did && f.counterfactual(0) == y(1, 1) - did,
            "tau " + fmt_num(f.treatment_effects(0), 12)};
}

Check mc_rank_one() {
    const Eigen::Vector4d u(1, 1.5, 2, 2.5);
    Eigen::VectorXd v(5);
    v << 2, 1, 3, 1.5, 2.5;
    const Eigen::MatrixXd y = u * v.transpose();
    BoolMatrix mask = BoolMatrix::Constant(4, 5, true);
    mask(3, 4) = false;
    McOptions o;
    o.fixed_effects = false;
    o.tolerance = 1e-14;
    o.max_iterations = 200000;
    const double top = svd_small(mask.select(y, 0.0)).sigma(0);
    Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(4, 5);
    McFit f;
    for (int k = 0; k <= 80; ++k) {
        f = fit_mc_fixed(y, mask, top * std::pow(1e-12 / top, k / 80.0), o, &warm);
        warm = f.low_rank;
    }
    const double oracle = y(3, 0) * y(0, 4) / y(0, 0);
    const double err = std::abs(f.completed()(3, 4) - oracle);
    return {"MC rank-1 imputation", err < 1e-8, "error " + fmt_sci(err)};
}

Check monotone_objectives() {
    const PanelView v = mask_post_treatment(prop99());
    McOptions o;
    o.record_history = true;
    o.tolerance = 1e-10;
    const auto grid = default_lambda_grid(v, o);
    const McFit mc = fit_mc_fixed(prop99().outcomes(), v.observed_mask(), grid[10], o);
    bool ok = mc.objective_history.size() > 2;
    for (std::size_t k = 1; k < mc.objective_history.size(); ++k) {
        ok = ok && mc.objective_history[k] <= mc.objective_history[k - 1] * (1 + 1e-10);
    }
    ScOptions so;
    so.record_history = true;
    const SCWeights sc = fit_sc(v, so);
    bool sc_ok = sc.objective_history.size() > 2;
    for (std::size_t k = 1; k < sc.objective_history.size(); ++k) {
        sc_ok = sc_ok && sc.objective_history[k] <= sc.objective_history[k - 1] * (1 + 1e-12);
    }
    return {"MC and SC objective monotonicity", ok && sc_ok,
            std::to_string(mc.objective_history.size()) + " MC and " + std::to_string(sc.objective_history.size()) +
                " SC iterations"};
}

Check metric_identities() {
    const Metrics m = compute_metrics(std::vector<double>{3, 4}, std::vector<double>{100, 100});
    const auto halves = best_shares({{1, 2, 3}, {1, 2, 3}});
    const auto mixed = best_shares({{1, 5, 2, 0.5}, {2, 1, 2, 0.7}, {3, 3, 2, 0.1}});
    const double sum = mixed[0] + mixed[1] + mixed[2];
    const bool ok = std::abs(m.rmse - std::sqrt(12.5)) < 1e-15 && std::abs(m.mape - 3.5) < 1e-12 && halves[0] == 0.5 && halves[1] == 0.5 &&
                    std::abs(sum - 1.0) < 1e-15;
    return {"metric and best-share identities", ok, "rmse " + fmt_num(m.rmse, 4) + ", mape " + fmt_num(m.mape, 4) + ", shares sum " + fmt_num(sum, 15)};
}

Check csv_round_trip() {
    std::ostringstream first;
    save_panel_csv(prop99(), first);
    std::istringstream in(first.str());
    std::ostringstream second;
    save_panel_csv(parse_panel_csv(in), second);
    return {"CSV round trip", first.str() == second.str(), std::to_string(first.str().size()) + " bytes"};
}

Outcome c7() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::function<Check()>> checks{gradient_check, nbeats_gradient_check, telescoping,
                                                     simplex_projection, twfe_did, mc_rank_one,
                                                     monotone_objectives, metric_identities, csv_round_trip};
    bool ok = true;
    std::string detail;
    for (const auto& run : checks) {
        const Check c = run();
        ok = ok && c.ok;
        std::cout << "    " << (c.ok ? "ok   " : "FAIL ") << c.name << ": " << c.value << "\n";
    }
    const double secs = seconds_since(start);
    ok = ok && secs < 60.0;
    return {ok ? Status::pass : Status::fail, std::to_string(checks.size()) + " property checks, " + fmt_num(secs, 1) + " s"};
}

// ---------------------------------------------------------------- criterion 8

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome c8() {
    const fs::path root = fs::temp_directory_path() / ("synbeats_acceptance_c8_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string data = (fs::path(data_dir()) / "prop99.csv").string();
    const std::vector<std::vector<std::string>> commands{
        {"placebo-units", "--data", data, "--estimators", "twfe,sc,sdid,horizontal,synbeats,nbeats", "--seeds", "0,1"},
        {"placebo-years", "--data", data, "--estimators", "twfe,sc,synbeats", "--horizon", "3", "--first-year", "1978"},
        {"compare", "--data", data, "--estimators", "sc,synbeats", "--first-year", "1980"},
        {"apply", "--data", data, "--estimators", "twfe,sc,synbeats"},
    };
    std::size_t same = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::string summaries[3];
        const std::string threads[3] = {"1", "1", "3"};
        for (int run = 0; run < 3; ++run) {
            const fs::path out = root / (std::to_string(c) + "_" + std::to_string(run));
            std::vector<std::string> args{"--out", out.string(), "--threads", threads[run]};
            args.insert(args.end(), commands[c].begin(), commands[c].end());
            std::ostringstream o, e;
            if (run_cli(args, o, e) != 0) return {Status::fail, "command failed: " + e.str()};
            summaries[run] = slurp(out / "summary.csv");
        }
        if (!summaries[0].empty() && summaries[0] == summaries[1] && summaries[0] == summaries[2]) ++same;
    }
    fs::remove_all(root);
    return {same == commands.size() ? Status::pass : Status::fail,
            std::to_string(same) + "/" + std::to_string(commands.size()) +
                " commands gave byte-identical summary.csv across repeated runs and --threads 1/3"};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
        {"c1_prop99", c1_prop99}, {"c1_germany", c1_germany}, {"c2_prop99", c2_prop99}, {"c2_germany", c2_germany},
        {"c3", c3},               {"c4_smoke", c4_smoke},     {"c4_full", c4_full},   {"c5_smoke", c5_smoke},
        {"c5_full", c5_full},   {"c6", c6},                 {"c7", c7},               {"c8", c8},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.empty()) {
        for (const auto& [name, fn] : all) wanted.push_back(name);
    }
    int failures = 0, passes = 0;
    for (const auto& name : wanted) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.first == name; });
        if (it == all.end()) {
            std::cerr << "unknown criterion '" << name << "'\n";
            return 2;
        }
        Outcome o;
        try {
            o = it->second();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("error: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        std::cout << tag << " " << name << ": " << o.detail << std::endl;
        if (o.status == Status::fail) ++failures;
        if (o.status == Status::pass) ++passes;
    }
    if (failures > 0) return 1;
    return passes == 0 ? 77 : 0;
}
