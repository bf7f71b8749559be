#include "synbeats/harness.hpp"

#include "synbeats/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace synbeats {

const EstimatorSummary& PlaceboReport::row(const std::string& label) const {
    for (const auto& s : summary) {
        if (s.estimator == label) return s;
    }
    throw std::out_of_range("no summary row '" + label + "'");
}

namespace {

struct Lane {
    std::string label;
    EstimatorPtr estimator;
    std::uint64_t base_seed = 0;
    std::size_t round = 0;  // seed index; deterministic lanes compete in every round
    bool per_round = false; // true for stochastic lanes
    std::string base_name;
};

std::vector<Lane> make_lanes(const std::vector<EstimatorPtr>& estimators, const RunOptions& options) {
    if (estimators.empty()) throw std::invalid_argument("no estimators requested");
    if (options.seeds.empty()) throw std::invalid_argument("at least one seed is required");
    std::vector<Lane> lanes;
    for (const auto& e : estimators) {
        if (!e->stochastic()) {
            lanes.push_back({e->name(), e, options.seeds.front(), 0, false, e->name()});
            continue;
        }
        for (std::size_t k = 0; k < options.seeds.size(); ++k) {
            const std::string label =
                options.seeds.size() > 1 ? fmt::format("{}@{}", e->name(), options.seeds[k]) : e->name();
            lanes.push_back({label, e, options.seeds[k], k, true, e->name()});
        }
    }
    for (std::size_t a = 0; a < lanes.size(); ++a) {
        for (std::size_t b = a + 1; b < lanes.size(); ++b) {
            if (lanes[a].label == lanes[b].label) throw std::invalid_argument("estimator '" + lanes[a].label + "' listed twice");
        }
    }
    return lanes;
}

template <typename Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

EstimatorResult run_one(const Lane& lane, const Panel& panel, std::size_t id, std::string iteration_label) {
    EstimatorResult r;
    r.estimator = lane.label;
    r.iteration = id;
    r.iteration_label = std::move(iteration_label);
    r.seed = derive_seed(lane.base_seed, id);
    const std::size_t t0 = panel.pre_periods();
    const std::size_t treated = panel.treated_unit();
    for (std::size_t c = 0; c < panel.num_periods(); ++c) {
        r.observed_times.push_back(panel.times()[c]);
        r.observed_path.push_back(panel.at(treated, c));
    }
    for (std::size_t c = t0; c < panel.num_periods(); ++c) {
        r.periods.push_back(panel.times()[c]);
        r.truths.push_back(panel.at(treated, c));
    }
    const auto start = std::chrono::steady_clock::now();
    try {
        r.predictions = lane.estimator->predict(panel, r.seed);
        if (r.predictions.size() != r.truths.size()) {
            throw std::runtime_error(fmt::format("returned {} predictions for {} periods", r.predictions.size(),
                                                 r.truths.size()));
        }
        for (double p : r.predictions) {
            if (!std::isfinite(p)) throw std::runtime_error("returned a non-finite prediction");
        }
        for (std::size_t k = 0; k < r.truths.size(); ++k) {
            r.errors.push_back(r.truths[k] - r.predictions[k]);
            r.effects.push_back(r.truths[k] - r.predictions[k]);
        }
    } catch (const std::exception& e) {
        r.failed = true;
        r.failure = e.what();
        r.predictions.clear();
        r.errors.clear();
        r.effects.clear();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double mean_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s / static_cast<double>(v.size());
}

void summarize(PlaceboReport& report, const std::vector<Lane>& lanes, std::size_t rounds) {
    const std::size_t iterations = report.results.empty() ? 0 : report.results.front().size();
    std::vector<double> shares(lanes.size(), 0.0);
    for (std::size_t round = 0; round < rounds; ++round) {
        std::vector<std::size_t> members;
        std::vector<std::vector<double>> scores;
        for (std::size_t l = 0; l < lanes.size(); ++l) {
            if (lanes[l].per_round && lanes[l].round != round) continue;
            members.push_back(l);
            std::vector<double> s(iterations);
            for (std::size_t i = 0; i < iterations; ++i) {
                const auto& r = report.results[l][i];
                s[i] = r.failed ? std::numeric_limits<double>::quiet_NaN() : mean_abs(r.errors);
            }
            scores.push_back(std::move(s));
        }
        const auto round_shares = best_shares(scores);
        for (std::size_t m = 0; m < members.size(); ++m) {
            const auto& lane = lanes[members[m]];
            shares[members[m]] += lane.per_round ? round_shares[m] : round_shares[m] / static_cast<double>(rounds);
        }
    }

    for (std::size_t l = 0; l < lanes.size(); ++l) {
        EstimatorSummary s;
        s.estimator = lanes[l].label;
        s.horizon = report.horizon;
        s.best_share = shares[l];
        std::vector<double> errors;
        std::vector<double> truths;
        for (const auto& r : report.results[l]) {
            ++s.iterations;
            if (r.failed) {
                ++s.failures;
                report.warnings.push_back(fmt::format("{} failed on iteration {}: {}", r.estimator,
                                                      r.iteration_label, r.failure));
                continue;
            }
            errors.insert(errors.end(), r.errors.begin(), r.errors.end());
            truths.insert(truths.end(), r.truths.begin(), r.truths.end());
        }
        if (errors.empty()) {
            s.metrics.rmse = std::numeric_limits<double>::quiet_NaN();
            s.metrics.mape = std::numeric_limits<double>::quiet_NaN();
        } else {
            try {
                s.metrics = compute_metrics(errors, truths);
            } catch (const std::invalid_argument&) {
                double sq = 0.0;
                for (double e : errors) sq += e * e;
                s.metrics.rmse = std::sqrt(sq / static_cast<double>(errors.size()));
                s.metrics.mape = std::numeric_limits<double>::quiet_NaN();
                s.metrics.count = errors.size();
                s.metrics.zero_truths = truths.size();
            }
        }
        if (s.metrics.zero_truths > 0) {
            report.warnings.push_back(fmt::format("{}: {} zero-truth periods left out of MAPE", s.estimator,
                                                  s.metrics.zero_truths));
        }
        report.summary.push_back(s);
    }

    if (rounds <= 1) return;
    std::vector<std::string> done;
    for (std::size_t l = 0; l < lanes.size(); ++l) {
        if (!lanes[l].per_round) continue;
        const std::string& name = lanes[l].base_name;
        if (std::find(done.begin(), done.end(), name) != done.end()) continue;
        done.push_back(name);
        std::vector<double> rmse, mape, best;
        EstimatorSummary s;
        s.estimator = name;
        s.horizon = report.horizon;
        s.median_of_seeds = true;
        for (std::size_t m = 0; m < lanes.size(); ++m) {
            if (!lanes[m].per_round || lanes[m].base_name != name) continue;
            const auto& row = report.summary[m];
            rmse.push_back(row.metrics.rmse);
            mape.push_back(row.metrics.mape);
            best.push_back(row.best_share);
            s.iterations += row.iterations;
            s.failures += row.failures;
            s.metrics.count = row.metrics.count;
            s.metrics.zero_truths = row.metrics.zero_truths;
        }
        s.metrics.rmse = median(rmse);
        s.metrics.mape = median(mape);
        s.best_share = median(best);
        report.summary.push_back(s);
    }
}

} // namespace

PlaceboReport run_iterations(const std::vector<Panel>& panels, const std::vector<std::size_t>& ids, std::size_t horizon,
                             const std::vector<EstimatorPtr>& estimators, const RunOptions& options,
                             const std::string& mode) {
    if (panels.size() != ids.size()) throw std::invalid_argument("one iteration id per panel is required");
    if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
    const auto lanes = make_lanes(estimators, options);

    std::vector<Panel> cut;
    std::vector<std::string> iteration_labels;
    cut.reserve(panels.size());
    for (const auto& p : panels) {
        const std::size_t end = p.treatment_start() + horizon;
        if (end > p.num_periods()) {
            throw std::invalid_argument(fmt::format("horizon {} runs past the end of the panel for treated unit {}",
                                                    horizon, p.units()[p.treated_unit()]));
        }
        cut.push_back(p.truncated(end));
        if (mode == "pseudo_years") {
            iteration_labels.push_back(std::to_string(p.times()[p.treatment_start()]));
        } else {
            iteration_labels.push_back(p.units()[p.treated_unit()]);
        }
    }

    PlaceboReport report;
    report.mode = mode;
    report.horizon = horizon;
    for (const auto& lane : lanes) report.labels.push_back(lane.label);
    report.results.assign(lanes.size(), std::vector<EstimatorResult>(cut.size()));

    const std::size_t tasks = lanes.size() * cut.size();
    parallel_for(tasks, options.threads, [&](std::size_t task) {
        const std::size_t l = task / cut.size();
        const std::size_t i = task % cut.size();
        report.results[l][i] = run_one(lanes[l], cut[i], ids[i], iteration_labels[i]);
    });

    bool any_stochastic = false;
    for (const auto& lane : lanes) any_stochastic = any_stochastic || lane.per_round;
    summarize(report, lanes, any_stochastic ? options.seeds.size() : 1);
    return report;
}

PlaceboReport run_placebo(const Panel& panel, const PlaceboSpec& spec, const std::vector<EstimatorPtr>& estimators,
                          const RunOptions& options) {
    const auto panels = make_placebo_panels(panel, spec);
    return run_iterations(panels, spec.iteration_ids, spec.horizon, estimators, options, std::string(to_string(spec.mode)));
}

PlaceboReport run_event_study(const std::vector<Panel>& events, std::size_t horizon,
                              const std::vector<EstimatorPtr>& estimators, const RunOptions& options) {
    std::vector<std::size_t> ids(events.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return run_iterations(events, ids, horizon, estimators, options, "events");
}

ApplicationResult run_application(const Panel& panel, const std::vector<EstimatorPtr>& estimators,
                                  const RunOptions& options, std::optional<std::size_t> window_periods) {
    if (panel.post_periods() == 0) throw std::invalid_argument("the panel has no post-treatment periods");
    const std::size_t window = window_periods.value_or(panel.post_periods());
    if (window == 0 || window > panel.post_periods()) {
        throw std::invalid_argument(fmt::format("averaging window of {} periods does not fit the {} post-periods",
                                                window, panel.post_periods()));
    }
    const auto lanes = make_lanes(estimators, options);
    ApplicationResult out;
    out.results.resize(lanes.size());
    parallel_for(lanes.size(), options.threads, [&](std::size_t l) {
        out.results[l] = run_one(lanes[l], panel, panel.treated_unit(), panel.units()[panel.treated_unit()]);
    });
    out.window = {panel.times()[panel.treatment_start()], panel.times()[panel.treatment_start() + window - 1]};
    for (std::size_t l = 0; l < lanes.size(); ++l) {
        out.labels.push_back(lanes[l].label);
        const auto& r = out.results[l];
        if (r.failed) {
            out.warnings.push_back(fmt::format("{} failed: {}", r.estimator, r.failure));
            out.mean_effects.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double s = 0.0;
        for (std::size_t k = 0; k < window; ++k) s += r.effects[k];
        out.mean_effects.push_back(s / static_cast<double>(window));
    }
    return out;
}

Panel shift_for_horizon(const Panel& panel, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
    if (panel.treatment_start() < horizon - 1) throw std::invalid_argument("horizon longer than the pre-period");
    return panel.with_treatment(panel.treated_unit(), panel.treatment_start() - (horizon - 1));
}

std::vector<CompareColumn> compare_modern(const Panel& panel, const std::vector<EstimatorPtr>& estimators,
                                          const RunOptions& options, const CompareOptions& compare) {
    std::size_t first = 0;
    if (compare.first_year) first = panel.period_index(*compare.first_year);
    std::vector<CompareColumn> out;
    for (const auto& [name, horizon] : {std::pair{"units_short", compare.short_horizon},
                                        std::pair{"units_long", compare.long_horizon}}) {
        const Panel shifted = shift_for_horizon(panel, horizon);
        const auto spec = default_placebo_spec(shifted, PlaceboMode::pseudo_units, horizon, compare.n_lag);
        out.push_back({name, run_placebo(shifted, spec, estimators, options)});
    }
    for (const auto& [name, horizon] : {std::pair{"years_short", compare.short_horizon},
                                        std::pair{"years_long", compare.long_horizon}}) {
        const auto spec = default_placebo_spec(panel, PlaceboMode::pseudo_years, horizon, compare.n_lag, first);
        out.push_back({name, run_placebo(panel, spec, estimators, options)});
    }
    return out;
}

} // namespace synbeats
