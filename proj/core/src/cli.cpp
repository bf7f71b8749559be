#include "synbeats/cli.hpp"

#include "synbeats/config.hpp"
#include "synbeats/csv.hpp"
#include "synbeats/harness.hpp"
#include "synbeats/nbeats.hpp"
#include "synbeats/report_io.hpp"
#include "synbeats/stocks.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace synbeats {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config_path;
    std::optional<std::string> data;
    std::optional<std::string> estimators;
    std::optional<std::string> output;
    std::optional<std::size_t> threads;
    std::optional<std::string> profile;
    std::optional<std::string> seeds;
    std::optional<std::size_t> horizon;
    std::optional<int> first_year;
    std::optional<std::size_t> window;
    std::optional<std::string> treated_unit;
    std::optional<int> treatment_start;
    std::optional<std::string> events;
    std::vector<std::string> overrides;

    std::string estimator = "synbeats";
    std::string model_out;
    std::size_t short_horizon = 1;
    std::size_t long_horizon = 5;

    std::size_t stock_events = 100;
    std::uint64_t stock_seed = 0;
    std::size_t stock_peers = 8;
    std::size_t stock_pre_days = 250;
    std::size_t stock_post_days = 1;
    std::string stock_file;
};

RunConfig resolve(const Flags& f) {
    RunConfig c;
    if (!f.config_path.empty()) load_config(f.config_path, c);
    if (const char* env = std::getenv("SYNBEATS_OUTPUT_DIR"); env != nullptr && *env != '\0') c.output = env;
    if (f.profile) apply_setting(c, "run", "profile", *f.profile);
    for (const auto& o : f.overrides) {
        const auto eq = o.find('=');
        const auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw std::invalid_argument("--set expects section.key=value, got '" + o + "'");
        }
        apply_setting(c, o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
    }
    if (f.data) c.data = *f.data;
    if (f.events) c.events = *f.events;
    if (f.estimators) apply_setting(c, "run", "estimators", *f.estimators);
    if (f.output) c.output = *f.output;
    if (f.threads) c.threads = *f.threads;
    if (f.seeds) apply_setting(c, "run", "seeds", *f.seeds);
    if (f.horizon) {
        if (*f.horizon == 0) throw std::invalid_argument("--horizon must be at least 1");
        c.horizon = *f.horizon;
    }
    if (f.first_year) c.first_year = f.first_year;
    if (f.window) c.window = f.window;
    if (f.treated_unit) c.treated_unit = f.treated_unit;
    if (f.treatment_start) c.treatment_start = f.treatment_start;
    return c;
}

Panel load_data(const RunConfig& c) {
    if (c.data.empty()) throw std::invalid_argument("no data file given (use --data or [run] data)");
    return load_panel_csv(c.data, {c.treated_unit, c.treatment_start});
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
    const fs::path p = fs::path(c.output) / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    return out;
}

void prepare_output(const RunConfig& c) {
    fs::create_directories(c.output);
    auto out = open_out(c, "effective_config.ini");
    write_config(c, out);
}

void write_series(const RunConfig& c, const std::vector<std::string>& labels,
                  const std::vector<std::vector<EstimatorResult>>& results) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
        auto out = open_out(c, "series_" + file_stem(labels[l]) + ".csv");
        write_series_csv(results[l], out);
    }
}

void write_placebo(const RunConfig& c, const PlaceboReport& report, std::ostream& console) {
    {
        auto out = open_out(c, "report.csv");
        write_report_csv(report, out);
    }
    {
        auto out = open_out(c, "summary.csv");
        write_summary_header(out);
        write_summary_rows(report, report.mode, out);
    }
    write_series(c, report.labels, report.results);
    print_summary_table(report, report.mode, console);
}

int cmd_placebo(const RunConfig& c, PlaceboMode mode, std::ostream& console) {
    const Panel panel = load_data(c);
    prepare_output(c);
    const auto estimators = make_estimators(c.estimators, c.settings);
    const RunOptions run{c.threads, c.seeds};
    const std::size_t n_lag = c.settings.synbeats.n_lag;
    PlaceboReport report;
    if (mode == PlaceboMode::pseudo_units) {
        const Panel shifted = shift_for_horizon(panel, c.horizon);
        report = run_placebo(shifted, default_placebo_spec(shifted, mode, c.horizon, n_lag), estimators, run);
    } else {
        const std::size_t first = c.first_year ? panel.period_index(*c.first_year) : 0;
        report = run_placebo(panel, default_placebo_spec(panel, mode, c.horizon, n_lag, first), estimators, run);
    }
    write_placebo(c, report, console);
    return 0;
}

int cmd_apply(const RunConfig& c, std::ostream& console) {
    const Panel panel = load_data(c);
    prepare_output(c);
    const auto estimators = make_estimators(c.estimators, c.settings);
    const auto result = run_application(panel, estimators, {c.threads, c.seeds}, c.window);
    {
        auto out = open_out(c, "report.csv");
        out << "estimator,iteration,period,truth,prediction,error\n";
        write_report_csv(result.results, out);
    }
    {
        auto out = open_out(c, "summary.csv");
        write_application_summary(result, out);
    }
    for (std::size_t l = 0; l < result.labels.size(); ++l) {
        auto out = open_out(c, "series_" + file_stem(result.labels[l]) + ".csv");
        write_series_csv({result.results[l]}, out);
    }
    print_application_table(result, console);
    return 0;
}

int cmd_fit(const RunConfig& c, const Flags& f, std::ostream& console) {
    const Panel panel = load_data(c);
    prepare_output(c);
    FitOptions options;
    if (f.estimator == "synbeats") {
        options = c.settings.synbeats;
        options.mode = ForecastMode::synbeats;
    } else if (f.estimator == "nbeats") {
        options = c.settings.nbeats;
        options.mode = ForecastMode::nbeats_only;
    } else {
        throw std::invalid_argument("fit trains a neural model; --estimator must be synbeats or nbeats");
    }
    options.seed = c.seeds.front();
    const PanelView view = mask_post_treatment(panel);
    const ForecastModel model = fit(view, options);
    const std::size_t horizon = f.horizon ? *f.horizon : panel.post_periods();
    const auto predictions = predict_counterfactual(model, view, horizon);
    const std::string model_path =
        f.model_out.empty() ? (fs::path(c.output) / (f.estimator + ".model")).string() : f.model_out;
    save_model(model, model_path);

    EstimatorResult r;
    r.estimator = f.estimator;
    r.iteration = panel.treated_unit();
    r.iteration_label = panel.units()[panel.treated_unit()];
    r.seed = options.seed;
    for (std::size_t t = 0; t < panel.num_periods(); ++t) {
        r.observed_times.push_back(panel.times()[t]);
        r.observed_path.push_back(panel.at(panel.treated_unit(), t));
    }
    for (std::size_t h = 0; h < horizon; ++h) {
        const std::size_t t = panel.treatment_start() + h;
        r.periods.push_back(panel.times()[t]);
        r.truths.push_back(panel.at(panel.treated_unit(), t));
        r.predictions.push_back(predictions[h]);
        r.errors.push_back(r.truths.back() - predictions[h]);
        r.effects.push_back(r.errors.back());
    }
    // The series file covers the observed path up to the last predicted period.
    EstimatorResult series = r;
    series.observed_times.resize(panel.treatment_start() + horizon);
    series.observed_path.resize(panel.treatment_start() + horizon);
    {
        auto out = open_out(c, "report.csv");
        out << "estimator,iteration,period,truth,prediction,error\n";
        write_report_csv({r}, out);
    }
    {
        auto out = open_out(c, "series_" + file_stem(f.estimator) + ".csv");
        write_series_csv({series}, out);
    }
    fmt::print(console, "{} fit on {} windows, final loss {:.6g}; model saved to {}\n", f.estimator,
               panel.pre_periods() - options.n_lag, model.final_loss, model_path);
    for (std::size_t h = 0; h < horizon; ++h) {
        fmt::print(console, "  {} observed {:>12.6g} predicted {:>12.6g}\n", r.periods[h], r.truths[h], r.predictions[h]);
    }
    return 0;
}

int cmd_compare(const RunConfig& c, const Flags& f, std::ostream& console) {
    const Panel panel = load_data(c);
    prepare_output(c);
    const auto estimators = make_estimators(c.estimators, c.settings);
    const RunOptions run{c.threads, c.seeds};
    CompareOptions compare;
    compare.short_horizon = f.short_horizon;
    compare.long_horizon = f.long_horizon;
    compare.first_year = c.first_year;
    compare.n_lag = c.settings.synbeats.n_lag;
    auto columns = compare_modern(panel, estimators, run, compare);
    if (!c.events.empty()) {
        const auto events = load_event_panels_csv(c.events);
        columns.push_back({"events", run_event_study(events, 1, estimators, run)});
    }
    auto summary = open_out(c, "summary.csv");
    write_summary_header(summary);
    for (const auto& col : columns) {
        write_summary_rows(col.report, col.name, summary);
        auto report = open_out(c, "report_" + col.name + ".csv");
        write_report_csv(col.report, report);
        print_summary_table(col.report, col.name, console);
    }
    return 0;
}

int cmd_gen_stocks(const RunConfig& c, const Flags& f, std::ostream& console) {
    StockOptions o;
    o.events = f.stock_events;
    o.seed = f.stock_seed;
    o.peers = f.stock_peers;
    o.pre_days = f.stock_pre_days;
    o.post_days = f.stock_post_days;
    const auto events = generate_stock_events(o);
    std::string path = f.stock_file;
    if (path.empty()) {
        fs::create_directories(c.output);
        path = (fs::path(c.output) / "stocks.csv").string();
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    save_event_panels_csv(events, out);
    fmt::print(console, "wrote {} events ({} firms, {} pre-event days each) to {}\n", events.size(), o.peers + 1,
               o.pre_days, path);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Panel-data counterfactual estimation and placebo evaluation", "synbeats"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config_path, "INI-style configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", f.output, "Output directory (default: out, or $SYNBEATS_OUTPUT_DIR)");
    app.add_option("--threads", f.threads, "Worker threads for placebo iterations (0 = all cores)");
    app.add_option("--profile", f.profile, "Network size: smoke or paper");
    app.add_option("--seeds", f.seeds, "Comma-separated base seeds for neural estimators");
    app.add_option("--set", f.overrides, "Override one setting, e.g. --set synbeats.epochs=200");
    app.add_option("--treated-unit", f.treated_unit, "Treated unit name when the CSV has no treated column");
    app.add_option("--treatment-start", f.treatment_start, "First treated period when the CSV has no treated column");

    auto* fit_cmd = app.add_subcommand("fit", "Train one neural model on the real treatment and predict");
    fit_cmd->add_option("--data", f.data, "Panel CSV");
    fit_cmd->add_option("--estimator", f.estimator, "synbeats or nbeats");
    fit_cmd->add_option("--horizon", f.horizon, "Periods to predict (default: all post-periods)");
    fit_cmd->add_option("--model-out", f.model_out, "Where to save the model");

    auto* units_cmd = app.add_subcommand("placebo-units", "Each control in turn as the pseudo-treated unit");
    auto* years_cmd = app.add_subcommand("placebo-years", "Pseudo treatment dates inside the pre-period");
    for (auto* cmd : {units_cmd, years_cmd}) {
        cmd->add_option("--data", f.data, "Panel CSV");
        cmd->add_option("--estimators", f.estimators, "Comma-separated estimator names");
        cmd->add_option("--horizon", f.horizon, "Periods predicted per iteration");
    }
    years_cmd->add_option("--first-year", f.first_year, "Earliest pseudo treatment period");

    auto* apply_cmd = app.add_subcommand("apply", "Estimate effects of the real treatment");
    apply_cmd->add_option("--data", f.data, "Panel CSV");
    apply_cmd->add_option("--estimators", f.estimators, "Comma-separated estimator names");
    apply_cmd->add_option("--window", f.window, "Average effects over the first N post-periods (default: all)");

    auto* compare_cmd = app.add_subcommand("compare", "Units/years by short/long placebo grid");
    compare_cmd->add_option("--data", f.data, "Panel CSV");
    compare_cmd->add_option("--estimators", f.estimators, "Comma-separated estimator names");
    compare_cmd->add_option("--first-year", f.first_year, "Earliest pseudo treatment period for the year exercises");
    compare_cmd->add_option("--short", f.short_horizon, "Short horizon")->check(CLI::PositiveNumber);
    compare_cmd->add_option("--long", f.long_horizon, "Long horizon")->check(CLI::PositiveNumber);
    compare_cmd->add_option("--events", f.events, "Event panels CSV for an extra one-day event column");

    auto* stocks_cmd = app.add_subcommand("gen-stocks", "Write synthetic daily-return event panels");
    stocks_cmd->add_option("--events", f.stock_events, "Number of events");
    stocks_cmd->add_option("--seed", f.stock_seed, "Generator seed");
    stocks_cmd->add_option("--peers", f.stock_peers, "Peer firms per event (at least 8)");
    stocks_cmd->add_option("--pre-days", f.stock_pre_days, "Trading days before each event");
    stocks_cmd->add_option("--post-days", f.stock_post_days, "Trading days from the event on");
    stocks_cmd->add_option("--file", f.stock_file, "Output CSV (default: <out>/stocks.csv)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        const RunConfig c = resolve(f);
        if (fit_cmd->parsed()) return cmd_fit(c, f, out);
        if (units_cmd->parsed()) return cmd_placebo(c, PlaceboMode::pseudo_units, out);
        if (years_cmd->parsed()) return cmd_placebo(c, PlaceboMode::pseudo_years, out);
        if (apply_cmd->parsed()) return cmd_apply(c, out);
        if (compare_cmd->parsed()) return cmd_compare(c, f, out);
        if (stocks_cmd->parsed()) return cmd_gen_stocks(c, f, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace synbeats
