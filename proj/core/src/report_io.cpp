#include "synbeats/report_io.hpp"

#include "synbeats/csv.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cctype>
#include <ostream>

namespace synbeats {

void write_report_csv(const std::vector<EstimatorResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        if (r.failed) continue;
        for (std::size_t k = 0; k < r.periods.size(); ++k) {
            fmt::print(out, "{},{},{},{:.17g},{:.17g},{:.17g}\n", csv_field(r.estimator), csv_field(r.iteration_label),
                       r.periods[k], r.truths[k], r.predictions[k], r.errors[k]);
        }
    }
}

void write_report_csv(const PlaceboReport& report, std::ostream& out) {
    out << "estimator,iteration,period,truth,prediction,error\n";
    for (const auto& lane : report.results) write_report_csv(lane, out);
}

void write_summary_header(std::ostream& out) {
    out << "exercise,estimator,horizon,rmse,mape,best_share,iterations,failures\n";
}

void write_summary_rows(const PlaceboReport& report, const std::string& exercise, std::ostream& out) {
    for (const auto& s : report.summary) {
        fmt::print(out, "{},{},{},{:.17g},{:.17g},{:.17g},{},{}\n", csv_field(exercise), csv_field(s.estimator),
                   s.horizon, s.metrics.rmse, s.metrics.mape, s.best_share, s.iterations, s.failures);
    }
}

void write_application_summary(const ApplicationResult& result, std::ostream& out) {
    out << "estimator,window_start,window_end,mean_effect\n";
    for (std::size_t l = 0; l < result.labels.size(); ++l) {
        fmt::print(out, "{},{},{},{:.17g}\n", csv_field(result.labels[l]), result.window.at(0), result.window.at(1),
                   result.mean_effects[l]);
    }
}

void write_series_csv(const std::vector<EstimatorResult>& results, std::ostream& out) {
    out << "iteration,time,observed,predicted\n";
    for (const auto& r : results) {
        const std::size_t first_pred = r.observed_times.size() - r.periods.size();
        for (std::size_t k = 0; k < r.observed_times.size(); ++k) {
            fmt::print(out, "{},{},{:.17g},", csv_field(r.iteration_label), r.observed_times[k], r.observed_path[k]);
            if (k >= first_pred && !r.failed) fmt::print(out, "{:.17g}", r.predictions[k - first_pred]);
            out << '\n';
        }
    }
}

void print_summary_table(const PlaceboReport& report, const std::string& title, std::ostream& out) {
    fmt::print(out, "{} (horizon {})\n", title, report.horizon);
    fmt::print(out, "  {:<22} {:>12} {:>12} {:>10} {:>6}\n", "estimator", "rmse", "mape", "best", "fail");
    for (const auto& s : report.summary) {
        fmt::print(out, "  {:<22} {:>12.6g} {:>12.6g} {:>10.6g} {:>6}\n", s.estimator + (s.median_of_seeds ? " (median)" : ""),
                   s.metrics.rmse, s.metrics.mape, s.best_share, s.failures);
    }
    for (const auto& w : report.warnings) fmt::print(out, "  warning: {}\n", w);
}

void print_application_table(const ApplicationResult& result, std::ostream& out) {
    fmt::print(out, "mean effect {}-{}\n", result.window.at(0), result.window.at(1));
    for (std::size_t l = 0; l < result.labels.size(); ++l) {
        fmt::print(out, "  {:<22} {:>12.6g}\n", result.labels[l], result.mean_effects[l]);
    }
    for (const auto& w : result.warnings) fmt::print(out, "  warning: {}\n", w);
}

std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    return out;
}

} // namespace synbeats
