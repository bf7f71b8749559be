#pragma once

#include "synbeats/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace synbeats {

/// Long format, header `estimator,iteration,period,truth,prediction,error`, 17 significant digits.
void write_report_csv(const std::vector<EstimatorResult>& results, std::ostream& out);
void write_report_csv(const PlaceboReport& report, std::ostream& out);

/// Header `exercise,estimator,horizon,rmse,mape,best_share,iterations,failures`, 17 significant digits.
void write_summary_header(std::ostream& out);
void write_summary_rows(const PlaceboReport& report, const std::string& exercise, std::ostream& out);

/// Header `estimator,window_start,window_end,mean_effect`.
void write_application_summary(const ApplicationResult& result, std::ostream& out);

/// Header `iteration,time,observed,predicted`; predicted is empty before treatment.
void write_series_csv(const std::vector<EstimatorResult>& results, std::ostream& out);

/// Fixed-width table with 6 significant digits for the console.
void print_summary_table(const PlaceboReport& report, const std::string& title, std::ostream& out);
void print_application_table(const ApplicationResult& result, std::ostream& out);

/// Makes an estimator label safe for a file name.
[[nodiscard]] std::string file_stem(const std::string& label);

} // namespace synbeats
