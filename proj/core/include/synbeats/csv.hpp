#pragma once

#include "synbeats/panel.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synbeats {

/// Explicit treatment designation; overrides a `treated` column when set.
struct TreatmentOverride {
    std::optional<std::string> treated_unit;
    std::optional<int> treatment_start; // time label
};

/**
 * @brief Reads a long-format panel: header `unit,time,outcome[,treated]`.
 *
 * Columns are matched by name. Units keep their order of first appearance
 * and periods are sorted. Every (unit, time) pair must appear exactly once.
 * Errors name the offending line.
 */
[[nodiscard]] Panel load_panel_csv(const std::string& path, const TreatmentOverride& treatment = {});
[[nodiscard]] Panel parse_panel_csv(std::istream& in, const TreatmentOverride& treatment = {},
                                    std::string_view source = "<input>");

/// Writes `unit,time,outcome,treated` with 17 significant digits.
void save_panel_csv(const Panel& panel, std::ostream& out);
void save_panel_csv(const Panel& panel, const std::string& path);

/// Event panels: header `event,unit,time,outcome,treated`, one treated unit per event.
[[nodiscard]] std::vector<Panel> load_event_panels_csv(const std::string& path);
[[nodiscard]] std::vector<Panel> parse_event_panels_csv(std::istream& in, std::string_view source = "<input>");
void save_event_panels_csv(const std::vector<Panel>& events, std::ostream& out);

/// Splits one CSV record, honoring double quotes.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);
/// Quotes a field when it contains a comma, quote or newline.
[[nodiscard]] std::string csv_field(std::string_view text);

} // namespace synbeats
