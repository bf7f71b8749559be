#include "synbeats/csv.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace synbeats {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Row {
    std::string event;
    std::string unit;
    int time = 0;
    double outcome = 0.0;
    std::optional<int> treated;
    std::size_t line = 0;
};

double parse_double(const std::string& text, std::string_view source, std::size_t line, std::string_view column) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw std::invalid_argument(fmt::format("{}:{}: {} '{}' is not a number", source, line, column, text));
    }
    return v;
}

int parse_int(const std::string& text, std::string_view source, std::size_t line, std::string_view column) {
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw std::invalid_argument(fmt::format("{}:{}: {} '{}' is not an integer", source, line, column, text));
    }
    return v;
}

std::vector<Row> read_rows(std::istream& in, std::string_view source, bool need_event) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw std::invalid_argument(fmt::format("{}: empty file", source));
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (!col.emplace(name, i).second) {
            throw std::invalid_argument(fmt::format("{}:{}: duplicate column '{}'", source, lineno, name));
        }
    }
    std::vector<std::string> required{"unit", "time", "outcome"};
    if (need_event) required.insert(required.begin(), "event");
    for (const auto& r : required) {
        if (!col.contains(r)) throw std::invalid_argument(fmt::format("{}:{}: header lacks a '{}' column", source, lineno, r));
    }
    const bool has_treated = col.contains("treated");

    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        try {
            f = split_csv_line(line);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("{}:{}: {}", source, lineno, e.what()));
        }
        if (f.size() != header.size()) {
            throw std::invalid_argument(
                fmt::format("{}:{}: expected {} fields, found {}", source, lineno, header.size(), f.size()));
        }
        Row r;
        r.line = lineno;
        if (need_event) r.event = trim(f[col["event"]]);
        r.unit = trim(f[col["unit"]]);
        if (r.unit.empty()) throw std::invalid_argument(fmt::format("{}:{}: empty unit name", source, lineno));
        r.time = parse_int(trim(f[col["time"]]), source, lineno, "time");
        r.outcome = parse_double(trim(f[col["outcome"]]), source, lineno, "outcome");
        if (has_treated) {
            const int t = parse_int(trim(f[col["treated"]]), source, lineno, "treated");
            if (t != 0 && t != 1) throw std::invalid_argument(fmt::format("{}:{}: treated must be 0 or 1", source, lineno));
            r.treated = t;
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::invalid_argument(fmt::format("{}: no data rows", source));
    return rows;
}

Panel build_panel(const std::vector<Row>& rows, const TreatmentOverride& treatment, std::string_view source) {
    std::vector<std::string> units;
    std::unordered_map<std::string, std::size_t> unit_index;
    std::vector<int> times;
    for (const auto& r : rows) {
        if (unit_index.emplace(r.unit, units.size()).second) units.push_back(r.unit);
        times.push_back(r.time);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] != times[k - 1] + 1) {
            throw std::invalid_argument(fmt::format("{}: periods must be consecutive; no rows for time {}", source,
                                                    times[k - 1] + 1));
        }
    }
    const auto n = static_cast<Eigen::Index>(units.size());
    const auto t = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd y(n, t);
    std::vector<std::size_t> seen(static_cast<std::size_t>(n * t), 0);
    std::vector<int> treated_flag(static_cast<std::size_t>(n * t), -1);
    for (const auto& r : rows) {
        const auto i = static_cast<Eigen::Index>(unit_index[r.unit]);
        const auto j = static_cast<Eigen::Index>(r.time - times.front());
        auto& s = seen[static_cast<std::size_t>(i * t + j)];
        if (s != 0) {
            throw std::invalid_argument(fmt::format("{}:{}: duplicate cell ({}, {}) first seen on line {}", source,
                                                    r.line, r.unit, r.time, s));
        }
        s = r.line;
        y(i, j) = r.outcome;
        if (r.treated) treated_flag[static_cast<std::size_t>(i * t + j)] = *r.treated;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < t; ++j) {
            if (seen[static_cast<std::size_t>(i * t + j)] == 0) {
                throw std::invalid_argument(fmt::format("{}: unbalanced panel, missing cell ({}, {})", source,
                                                        units[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]));
            }
        }
    }

    std::optional<std::size_t> treated_unit;
    std::optional<std::size_t> start;
    if (treatment.treated_unit) {
        const auto it = unit_index.find(*treatment.treated_unit);
        if (it == unit_index.end()) {
            throw std::invalid_argument(fmt::format("{}: treated unit '{}' not found", source, *treatment.treated_unit));
        }
        treated_unit = it->second;
    }
    if (treatment.treatment_start) {
        const int ts = *treatment.treatment_start;
        if (ts < times.front() || ts > times.back() + 1) {
            throw std::invalid_argument(fmt::format("{}: treatment start {} outside {}..{}", source, ts, times.front(),
                                                    times.back() + 1));
        }
        start = static_cast<std::size_t>(ts - times.front());
    }
    const bool has_column = rows.front().treated.has_value();
    if (has_column && (!treated_unit || !start)) {
        std::optional<std::size_t> col_unit;
        std::optional<std::size_t> col_start;
        for (const auto& r : rows) {
            if (*r.treated == 0) continue;
            const std::size_t i = unit_index[r.unit];
            if (col_unit && *col_unit != i) {
                throw std::invalid_argument(fmt::format("{}:{}: more than one treated unit ({} and {})", source, r.line,
                                                        units[*col_unit], r.unit));
            }
            col_unit = i;
            const auto j = static_cast<std::size_t>(r.time - times.front());
            col_start = col_start ? std::min(*col_start, j) : j;
        }
        if (col_unit) {
            for (const auto& r : rows) {
                const std::size_t i = unit_index[r.unit];
                const auto j = static_cast<std::size_t>(r.time - times.front());
                const int expected = (i == *col_unit && j >= *col_start) ? 1 : 0;
                if (*r.treated != expected) {
                    throw std::invalid_argument(fmt::format(
                        "{}:{}: treatment must switch on once and stay on for the treated unit", source, r.line));
                }
            }
            if (!treated_unit) treated_unit = col_unit;
            if (!start) start = col_start;
        }
    }
    if (!treated_unit) {
        throw std::invalid_argument(fmt::format(
            "{}: no treated unit designated (add a treated column or pass --treated-unit/--treatment-start)", source));
    }
    if (!start) start = static_cast<std::size_t>(t);
    return Panel(std::move(units), std::move(times), std::move(y), *treated_unit, *start);
}

void write_rows(const Panel& panel, std::ostream& out, const std::string* event) {
    for (std::size_t i = 0; i < panel.num_units(); ++i) {
        for (std::size_t j = 0; j < panel.num_periods(); ++j) {
            if (event != nullptr) fmt::print(out, "{},", csv_field(*event));
            fmt::print(out, "{},{},{:.17g},{}\n", csv_field(panel.units()[i]), panel.times()[j], panel.at(i, j),
                       panel.treated(i, j) ? 1 : 0);
        }
    }
}

} // namespace

Panel parse_panel_csv(std::istream& in, const TreatmentOverride& treatment, std::string_view source) {
    return build_panel(read_rows(in, source, false), treatment, source);
}

Panel load_panel_csv(const std::string& path, const TreatmentOverride& treatment) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
    return parse_panel_csv(in, treatment, path);
}

void save_panel_csv(const Panel& panel, std::ostream& out) {
    out << "unit,time,outcome,treated\n";
    write_rows(panel, out, nullptr);
}

void save_panel_csv(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_panel_csv(panel, out);
}

std::vector<Panel> parse_event_panels_csv(std::istream& in, std::string_view source) {
    const auto rows = read_rows(in, source, true);
    if (!rows.front().treated) throw std::invalid_argument(fmt::format("{}: event panels need a treated column", source));
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> groups;
    for (const auto& r : rows) {
        auto [it, inserted] = groups.try_emplace(r.event);
        if (inserted) order.push_back(r.event);
        it->second.push_back(r);
    }
    std::vector<Panel> out;
    out.reserve(order.size());
    for (const auto& e : order) {
        out.push_back(build_panel(groups[e], {}, fmt::format("{} (event {})", source, e)));
    }
    return out;
}

std::vector<Panel> load_event_panels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event file '" + path + "'");
    return parse_event_panels_csv(in, path);
}

void save_event_panels_csv(const std::vector<Panel>& events, std::ostream& out) {
    out << "event,unit,time,outcome,treated\n";
    for (std::size_t e = 0; e < events.size(); ++e) {
        const std::string id = std::to_string(e);
        write_rows(events[e], out, &id);
    }
}

} // namespace synbeats
