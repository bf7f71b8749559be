#include "synbeats/config.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace synbeats {

std::string_view to_string(Profile profile) noexcept { return profile == Profile::smoke ? "smoke" : "paper"; }

Profile parse_profile(std::string_view text) {
    if (text == "smoke") return Profile::smoke;
    if (text == "paper") return Profile::paper;
    throw std::invalid_argument("unknown profile '" + std::string(text) + "' (expected smoke or paper)");
}

RunConfig::RunConfig() { apply_profile(*this, Profile::smoke); }

void apply_profile(RunConfig& config, Profile profile) {
    config.profile = profile;
    for (FitOptions* o : {&config.settings.synbeats, &config.settings.nbeats}) {
        const std::size_t n_lag = o->n_lag;
        const double lr = o->learning_rate;
        o->config = profile == Profile::paper ? BlockConfig::paper() : BlockConfig::smoke();
        o->epochs = profile == Profile::paper ? 500 : 100;
        o->n_lag = n_lag;
        o->learning_rate = lr;
    }
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const auto b = piece.find_first_not_of(" \t");
        if (b != std::string_view::npos) {
            const auto e = piece.find_last_not_of(" \t");
            out.emplace_back(piece.substr(b, e - b + 1));
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

namespace {

[[noreturn]] void bad_value(std::string_view section, std::string_view key, std::string_view value, std::string_view why) {
    throw std::invalid_argument(fmt::format("[{}] {} = '{}': {}", section, key, value, why));
}

template <typename T>
T parse_number(std::string_view section, std::string_view key, std::string_view value) {
    T v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) bad_value(section, key, value, "not a number");
    return v;
}

std::size_t parse_count(std::string_view section, std::string_view key, std::string_view value, std::size_t min) {
    if (!value.empty() && value.front() == '-') bad_value(section, key, value, "must be non-negative");
    const auto v = parse_number<std::size_t>(section, key, value);
    if (v < min) bad_value(section, key, value, fmt::format("must be at least {}", min));
    return v;
}

double parse_positive(std::string_view section, std::string_view key, std::string_view value) {
    const auto v = parse_number<double>(section, key, value);
    if (!(v > 0.0)) bad_value(section, key, value, "must be positive");
    return v;
}

bool parse_bool(std::string_view section, std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(section, key, value, "expected true or false");
}

void apply_network(FitOptions& o, std::string_view section, std::string_view key, std::string_view value) {
    if (key == "n_lag") o.n_lag = parse_count(section, key, value, 1);
    else if (key == "stacks") o.config.num_stacks = parse_count(section, key, value, 1);
    else if (key == "blocks_per_stack") o.config.blocks_per_stack = parse_count(section, key, value, 1);
    else if (key == "layers") o.config.layers_per_block = parse_count(section, key, value, 1);
    else if (key == "width") o.config.layer_width = parse_count(section, key, value, 1);
    else if (key == "epochs") o.epochs = parse_count(section, key, value, 1);
    else if (key == "lr") o.learning_rate = parse_positive(section, key, value);
    else throw std::invalid_argument(fmt::format("unknown key '{}' in [{}]", key, section));
}

} // namespace

void apply_setting(RunConfig& c, std::string_view section, std::string_view key, std::string_view value) {
    if (section == "run") {
        if (key == "data") c.data = value;
        else if (key == "events") c.events = value;
        else if (key == "estimators") {
            auto names = split_list(value);
            if (names.empty()) bad_value(section, key, value, "empty estimator list");
            for (const auto& n : names) (void)make_estimator(n, c.settings);
            c.estimators = std::move(names);
        } else if (key == "horizon") c.horizon = parse_count(section, key, value, 1);
        else if (key == "threads") c.threads = parse_count(section, key, value, 0);
        else if (key == "seeds") {
            std::vector<std::uint64_t> seeds;
            for (const auto& s : split_list(value)) seeds.push_back(parse_number<std::uint64_t>(section, key, s));
            if (seeds.empty()) bad_value(section, key, value, "empty seed list");
            c.seeds = std::move(seeds);
        } else if (key == "output") c.output = value;
        else if (key == "profile") apply_profile(c, parse_profile(value));
        else if (key == "first_year") c.first_year = parse_number<int>(section, key, value);
        else if (key == "window") c.window = parse_count(section, key, value, 1);
        else if (key == "treated_unit") c.treated_unit = std::string(value);
        else if (key == "treatment_start") c.treatment_start = parse_number<int>(section, key, value);
        else throw std::invalid_argument(fmt::format("unknown key '{}' in [run]", key));
    } else if (section == "synbeats") {
        apply_network(c.settings.synbeats, section, key, value);
    } else if (section == "nbeats") {
        apply_network(c.settings.nbeats, section, key, value);
    } else if (section == "sc") {
        if (key == "mode") c.settings.sc.mode = parse_sc_mode(value);
        else if (key == "tolerance") c.settings.sc.tolerance = parse_positive(section, key, value);
        else if (key == "max_iterations") c.settings.sc.max_iterations = parse_count(section, key, value, 1);
        else throw std::invalid_argument(fmt::format("unknown key '{}' in [sc]", key));
    } else if (section == "mc") {
        auto& m = c.settings.mc;
        if (key == "fixed_effects") m.fixed_effects = parse_bool(section, key, value);
        else if (key == "tolerance") m.tolerance = parse_positive(section, key, value);
        else if (key == "max_iterations") m.max_iterations = parse_count(section, key, value, 1);
        else if (key == "folds") m.folds = parse_count(section, key, value, 0);
        else if (key == "holdout") {
            const double h = parse_positive(section, key, value);
            if (h >= 1.0) bad_value(section, key, value, "must be below 1");
            m.holdout_fraction = h;
        } else if (key == "cv_seed") m.cv_seed = parse_number<std::uint64_t>(section, key, value);
        else if (key == "grid_size") c.settings.mc_grid_size = parse_count(section, key, value, 1);
        else if (key == "grid_ratio") {
            const double r = parse_positive(section, key, value);
            if (r > 1.0) bad_value(section, key, value, "must be at most 1");
            c.settings.mc_grid_ratio = r;
        } else throw std::invalid_argument(fmt::format("unknown key '{}' in [mc]", key));
    } else {
        throw std::invalid_argument(fmt::format("unknown section [{}]", section));
    }
}

void parse_config(std::istream& in, RunConfig& config, std::string_view source) {
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    const auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view text = line;
        if (const auto c = text.find_first_of("#;"); c != std::string_view::npos) text = text.substr(0, c);
        text = trim(text);
        if (text.empty()) continue;
        try {
            if (text.front() == '[') {
                if (text.back() != ']') throw std::invalid_argument("malformed section header");
                section = std::string(trim(text.substr(1, text.size() - 2)));
                if (section != "run" && section != "synbeats" && section != "nbeats" && section != "sc" && section != "mc") {
                    throw std::invalid_argument(fmt::format("unknown section [{}]", section));
                }
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string_view::npos) throw std::invalid_argument("expected key = value");
            if (section.empty()) throw std::invalid_argument("key outside of a section");
            apply_setting(config, section, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("{}:{}: {}", source, lineno, e.what()));
        }
    }
}

void load_config(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    parse_config(in, config, path);
}

namespace {

void write_network(std::ostream& out, std::string_view section, const FitOptions& o) {
    fmt::print(out, "\n[{}]\nn_lag = {}\nstacks = {}\nblocks_per_stack = {}\nlayers = {}\nwidth = {}\nepochs = {}\nlr = {}\n",
               section, o.n_lag, o.config.num_stacks, o.config.blocks_per_stack, o.config.layers_per_block,
               o.config.layer_width, o.epochs, o.learning_rate);
}

} // namespace

void write_config(const RunConfig& c, std::ostream& out) {
    fmt::print(out, "[run]\n");
    if (!c.data.empty()) fmt::print(out, "data = {}\n", c.data);
    if (!c.events.empty()) fmt::print(out, "events = {}\n", c.events);
    fmt::print(out, "estimators = {}\nhorizon = {}\nseeds = {}\noutput = {}\nprofile = {}\n", fmt::join(c.estimators, ","),
               c.horizon, fmt::join(c.seeds, ","), c.output, to_string(c.profile));
    if (c.first_year) fmt::print(out, "first_year = {}\n", *c.first_year);
    if (c.window) fmt::print(out, "window = {}\n", *c.window);
    if (c.treated_unit) fmt::print(out, "treated_unit = {}\n", *c.treated_unit);
    if (c.treatment_start) fmt::print(out, "treatment_start = {}\n", *c.treatment_start);
    write_network(out, "synbeats", c.settings.synbeats);
    write_network(out, "nbeats", c.settings.nbeats);
    fmt::print(out, "\n[sc]\nmode = {}\ntolerance = {}\nmax_iterations = {}\n", to_string(c.settings.sc.mode),
               c.settings.sc.tolerance, c.settings.sc.max_iterations);
    const auto& m = c.settings.mc;
    fmt::print(out,
               "\n[mc]\nfixed_effects = {}\ntolerance = {}\nmax_iterations = {}\nfolds = {}\nholdout = {}\ncv_seed = {}\n"
               "grid_size = {}\ngrid_ratio = {}\n",
               m.fixed_effects, m.tolerance, m.max_iterations, m.folds, m.holdout_fraction, m.cv_seed,
               c.settings.mc_grid_size, c.settings.mc_grid_ratio);
}

} // namespace synbeats
