#include "synbeats/panel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace synbeats {

Panel::Panel(std::vector<std::string> units, std::vector<int> times, Eigen::MatrixXd outcomes,
             std::size_t treated_unit, std::size_t treatment_start)
    : units_(std::move(units)), times_(std::move(times)), outcomes_(std::move(outcomes)),
      treated_unit_(treated_unit), treatment_start_(treatment_start) {
    if (units_.empty() || times_.empty()) {
        throw std::invalid_argument("panel needs at least one unit and one period");
    }
    if (static_cast<std::size_t>(outcomes_.rows()) != units_.size() ||
        static_cast<std::size_t>(outcomes_.cols()) != times_.size()) {
        throw std::invalid_argument("outcome matrix is " + std::to_string(outcomes_.rows()) + "x" +
                                    std::to_string(outcomes_.cols()) + " but panel has " +
                                    std::to_string(units_.size()) + " units and " +
                                    std::to_string(times_.size()) + " periods");
    }
    for (std::size_t t = 1; t < times_.size(); ++t) {
        if (times_[t] != times_[t - 1] + 1) {
            throw std::invalid_argument("time labels must be consecutive integers (got " +
                                        std::to_string(times_[t - 1]) + " then " +
                                        std::to_string(times_[t]) + ")");
        }
    }
    if (treated_unit_ >= units_.size()) {
        throw std::invalid_argument("treated unit index out of range");
    }
    if (treatment_start_ > times_.size()) {
        throw std::invalid_argument("treatment start beyond the last period");
    }
    if (!outcomes_.allFinite()) {
        throw std::invalid_argument("panel outcomes must be finite");
    }
}

std::vector<std::size_t> Panel::control_units() const {
    std::vector<std::size_t> out;
    out.reserve(units_.size() - 1);
    for (std::size_t i = 0; i < units_.size(); ++i) {
        if (i != treated_unit_) out.push_back(i);
    }
    return out;
}

std::size_t Panel::unit_index(std::string_view name) const {
    const auto it = std::find(units_.begin(), units_.end(), name);
    if (it == units_.end()) {
        throw std::out_of_range("unknown unit '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - units_.begin());
}

std::size_t Panel::period_index(int time) const {
    if (time < times_.front() || time > times_.back()) {
        throw std::out_of_range("time " + std::to_string(time) + " outside panel range " +
                                std::to_string(times_.front()) + ".." + std::to_string(times_.back()));
    }
    return static_cast<std::size_t>(time - times_.front());
}

Panel Panel::with_treatment(std::size_t unit, std::size_t start) const {
    return Panel(units_, times_, outcomes_, unit, start);
}

Panel Panel::truncated(std::size_t end) const {
    if (end == 0 || end > times_.size()) {
        throw std::invalid_argument("truncation end out of range");
    }
    std::vector<int> times(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(end));
    return Panel(units_, std::move(times), outcomes_.leftCols(static_cast<Eigen::Index>(end)), treated_unit_,
                 std::min(treatment_start_, end));
}

namespace {

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& m, std::size_t row) {
    Eigen::MatrixXd out(m.rows() - 1, m.cols());
    const auto r = static_cast<Eigen::Index>(row);
    out.topRows(r) = m.topRows(r);
    out.bottomRows(m.rows() - r - 1) = m.bottomRows(m.rows() - r - 1);
    return out;
}

} // namespace

Panel Panel::without_unit(std::size_t unit) const {
    if (unit >= units_.size()) throw std::out_of_range("unit index out of range");
    if (unit == treated_unit_) throw std::invalid_argument("cannot drop the treated unit with without_unit");
    if (units_.size() < 2) throw std::invalid_argument("cannot drop the only unit");
    std::vector<std::string> units = units_;
    units.erase(units.begin() + static_cast<std::ptrdiff_t>(unit));
    const std::size_t treated = treated_unit_ > unit ? treated_unit_ - 1 : treated_unit_;
    return Panel(std::move(units), times_, drop_row(outcomes_, unit), treated, treatment_start_);
}

Panel Panel::relabel_without_treated(std::size_t new_treated) const {
    if (new_treated >= units_.size() || new_treated == treated_unit_) {
        throw std::invalid_argument("new treated unit must be an existing control");
    }
    if (units_.size() < 3) {
        throw std::invalid_argument("no donors remain after removing the treated unit");
    }
    std::vector<std::string> units = units_;
    units.erase(units.begin() + static_cast<std::ptrdiff_t>(treated_unit_));
    const std::size_t treated = new_treated > treated_unit_ ? new_treated - 1 : new_treated;
    return Panel(std::move(units), times_, drop_row(outcomes_, treated_unit_), treated, treatment_start_);
}

bool operator==(const Panel& a, const Panel& b) {
    return a.units_ == b.units_ && a.times_ == b.times_ && a.treated_unit_ == b.treated_unit_ &&
           a.treatment_start_ == b.treatment_start_ && a.outcomes_.rows() == b.outcomes_.rows() &&
           a.outcomes_.cols() == b.outcomes_.cols() && a.outcomes_ == b.outcomes_;
}

double PanelView::at(std::size_t unit, std::size_t period) const {
    if (hidden(unit, period)) {
        throw std::out_of_range("cell (" + panel_->units()[unit] + ", " +
                                std::to_string(panel_->times()[period]) + ") is masked");
    }
    return panel_->at(unit, period);
}

Eigen::MatrixXd PanelView::controls() const {
    const auto ctrl = control_units();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ctrl.size()), static_cast<Eigen::Index>(num_periods()));
    for (std::size_t r = 0; r < ctrl.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = panel_->outcomes().row(static_cast<Eigen::Index>(ctrl[r]));
    }
    return out;
}

Eigen::VectorXd PanelView::treated_pre() const {
    return panel_->outcomes()
        .row(static_cast<Eigen::Index>(treated_unit()))
        .head(static_cast<Eigen::Index>(pre_periods()))
        .transpose();
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> PanelView::observed_mask() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(num_units(), num_periods());
    for (std::size_t i = 0; i < num_units(); ++i) {
        for (std::size_t t = 0; t < num_periods(); ++t) {
            mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = !hidden(i, t);
        }
    }
    return mask;
}

PanelView mask_post_treatment(const Panel& panel) noexcept { return PanelView(panel); }

std::vector<TrainingWindow> build_windows(const PanelView& view, std::size_t n_lag) {
    const std::size_t t0 = view.pre_periods();
    if (n_lag == 0) throw std::invalid_argument("n_lag must be positive");
    if (n_lag >= t0) {
        throw std::invalid_argument("n_lag = " + std::to_string(n_lag) + " leaves no training windows with only " +
                                    std::to_string(t0) + " pre-treatment periods");
    }
    const auto ctrl = view.control_units();
    const std::size_t treated = view.treated_unit();
    std::vector<TrainingWindow> windows;
    windows.reserve(t0 - n_lag);
    for (std::size_t t = n_lag; t < t0; ++t) {
        TrainingWindow w;
        w.period = t;
        w.target = view.at(treated, t);
        w.lagged_treated.reserve(n_lag);
        for (std::size_t s = t - n_lag; s < t; ++s) w.lagged_treated.push_back(view.at(treated, s));
        w.contemporaneous_controls.reserve(ctrl.size());
        for (auto i : ctrl) w.contemporaneous_controls.push_back(view.at(i, t));
        windows.push_back(std::move(w));
    }
    return windows;
}

std::vector<TrainingWindow> build_windows(const Panel& panel, std::size_t n_lag) {
    return build_windows(mask_post_treatment(panel), n_lag);
}

std::string_view to_string(PlaceboMode mode) noexcept {
    switch (mode) {
    case PlaceboMode::pseudo_units: return "pseudo_units";
    case PlaceboMode::pseudo_years: return "pseudo_years";
    }
    return "unknown";
}

PlaceboSpec default_placebo_spec(const Panel& panel, PlaceboMode mode, std::size_t horizon, std::size_t n_lag,
                                 std::size_t first_start) {
    PlaceboSpec spec;
    spec.mode = mode;
    spec.horizon = horizon;
    spec.n_lag = n_lag;
    if (mode == PlaceboMode::pseudo_units) {
        spec.iteration_ids = panel.control_units();
    } else {
        const std::size_t first = std::max(first_start, spec.min_pre_periods());
        for (std::size_t s = first; s + horizon <= panel.treatment_start(); ++s) spec.iteration_ids.push_back(s);
    }
    return spec;
}

std::vector<Panel> make_placebo_panels(const Panel& panel, const PlaceboSpec& spec) {
    if (spec.horizon == 0) throw std::invalid_argument("placebo horizon must be at least 1");
    std::vector<Panel> out;
    out.reserve(spec.iteration_ids.size());
    if (spec.mode == PlaceboMode::pseudo_units) {
        if (panel.num_units() < 3) {
            throw std::invalid_argument("pseudo-unit placebo needs at least two controls (no donors remain)");
        }
        if (panel.treatment_start() < spec.min_pre_periods()) {
            throw std::invalid_argument("pseudo-unit placebo needs at least " +
                                        std::to_string(spec.min_pre_periods()) + " pre-treatment periods");
        }
        if (panel.treatment_start() + spec.horizon > panel.num_periods()) {
            throw std::invalid_argument("horizon extends past the last period");
        }
        for (auto unit : spec.iteration_ids) {
            if (unit == panel.treated_unit()) {
                throw std::invalid_argument("the real treated unit cannot be a pseudo-treated unit");
            }
            out.push_back(panel.relabel_without_treated(unit));
        }
        return out;
    }

    const Panel pre = panel.truncated(std::max<std::size_t>(panel.treatment_start(), 1));
    for (auto start : spec.iteration_ids) {
        if (start < spec.min_pre_periods()) {
            throw std::invalid_argument("pseudo start " + std::to_string(panel.times()[0] + static_cast<int>(start)) +
                                        " leaves fewer than " + std::to_string(spec.min_pre_periods()) +
                                        " pre-treatment periods");
        }
        if (start + spec.horizon > panel.treatment_start()) {
            throw std::invalid_argument("pseudo window starting at column " + std::to_string(start) +
                                        " overlaps the real treatment period");
        }
        out.push_back(pre.with_treatment(panel.treated_unit(), start));
    }
    return out;
}

} // namespace synbeats
