#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace synbeats {

/**
 * @brief Balanced N x T outcome panel with a single treated unit.
 *
 * Periods are addressed by 0-based column index. `treatment_start()` is the
 * column of the first treated period, so it also equals the number of
 * pre-treatment periods (T0). A value equal to `num_periods()` means the
 * treated unit is never treated inside the panel.
 *
 * A Panel is immutable after construction and safe to share across threads.
 */
class Panel {
public:
    Panel(std::vector<std::string> units, std::vector<int> times, Eigen::MatrixXd outcomes,
          std::size_t treated_unit, std::size_t treatment_start);

    [[nodiscard]] std::size_t num_units() const noexcept { return units_.size(); }
    [[nodiscard]] std::size_t num_periods() const noexcept { return times_.size(); }
    [[nodiscard]] std::size_t treated_unit() const noexcept { return treated_unit_; }
    [[nodiscard]] std::size_t treatment_start() const noexcept { return treatment_start_; }
    [[nodiscard]] std::size_t pre_periods() const noexcept { return treatment_start_; }
    [[nodiscard]] std::size_t post_periods() const noexcept { return times_.size() - treatment_start_; }

    [[nodiscard]] const std::vector<std::string>& units() const noexcept { return units_; }
    [[nodiscard]] const std::vector<int>& times() const noexcept { return times_; }
    [[nodiscard]] const Eigen::MatrixXd& outcomes() const noexcept { return outcomes_; }
    [[nodiscard]] double at(std::size_t unit, std::size_t period) const { return outcomes_(unit, period); }

    /// W_it: 1 iff unit is the treated unit and period >= treatment_start.
    [[nodiscard]] bool treated(std::size_t unit, std::size_t period) const noexcept {
        return unit == treated_unit_ && period >= treatment_start_;
    }

    /// Control unit indices in ascending order.
    [[nodiscard]] std::vector<std::size_t> control_units() const;

    [[nodiscard]] std::size_t unit_index(std::string_view name) const;
    [[nodiscard]] std::size_t period_index(int time) const;

    [[nodiscard]] Panel with_treatment(std::size_t unit, std::size_t start) const;
    /// Keeps periods [0, end). treatment_start is clamped to the new length.
    [[nodiscard]] Panel truncated(std::size_t end) const;
    /// Drops a non-treated unit.
    [[nodiscard]] Panel without_unit(std::size_t unit) const;
    /// Drops the treated unit and re-labels `new_treated` (an index into this panel) as treated.
    [[nodiscard]] Panel relabel_without_treated(std::size_t new_treated) const;

    friend bool operator==(const Panel& a, const Panel& b);

private:
    std::vector<std::string> units_;
    std::vector<int> times_;
    Eigen::MatrixXd outcomes_;
    std::size_t treated_unit_;
    std::size_t treatment_start_;
};

/**
 * @brief Read-only view of a panel with the treated unit's post-period hidden.
 *
 * The view does not own the panel; the panel must outlive it. Reading a
 * hidden cell throws std::out_of_range.
 */
class PanelView {
public:
    explicit PanelView(const Panel& panel) noexcept : panel_(&panel) {}

    [[nodiscard]] bool hidden(std::size_t unit, std::size_t period) const noexcept {
        return panel_->treated(unit, period);
    }
    [[nodiscard]] double at(std::size_t unit, std::size_t period) const;

    [[nodiscard]] std::size_t num_units() const noexcept { return panel_->num_units(); }
    [[nodiscard]] std::size_t num_periods() const noexcept { return panel_->num_periods(); }
    [[nodiscard]] std::size_t treated_unit() const noexcept { return panel_->treated_unit(); }
    [[nodiscard]] std::size_t pre_periods() const noexcept { return panel_->pre_periods(); }
    [[nodiscard]] std::size_t post_periods() const noexcept { return panel_->post_periods(); }
    [[nodiscard]] std::vector<std::size_t> control_units() const { return panel_->control_units(); }
    [[nodiscard]] const std::vector<int>& times() const noexcept { return panel_->times(); }

    /// Control outcomes, (N-1) x T, rows in control_units() order.
    [[nodiscard]] Eigen::MatrixXd controls() const;
    /// Treated outcomes over the pre-period, length T0.
    [[nodiscard]] Eigen::VectorXd treated_pre() const;
    /// Observation mask (true = visible), N x T.
    [[nodiscard]] Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> observed_mask() const;

    /// Returns the underlying unmasked panel.
    [[nodiscard]] const Panel& unmask() const noexcept { return *panel_; }

private:
    const Panel* panel_;
};

[[nodiscard]] PanelView mask_post_treatment(const Panel& panel) noexcept;

/**
 * @brief One supervised training example for the treated-unit forecaster.
 *
 * `period` is the 0-based column of the target, with n_lag <= period < T0.
 */
struct TrainingWindow {
    double target = 0.0;
    std::vector<double> lagged_treated;           // Y_N,period-n_lag .. Y_N,period-1
    std::vector<double> contemporaneous_controls; // Y_i,period for every control, control_units() order
    std::size_t period = 0;
};

/// Builds the T0 - n_lag windows ordered by period. Throws if n_lag >= T0.
[[nodiscard]] std::vector<TrainingWindow> build_windows(const PanelView& view, std::size_t n_lag);
[[nodiscard]] std::vector<TrainingWindow> build_windows(const Panel& panel, std::size_t n_lag);

enum class PlaceboMode { pseudo_units, pseudo_years };

[[nodiscard]] std::string_view to_string(PlaceboMode mode) noexcept;

struct PlaceboSpec {
    PlaceboMode mode = PlaceboMode::pseudo_units;
    std::size_t horizon = 1;
    /// pseudo_units: unit indices into the source panel. pseudo_years: pseudo start columns.
    std::vector<std::size_t> iteration_ids;
    std::size_t n_lag = 1;

    [[nodiscard]] std::size_t min_pre_periods() const noexcept { return n_lag + 2; }
};

/// Every control unit, or every pseudo start column from `first_start` that fits the horizon.
[[nodiscard]] PlaceboSpec default_placebo_spec(const Panel& panel, PlaceboMode mode, std::size_t horizon,
                                               std::size_t n_lag = 1, std::size_t first_start = 0);

/**
 * @brief Expands a placebo specification into one panel per iteration.
 *
 * pseudo_units: the real treated unit is dropped and each listed control is
 * re-labeled as treated with the source treatment_start. pseudo_years: the
 * panel is restricted to the real pre-period and treatment_start is moved to
 * each listed column.
 */
[[nodiscard]] std::vector<Panel> make_placebo_panels(const Panel& panel, const PlaceboSpec& spec);

} // namespace synbeats
