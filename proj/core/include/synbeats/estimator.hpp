#pragma once

#include "synbeats/matrix_completion.hpp"
#include "synbeats/nbeats.hpp"
#include "synbeats/panel.hpp"
#include "synbeats/sdid.hpp"
#include "synbeats/synthetic_control.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace synbeats {

/**
 * @brief Common interface for counterfactual estimators.
 *
 * `predict` returns Y_Nt(0) estimates for every post-treatment column of
 * `panel`, in order. Apart from TWFE, implementations only read the panel
 * through mask_post_treatment. Implementations are stateless and may be
 * called concurrently.
 */
class CounterfactualEstimator {
public:
    virtual ~CounterfactualEstimator() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual bool stochastic() const { return false; }
    [[nodiscard]] virtual std::vector<double> predict(const Panel& panel, std::uint64_t seed) const = 0;
};

using EstimatorPtr = std::shared_ptr<const CounterfactualEstimator>;

struct EstimatorSettings {
    FitOptions synbeats;     // mode is forced to synbeats
    FitOptions nbeats;       // mode is forced to nbeats_only
    ScOptions sc;            // used by "sc"; "sc_di" forces di_regression
    McOptions mc;
    std::size_t mc_grid_size = 20;
    double mc_grid_ratio = 1e-4;
    SdidOptions sdid;
};

/// Known names: twfe, sc, sc_di, horizontal, sdid, mc, synbeats, nbeats.
[[nodiscard]] EstimatorPtr make_estimator(std::string_view name, const EstimatorSettings& settings = {});
[[nodiscard]] std::vector<EstimatorPtr> make_estimators(const std::vector<std::string>& names,
                                                        const EstimatorSettings& settings = {});
[[nodiscard]] const std::vector<std::string>& known_estimators();

} // namespace synbeats
