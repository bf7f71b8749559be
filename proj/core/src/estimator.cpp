#include "synbeats/estimator.hpp"

#include "synbeats/horizontal.hpp"
#include "synbeats/twfe.hpp"

#include <stdexcept>

namespace synbeats {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> post_slice(const Eigen::VectorXd& full, std::size_t t0) {
    return {full.data() + t0, full.data() + full.size()};
}

class TwfeEstimator final : public CounterfactualEstimator {
public:
    std::string name() const override { return "twfe"; }
    std::vector<double> predict(const Panel& panel, std::uint64_t) const override {
        return to_vector(fit_twfe(panel).counterfactual);
    }
};

class ScEstimator final : public CounterfactualEstimator {
public:
    ScEstimator(std::string name, ScOptions options) : name_(std::move(name)), options_(options) {}
    std::string name() const override { return name_; }
    std::vector<double> predict(const Panel& panel, std::uint64_t) const override {
        const PanelView view = mask_post_treatment(panel);
        return post_slice(fit_sc(view, options_).fitted(view), panel.pre_periods());
    }

private:
    std::string name_;
    ScOptions options_;
};

class HorizontalEstimator final : public CounterfactualEstimator {
public:
    std::string name() const override { return "horizontal"; }
    std::vector<double> predict(const Panel& panel, std::uint64_t) const override {
        return predict_horizontal(mask_post_treatment(panel), panel.post_periods());
    }
};

class SdidEstimator final : public CounterfactualEstimator {
public:
    explicit SdidEstimator(SdidOptions options) : options_(options) {}
    std::string name() const override { return "sdid"; }
    std::vector<double> predict(const Panel& panel, std::uint64_t) const override {
        return to_vector(fit_sdid(mask_post_treatment(panel), options_).counterfactual);
    }

private:
    SdidOptions options_;
};

class McEstimator final : public CounterfactualEstimator {
public:
    McEstimator(McOptions options, std::size_t grid_size, double ratio)
        : options_(options), grid_size_(grid_size), ratio_(ratio) {}
    std::string name() const override { return "mc"; }
    std::vector<double> predict(const Panel& panel, std::uint64_t) const override {
        const PanelView view = mask_post_treatment(panel);
        const auto grid = default_lambda_grid(view, options_, grid_size_, ratio_);
        const Eigen::MatrixXd completed = fit_mc(view, grid, options_).completed();
        const Eigen::VectorXd row = completed.row(static_cast<Eigen::Index>(panel.treated_unit())).transpose();
        return post_slice(row, panel.pre_periods());
    }

private:
    McOptions options_;
    std::size_t grid_size_;
    double ratio_;
};

class NBeatsEstimator final : public CounterfactualEstimator {
public:
    NBeatsEstimator(std::string name, FitOptions options) : name_(std::move(name)), options_(options) {}
    std::string name() const override { return name_; }
    bool stochastic() const override { return true; }
    std::vector<double> predict(const Panel& panel, std::uint64_t seed) const override {
        const PanelView view = mask_post_treatment(panel);
        FitOptions o = options_;
        o.seed = seed;
        const ForecastModel model = fit(view, o);
        return predict_counterfactual(model, view, panel.post_periods());
    }

private:
    std::string name_;
    FitOptions options_;
};

} // namespace

const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> names{"twfe", "sc", "sc_di", "horizontal", "sdid", "mc", "synbeats", "nbeats"};
    return names;
}

EstimatorPtr make_estimator(std::string_view name, const EstimatorSettings& settings) {
    if (name == "twfe") return std::make_shared<TwfeEstimator>();
    if (name == "sc") return std::make_shared<ScEstimator>("sc", settings.sc);
    if (name == "sc_di") {
        ScOptions o = settings.sc;
        o.mode = ScMode::di_regression;
        return std::make_shared<ScEstimator>("sc_di", o);
    }
    if (name == "horizontal") return std::make_shared<HorizontalEstimator>();
    if (name == "sdid") return std::make_shared<SdidEstimator>(settings.sdid);
    if (name == "mc") return std::make_shared<McEstimator>(settings.mc, settings.mc_grid_size, settings.mc_grid_ratio);
    if (name == "synbeats") {
        FitOptions o = settings.synbeats;
        o.mode = ForecastMode::synbeats;
        return std::make_shared<NBeatsEstimator>("synbeats", o);
    }
    if (name == "nbeats") {
        FitOptions o = settings.nbeats;
        o.mode = ForecastMode::nbeats_only;
        return std::make_shared<NBeatsEstimator>("nbeats", o);
    }
    std::string known;
    for (const auto& n : known_estimators()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<EstimatorPtr> make_estimators(const std::vector<std::string>& names, const EstimatorSettings& settings) {
    std::vector<EstimatorPtr> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(make_estimator(n, settings));
    return out;
}

} // namespace synbeats
