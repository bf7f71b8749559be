#pragma once

#include "synbeats/nn.hpp"
#include "synbeats/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace synbeats {

struct BlockConfig {
    std::size_t num_stacks = 30;
    std::size_t blocks_per_stack = 1;
    std::size_t layers_per_block = 4;
    std::size_t layer_width = 256;
    std::size_t input_dim = 0; // filled in by fit from the panel shape
    std::size_t forecast_dim = 1;

    [[nodiscard]] std::size_t num_blocks() const noexcept { return num_stacks * blocks_per_stack; }
    void validate() const;

    static BlockConfig paper() { return {}; }
    static BlockConfig smoke() { return {4, 1, 4, 32, 0, 1}; }
};

/// synbeats: lags plus contemporaneous controls. nbeats_only: lags only.
enum class ForecastMode { synbeats, nbeats_only };

[[nodiscard]] std::string_view to_string(ForecastMode mode) noexcept;
[[nodiscard]] ForecastMode parse_forecast_mode(std::string_view text);

struct NBeatsBlock {
    nn::Sequential trunk;       // layers_per_block ReLU layers
    nn::DenseLayer forecast_head; // identity, layer_width -> forecast_dim
    nn::DenseLayer backcast_head; // identity, layer_width -> input_dim
};

/// z = (y - mean) / std. A zero std is stored as 1.
struct SeriesScale {
    double mean = 0.0;
    double std = 1.0;

    [[nodiscard]] double normalize(double y) const noexcept { return (y - mean) / std; }
    [[nodiscard]] double denormalize(double z) const noexcept { return z * std + mean; }

    /// Population moments of `values`.
    [[nodiscard]] static SeriesScale fit(const Eigen::Ref<const Eigen::VectorXd>& values);
};

struct Normalization {
    SeriesScale treated;
    std::vector<SeriesScale> controls; // control_units() order; empty in nbeats_only mode
};

struct ForecastModel {
    BlockConfig config;
    std::vector<NBeatsBlock> blocks;
    std::size_t n_lag = 1;
    ForecastMode mode = ForecastMode::synbeats;
    Normalization normalization;
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    double learning_rate = 1e-3;
    /// Full-batch training loss before each update, in normalized units.
    std::vector<double> loss_history;
    /// Loss after the last update.
    double final_loss = 0.0;
};

/// Glorot-initialized model with the given shape. `config.input_dim` must be set.
[[nodiscard]] ForecastModel make_model(const BlockConfig& config, std::size_t n_lag, ForecastMode mode,
                                       std::uint64_t seed);

struct ForwardTrace {
    Eigen::VectorXd forecast;
    std::vector<Eigen::VectorXd> residuals;       // x_0 .. x_K; x_0 is the input
    std::vector<Eigen::VectorXd> block_forecasts; // y_1 .. y_K
};

/// Runs the residual stack on one (normalized) input.
[[nodiscard]] ForwardTrace nbeats_forward(const ForecastModel& model, const Eigen::VectorXd& input);

/// Batched forecast for normalized inputs stored column-wise.
[[nodiscard]] Eigen::MatrixXd nbeats_forward_batch(const ForecastModel& model, const Eigen::MatrixXd& inputs);

struct BlockGradient {
    std::vector<nn::LayerGradient> trunk;
    nn::LayerGradient forecast;
    nn::LayerGradient backcast;
};

/**
 * @brief Full-batch MSE of the summed forecast and its gradient for every block.
 *
 * `inputs` holds normalized inputs column-wise and `targets` is 1 x batch.
 * `grads` is resized to match the model and overwritten.
 */
double loss_and_gradient(const ForecastModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         std::vector<BlockGradient>& grads);

struct FitOptions {
    BlockConfig config = BlockConfig::paper();
    std::size_t n_lag = 1;
    ForecastMode mode = ForecastMode::synbeats;
    std::uint64_t seed = 0;
    std::size_t epochs = 500;
    double learning_rate = 1e-3;
};

/// Trains on the T0 - n_lag windows of `view` with full-batch Adam on the forecast MSE.
[[nodiscard]] ForecastModel fit(const PanelView& view, const FitOptions& options);

/// Normalized network input for one target column. `lags` are raw treated values, oldest first.
[[nodiscard]] Eigen::VectorXd model_input(const ForecastModel& model, const PanelView& view, std::size_t column,
                                          const std::vector<double>& lags);

struct PredictionTrace {
    std::vector<double> predictions;
    std::vector<std::vector<double>> lag_inputs; // raw lag values fed at each step
};

/// Hook called with (step, prediction) after each step; may modify the prediction before feedback.
using PredictionAdjust = std::function<void(std::size_t, double&)>;

/// Iterative multi-step prediction for columns T0 .. T0 + horizon - 1, in outcome units.
[[nodiscard]] std::vector<double> predict_counterfactual(const ForecastModel& model, const PanelView& view,
                                                         std::size_t horizon);
[[nodiscard]] PredictionTrace predict_counterfactual_trace(const ForecastModel& model, const PanelView& view,
                                                           std::size_t horizon,
                                                           const PredictionAdjust& adjust = {});

void save_model(const ForecastModel& model, std::ostream& out);
[[nodiscard]] ForecastModel load_model(std::istream& in);
void save_model(const ForecastModel& model, const std::string& path);
[[nodiscard]] ForecastModel load_model(const std::string& path);

} // namespace synbeats
