#pragma once

#include "synbeats/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/// Dense feedforward building blocks: layers, backprop, MSE, Adam. 64-bit throughout.
namespace synbeats::nn {

enum class Activation { relu, identity };

struct DenseLayer {
    Eigen::MatrixXd weights; // d_out x d_in
    Eigen::VectorXd biases;  // d_out
    Activation activation = Activation::relu;

    DenseLayer() = default;
    DenseLayer(std::size_t input_dim, std::size_t output_dim, Activation act);

    [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }
    [[nodiscard]] std::size_t output_dim() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return static_cast<std::size_t>(weights.size() + biases.size());
    }
};

/// Uniform on +-sqrt(6 / (d_in + d_out)) for weights, zero biases.
void glorot_uniform(DenseLayer& layer, SplitMix64& rng);

/// activation(W x + b). ReLU is max{0, x}.
[[nodiscard]] Eigen::VectorXd forward(const DenseLayer& layer, const Eigen::VectorXd& input);

/// Batched forward; columns of `input` are samples. Optionally stores the pre-activation.
[[nodiscard]] Eigen::MatrixXd forward_batch(const DenseLayer& layer, const Eigen::MatrixXd& input,
                                            Eigen::MatrixXd* pre_activation = nullptr);

struct LayerGradient {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;

    void resize_like(const DenseLayer& layer);
    void set_zero();
};

/**
 * @brief Backprop through one layer for a batch.
 *
 * Adds dJ/dW and dJ/db into `grad` (or overwrites them when `accumulate` is
 * false) and returns dJ/d(input). The ReLU subgradient at a pre-activation of
 * exactly zero is taken as zero.
 */
Eigen::MatrixXd backward_batch(const DenseLayer& layer, const Eigen::MatrixXd& input,
                               const Eigen::MatrixXd& pre_activation, const Eigen::MatrixXd& grad_output,
                               LayerGradient& grad, bool accumulate = true);

/// Activations recorded by Sequential::forward for a later backward pass.
struct Tape {
    std::vector<Eigen::MatrixXd> inputs;
    std::vector<Eigen::MatrixXd> pre_activations;

    [[nodiscard]] bool empty() const noexcept { return inputs.empty(); }
    void clear() noexcept {
        inputs.clear();
        pre_activations.clear();
    }
};

struct SequentialGradients {
    std::vector<LayerGradient> layers;
    Eigen::MatrixXd input;
};

/// A plain stack of dense layers.
class Sequential {
public:
    Sequential() = default;
    explicit Sequential(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

    [[nodiscard]] std::vector<DenseLayer>& layers() noexcept { return layers_; }
    [[nodiscard]] const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t input_dim() const;
    [[nodiscard]] std::size_t output_dim() const;

    /// Inference only.
    [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
    /// Records activations on `tape` (which is cleared first).
    [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Tape& tape) const;

    /// Accumulates parameter gradients into `grads` (sized on first use) and returns dJ/d(input).
    /// Throws std::logic_error when the tape holds no forward pass.
    Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_output,
                             std::vector<LayerGradient>& grads, bool accumulate = true) const;

    /// Convenience wrapper returning fresh gradients.
    [[nodiscard]] SequentialGradients backward(const Tape& tape, const Eigen::MatrixXd& grad_output) const;

private:
    std::vector<DenseLayer> layers_;
};

/// Mean of squared differences. Throws on empty or mismatched input.
[[nodiscard]] double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One parameter tensor and its gradient. `layer` identifies the owning layer in error messages.
struct ParamBlock {
    std::span<double> values;
    std::span<const double> grads;
    std::size_t layer = 0;
};

class NonFiniteGradientError : public std::runtime_error {
public:
    explicit NonFiniteGradientError(std::size_t layer)
        : std::runtime_error("non-finite gradient in layer " + std::to_string(layer)), layer_(layer) {}
    [[nodiscard]] std::size_t layer() const noexcept { return layer_; }

private:
    std::size_t layer_;
};

struct AdamState {
    AdamOptions options;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::size_t step_count = 0;

    AdamState() = default;
    AdamState(std::span<const ParamBlock> blocks, AdamOptions opts);
};

/// Bias-corrected Adam update in place. Gradients are validated before any parameter changes.
void adam_step(AdamState& state, std::span<const ParamBlock> blocks);

} // namespace synbeats::nn
