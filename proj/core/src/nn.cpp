#include "synbeats/nn.hpp"

#include <cmath>

namespace synbeats::nn {

DenseLayer::DenseLayer(std::size_t input_dim, std::size_t output_dim, Activation act)
    : weights(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(output_dim), static_cast<Eigen::Index>(input_dim))),
      biases(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_dim))), activation(act) {}

void glorot_uniform(DenseLayer& layer, SplitMix64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.input_dim() + layer.output_dim()));
    // Column-major fill order is part of the seed contract.
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
            layer.weights(i, j) = rng.uniform(-limit, limit);
        }
    }
    layer.biases.setZero();
}

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation act) {
    if (act == Activation::relu) z = z.cwiseMax(0.0);
}

void check_input(const DenseLayer& layer, Eigen::Index rows) {
    if (static_cast<std::size_t>(rows) != layer.input_dim()) {
        throw std::invalid_argument("layer expects input of length " + std::to_string(layer.input_dim()) +
                                    ", got " + std::to_string(rows));
    }
}

} // namespace

Eigen::VectorXd forward(const DenseLayer& layer, const Eigen::VectorXd& input) {
    check_input(layer, input.size());
    Eigen::VectorXd z = layer.weights * input + layer.biases;
    if (layer.activation == Activation::relu) z = z.cwiseMax(0.0);
    return z;
}

Eigen::MatrixXd forward_batch(const DenseLayer& layer, const Eigen::MatrixXd& input, Eigen::MatrixXd* pre_activation) {
    check_input(layer, input.rows());
    Eigen::MatrixXd z(layer.weights.rows(), input.cols());
    z.noalias() = layer.weights * input;
    z.colwise() += layer.biases;
    if (pre_activation != nullptr) *pre_activation = z;
    apply_activation(z, layer.activation);
    return z;
}

void LayerGradient::resize_like(const DenseLayer& layer) {
    weights = Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols());
    biases = Eigen::VectorXd::Zero(layer.biases.size());
}

void LayerGradient::set_zero() {
    weights.setZero();
    biases.setZero();
}

Eigen::MatrixXd backward_batch(const DenseLayer& layer, const Eigen::MatrixXd& input,
                               const Eigen::MatrixXd& pre_activation, const Eigen::MatrixXd& grad_output,
                               LayerGradient& grad, bool accumulate) {
    Eigen::MatrixXd dz;
    if (layer.activation == Activation::relu) {
        dz = (pre_activation.array() > 0.0).select(grad_output, 0.0);
    } else {
        dz = grad_output;
    }
    if (accumulate) {
        grad.weights.noalias() += dz * input.transpose();
        grad.biases += dz.rowwise().sum();
    } else {
        grad.weights.noalias() = dz * input.transpose();
        grad.biases = dz.rowwise().sum();
    }
    Eigen::MatrixXd dinput(layer.weights.cols(), dz.cols());
    dinput.noalias() = layer.weights.transpose() * dz;
    return dinput;
}

std::size_t Sequential::input_dim() const {
    if (layers_.empty()) throw std::logic_error("empty network");
    return layers_.front().input_dim();
}

std::size_t Sequential::output_dim() const {
    if (layers_.empty()) throw std::logic_error("empty network");
    return layers_.back().output_dim();
}

Eigen::MatrixXd Sequential::forward(const Eigen::MatrixXd& input) const {
    Eigen::MatrixXd h = input;
    for (const auto& layer : layers_) h = forward_batch(layer, h);
    return h;
}

Eigen::MatrixXd Sequential::forward(const Eigen::MatrixXd& input, Tape& tape) const {
    tape.clear();
    tape.inputs.reserve(layers_.size());
    tape.pre_activations.resize(layers_.size());
    Eigen::MatrixXd h = input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        tape.inputs.push_back(h);
        h = forward_batch(layers_[l], h, &tape.pre_activations[l]);
    }
    return h;
}

Eigen::MatrixXd Sequential::backward(const Tape& tape, const Eigen::MatrixXd& grad_output,
                                     std::vector<LayerGradient>& grads, bool accumulate) const {
    if (tape.empty() || tape.inputs.size() != layers_.size()) {
        throw std::logic_error("backward called before forward");
    }
    if (grads.size() != layers_.size()) {
        grads.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) grads[l].resize_like(layers_[l]);
    }
    Eigen::MatrixXd g = grad_output;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        g = backward_batch(layers_[l], tape.inputs[l], tape.pre_activations[l], g, grads[l], accumulate);
    }
    return g;
}

SequentialGradients Sequential::backward(const Tape& tape, const Eigen::MatrixXd& grad_output) const {
    SequentialGradients out;
    out.input = backward(tape, grad_output, out.layers);
    return out;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty()) throw std::invalid_argument("mse_loss of empty input");
    if (predictions.size() != targets.size()) throw std::invalid_argument("mse_loss length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

AdamState::AdamState(std::span<const ParamBlock> blocks, AdamOptions opts) : options(opts) {
    first_moment.reserve(blocks.size());
    second_moment.reserve(blocks.size());
    for (const auto& b : blocks) {
        first_moment.emplace_back(b.values.size(), 0.0);
        second_moment.emplace_back(b.values.size(), 0.0);
    }
}

void adam_step(AdamState& state, std::span<const ParamBlock> blocks) {
    if (blocks.size() != state.first_moment.size()) {
        throw std::invalid_argument("Adam state has " + std::to_string(state.first_moment.size()) +
                                    " tensors but step received " + std::to_string(blocks.size()));
    }
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        if (b.values.size() != b.grads.size() || b.values.size() != state.first_moment[k].size()) {
            throw std::invalid_argument("parameter/gradient shape mismatch in layer " + std::to_string(b.layer));
        }
        for (double g : b.grads) {
            if (!std::isfinite(g)) throw NonFiniteGradientError(b.layer);
        }
    }

    ++state.step_count;
    const auto& o = state.options;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(o.beta1, t);
    const double correction2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        const auto n = static_cast<Eigen::Index>(b.values.size());
        Eigen::Map<Eigen::ArrayXd> m(state.first_moment[k].data(), n);
        Eigen::Map<Eigen::ArrayXd> v(state.second_moment[k].data(), n);
        Eigen::Map<Eigen::ArrayXd> p(b.values.data(), n);
        const Eigen::Map<const Eigen::ArrayXd> g(b.grads.data(), n);
        m = o.beta1 * m + (1.0 - o.beta1) * g;
        v = o.beta2 * v + (1.0 - o.beta2) * g.square();
        p -= o.learning_rate * (m / correction1) / ((v / correction2).sqrt() + o.epsilon);
    }
}

} // namespace synbeats::nn
