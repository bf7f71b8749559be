#include "synbeats/nbeats.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace synbeats {

void BlockConfig::validate() const {
    if (num_stacks == 0 || blocks_per_stack == 0 || layers_per_block == 0 || layer_width == 0 ||
        input_dim == 0 || forecast_dim == 0) {
        throw std::invalid_argument("block configuration entries must all be positive");
    }
}

std::string_view to_string(ForecastMode mode) noexcept {
    return mode == ForecastMode::synbeats ? "synbeats" : "nbeats_only";
}

ForecastMode parse_forecast_mode(std::string_view text) {
    if (text == "synbeats") return ForecastMode::synbeats;
    if (text == "nbeats_only") return ForecastMode::nbeats_only;
    throw std::invalid_argument("unknown forecast mode '" + std::string(text) + "'");
}

SeriesScale SeriesScale::fit(const Eigen::Ref<const Eigen::VectorXd>& values) {
    SeriesScale s;
    if (values.size() == 0) return s;
    s.mean = values.mean();
    const double var = (values.array() - s.mean).square().mean();
    s.std = var > 0.0 ? std::sqrt(var) : 1.0;
    return s;
}

ForecastModel make_model(const BlockConfig& config, std::size_t n_lag, ForecastMode mode, std::uint64_t seed) {
    config.validate();
    ForecastModel model;
    model.config = config;
    model.n_lag = n_lag;
    model.mode = mode;
    model.seed = seed;
    SplitMix64 rng(seed);
    model.blocks.resize(config.num_blocks());
    for (auto& block : model.blocks) {
        std::vector<nn::DenseLayer> trunk;
        std::size_t in = config.input_dim;
        for (std::size_t l = 0; l < config.layers_per_block; ++l) {
            trunk.emplace_back(in, config.layer_width, nn::Activation::relu);
            nn::glorot_uniform(trunk.back(), rng);
            in = config.layer_width;
        }
        block.trunk = nn::Sequential(std::move(trunk));
        block.forecast_head = nn::DenseLayer(config.layer_width, config.forecast_dim, nn::Activation::identity);
        nn::glorot_uniform(block.forecast_head, rng);
        block.backcast_head = nn::DenseLayer(config.layer_width, config.input_dim, nn::Activation::identity);
        nn::glorot_uniform(block.backcast_head, rng);
    }
    return model;
}

ForwardTrace nbeats_forward(const ForecastModel& model, const Eigen::VectorXd& input) {
    if (static_cast<std::size_t>(input.size()) != model.config.input_dim) {
        throw std::invalid_argument("model expects input of length " + std::to_string(model.config.input_dim) +
                                    ", got " + std::to_string(input.size()));
    }
    ForwardTrace trace;
    trace.forecast = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.config.forecast_dim));
    trace.residuals.reserve(model.blocks.size() + 1);
    trace.block_forecasts.reserve(model.blocks.size());
    trace.residuals.push_back(input);
    for (const auto& block : model.blocks) {
        const Eigen::VectorXd h = block.trunk.forward(trace.residuals.back());
        Eigen::VectorXd y = nn::forward(block.forecast_head, h);
        const Eigen::VectorXd xhat = nn::forward(block.backcast_head, h);
        trace.forecast += y;
        trace.block_forecasts.push_back(std::move(y));
        trace.residuals.push_back(trace.residuals.back() - xhat);
    }
    return trace;
}

Eigen::MatrixXd nbeats_forward_batch(const ForecastModel& model, const Eigen::MatrixXd& inputs) {
    if (static_cast<std::size_t>(inputs.rows()) != model.config.input_dim) {
        throw std::invalid_argument("model input dimension mismatch");
    }
    Eigen::MatrixXd x = inputs;
    Eigen::MatrixXd forecast = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.config.forecast_dim), inputs.cols());
    for (const auto& block : model.blocks) {
        const Eigen::MatrixXd h = block.trunk.forward(x);
        forecast += nn::forward_batch(block.forecast_head, h);
        x -= nn::forward_batch(block.backcast_head, h);
    }
    return forecast;
}

Eigen::VectorXd model_input(const ForecastModel& model, const PanelView& view, std::size_t column,
                            const std::vector<double>& lags) {
    if (lags.size() != model.n_lag) throw std::invalid_argument("lag count does not match the model");
    Eigen::VectorXd x(static_cast<Eigen::Index>(model.config.input_dim));
    Eigen::Index k = 0;
    for (double v : lags) x(k++) = model.normalization.treated.normalize(v);
    if (model.mode == ForecastMode::synbeats) {
        const auto ctrl = view.control_units();
        if (ctrl.size() != model.normalization.controls.size()) {
            throw std::invalid_argument("panel has " + std::to_string(ctrl.size()) + " controls but the model was fit on " +
                                        std::to_string(model.normalization.controls.size()));
        }
        for (std::size_t c = 0; c < ctrl.size(); ++c) {
            x(k++) = model.normalization.controls[c].normalize(view.at(ctrl[c], column));
        }
    }
    return x;
}

namespace {

void push_layer(std::vector<nn::ParamBlock>& params, nn::DenseLayer& layer, const nn::LayerGradient& grad,
                std::size_t index) {
    params.push_back({std::span<double>(layer.weights.data(), static_cast<std::size_t>(layer.weights.size())),
                      std::span<const double>(grad.weights.data(), static_cast<std::size_t>(grad.weights.size())),
                      index});
    params.push_back({std::span<double>(layer.biases.data(), static_cast<std::size_t>(layer.biases.size())),
                      std::span<const double>(grad.biases.data(), static_cast<std::size_t>(grad.biases.size())),
                      index});
}

struct Workspace {
    std::vector<nn::Tape> tapes;
    std::vector<Eigen::MatrixXd> hidden;
};

void resize_gradients(const ForecastModel& model, std::vector<BlockGradient>& grads) {
    grads.resize(model.blocks.size());
    for (std::size_t b = 0; b < grads.size(); ++b) {
        const auto& block = model.blocks[b];
        auto& g = grads[b];
        g.trunk.resize(block.trunk.layers().size());
        for (std::size_t l = 0; l < g.trunk.size(); ++l) g.trunk[l].resize_like(block.trunk.layers()[l]);
        g.forecast.resize_like(block.forecast_head);
        g.backcast.resize_like(block.backcast_head);
    }
}

double loss_and_gradient_impl(const ForecastModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                              std::vector<BlockGradient>& grads, Workspace& ws) {
    const std::size_t nblocks = model.blocks.size();
    const Eigen::Index batch = inputs.cols();
    ws.tapes.resize(nblocks);
    ws.hidden.resize(nblocks);

    Eigen::MatrixXd x = inputs;
    Eigen::MatrixXd forecast = Eigen::MatrixXd::Zero(targets.rows(), batch);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const auto& block = model.blocks[b];
        ws.hidden[b] = block.trunk.forward(x, ws.tapes[b]);
        forecast += nn::forward_batch(block.forecast_head, ws.hidden[b]);
        x -= nn::forward_batch(block.backcast_head, ws.hidden[b]);
    }
    const Eigen::MatrixXd diff = forecast - targets;
    const double loss = diff.squaredNorm() / static_cast<double>(diff.size());
    if (!std::isfinite(loss)) return loss;

    const Eigen::MatrixXd grad_forecast = diff * (2.0 / static_cast<double>(diff.size()));
    Eigen::MatrixXd grad_x = Eigen::MatrixXd::Zero(inputs.rows(), batch);
    const Eigen::MatrixXd no_pre; // identity heads need no pre-activation
    for (std::size_t b = nblocks; b-- > 0;) {
        const auto& block = model.blocks[b];
        auto& g = grads[b];
        // x_{b+1} = x_b - xhat_b, so dJ/dxhat_b = -dJ/dx_{b+1}.
        const Eigen::MatrixXd grad_xhat = -grad_x;
        // Each parameter feeds exactly one term, so gradients are overwritten, not accumulated.
        Eigen::MatrixXd grad_h = nn::backward_batch(block.forecast_head, ws.hidden[b], no_pre, grad_forecast, g.forecast, false);
        grad_h += nn::backward_batch(block.backcast_head, ws.hidden[b], no_pre, grad_xhat, g.backcast, false);
        grad_x += block.trunk.backward(ws.tapes[b], grad_h, g.trunk, false);
    }
    return loss;
}

} // namespace

double loss_and_gradient(const ForecastModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         std::vector<BlockGradient>& grads) {
    if (static_cast<std::size_t>(inputs.rows()) != model.config.input_dim) {
        throw std::invalid_argument("model input dimension mismatch");
    }
    if (targets.cols() != inputs.cols() || static_cast<std::size_t>(targets.rows()) != model.config.forecast_dim) {
        throw std::invalid_argument("targets must be forecast_dim x batch");
    }
    if (inputs.cols() == 0) throw std::invalid_argument("empty batch");
    resize_gradients(model, grads);
    Workspace ws;
    return loss_and_gradient_impl(model, inputs, targets, grads, ws);
}

ForecastModel fit(const PanelView& view, const FitOptions& options) {
    const auto windows = build_windows(view, options.n_lag);
    if (windows.size() < 2) {
        throw std::invalid_argument("training needs at least 2 windows, got " + std::to_string(windows.size()));
    }
    const bool with_controls = options.mode == ForecastMode::synbeats;
    const auto ctrl = view.control_units();
    const std::size_t t0 = view.pre_periods();

    BlockConfig config = options.config;
    config.input_dim = options.n_lag + (with_controls ? ctrl.size() : 0);
    ForecastModel model = make_model(config, options.n_lag, options.mode, options.seed);
    model.epochs = options.epochs;
    model.learning_rate = options.learning_rate;

    model.normalization.treated = SeriesScale::fit(view.treated_pre());
    if (with_controls) {
        const Eigen::MatrixXd controls = view.controls();
        for (Eigen::Index r = 0; r < controls.rows(); ++r) {
            model.normalization.controls.push_back(
                SeriesScale::fit(controls.row(r).head(static_cast<Eigen::Index>(t0)).transpose()));
        }
    }

    const auto batch = static_cast<Eigen::Index>(windows.size());
    const auto d0 = static_cast<Eigen::Index>(config.input_dim);
    Eigen::MatrixXd inputs(d0, batch);
    Eigen::MatrixXd targets(1, batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
        const auto& w = windows[static_cast<std::size_t>(j)];
        Eigen::Index k = 0;
        for (double v : w.lagged_treated) inputs(k++, j) = model.normalization.treated.normalize(v);
        if (with_controls) {
            for (std::size_t c = 0; c < w.contemporaneous_controls.size(); ++c) {
                inputs(k++, j) = model.normalization.controls[c].normalize(w.contemporaneous_controls[c]);
            }
        }
        targets(0, j) = model.normalization.treated.normalize(w.target);
    }

    const std::size_t nblocks = model.blocks.size();
    std::vector<BlockGradient> grads;
    resize_gradients(model, grads);
    std::vector<nn::ParamBlock> params;
    std::size_t layer_index = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        auto& block = model.blocks[b];
        auto& g = grads[b];
        for (std::size_t l = 0; l < g.trunk.size(); ++l) push_layer(params, block.trunk.layers()[l], g.trunk[l], layer_index++);
        push_layer(params, block.forecast_head, g.forecast, layer_index++);
        push_layer(params, block.backcast_head, g.backcast, layer_index++);
    }
    nn::AdamOptions adam;
    adam.learning_rate = options.learning_rate;
    nn::AdamState state(params, adam);

    Workspace ws;
    model.loss_history.reserve(options.epochs);
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const double loss = loss_and_gradient_impl(model, inputs, targets, grads, ws);
        if (!std::isfinite(loss)) {
            throw std::runtime_error(fmt::format("training diverged at epoch {} (non-finite loss); "
                                                 "try a smaller learning rate than {}",
                                                 epoch + 1, options.learning_rate));
        }
        model.loss_history.push_back(loss);
        try {
            nn::adam_step(state, params);
        } catch (const nn::NonFiniteGradientError& e) {
            throw std::runtime_error(fmt::format("training diverged at epoch {} ({}); try a smaller learning rate than {}",
                                                 epoch + 1, e.what(), options.learning_rate));
        }
    }
    const Eigen::MatrixXd forecast = nbeats_forward_batch(model, inputs);
    model.final_loss = (forecast - targets).squaredNorm() / static_cast<double>(batch);
    if (!std::isfinite(model.final_loss)) {
        throw std::runtime_error(
            fmt::format("training diverged (non-finite final loss); try a smaller learning rate than {}",
                        options.learning_rate));
    }
    return model;
}

PredictionTrace predict_counterfactual_trace(const ForecastModel& model, const PanelView& view, std::size_t horizon,
                                             const PredictionAdjust& adjust) {
    const std::size_t t0 = view.pre_periods();
    if (t0 < model.n_lag) throw std::invalid_argument("panel has fewer pre-periods than the model's n_lag");
    if (t0 + horizon > view.num_periods()) {
        throw std::invalid_argument("horizon " + std::to_string(horizon) + " exceeds the " +
                                    std::to_string(view.num_periods() - t0) + " periods of control data after treatment");
    }
    const std::size_t treated = view.treated_unit();
    PredictionTrace trace;
    trace.predictions.reserve(horizon);
    for (std::size_t step = 0; step < horizon; ++step) {
        const std::size_t column = t0 + step;
        std::vector<double> lags;
        lags.reserve(model.n_lag);
        for (std::size_t s = column - model.n_lag; s < column; ++s) {
            lags.push_back(s < t0 ? view.at(treated, s) : trace.predictions[s - t0]);
        }
        const Eigen::VectorXd x = model_input(model, view, column, lags);
        const Eigen::MatrixXd z = nbeats_forward_batch(model, x);
        double prediction = model.normalization.treated.denormalize(z(0, 0));
        if (adjust) adjust(step, prediction);
        trace.predictions.push_back(prediction);
        trace.lag_inputs.push_back(std::move(lags));
    }
    return trace;
}

std::vector<double> predict_counterfactual(const ForecastModel& model, const PanelView& view, std::size_t horizon) {
    return predict_counterfactual_trace(model, view, horizon).predictions;
}

namespace {

constexpr std::string_view kMagic = "synbeats-model";
constexpr int kFormatVersion = 1;

void write_layer(std::ostream& out, const nn::DenseLayer& layer) {
    fmt::print(out, "layer {} {} {}\n", layer.weights.rows(), layer.weights.cols(),
               layer.activation == nn::Activation::relu ? "relu" : "identity");
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) fmt::print(out, "{:.17g}\n", layer.weights(i, j));
    }
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) fmt::print(out, "{:.17g}\n", layer.biases(i));
}

void expect(std::istream& in, std::string_view word) {
    std::string got;
    if (!(in >> got) || got != word) {
        throw std::runtime_error("model file: expected '" + std::string(word) + "', got '" + got + "'");
    }
}

template <typename T>
T read_value(std::istream& in, std::string_view what) {
    T v{};
    if (!(in >> v)) throw std::runtime_error("model file: cannot read " + std::string(what));
    return v;
}

nn::DenseLayer read_layer(std::istream& in) {
    expect(in, "layer");
    const auto rows = read_value<Eigen::Index>(in, "layer rows");
    const auto cols = read_value<Eigen::Index>(in, "layer cols");
    const auto act = read_value<std::string>(in, "activation");
    nn::DenseLayer layer(static_cast<std::size_t>(cols), static_cast<std::size_t>(rows),
                         act == "relu" ? nn::Activation::relu : nn::Activation::identity);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) layer.weights(i, j) = read_value<double>(in, "weight");
    }
    for (Eigen::Index i = 0; i < rows; ++i) layer.biases(i) = read_value<double>(in, "bias");
    return layer;
}

} // namespace

void save_model(const ForecastModel& model, std::ostream& out) {
    const auto& c = model.config;
    fmt::print(out, "{} {}\n", kMagic, kFormatVersion);
    fmt::print(out, "mode {}\nn_lag {}\nseed {}\nepochs {}\nlearning_rate {:.17g}\n", to_string(model.mode),
               model.n_lag, model.seed, model.epochs, model.learning_rate);
    fmt::print(out, "config {} {} {} {} {} {}\n", c.num_stacks, c.blocks_per_stack, c.layers_per_block, c.layer_width,
               c.input_dim, c.forecast_dim);
    fmt::print(out, "treated_scale {:.17g} {:.17g}\n", model.normalization.treated.mean, model.normalization.treated.std);
    fmt::print(out, "control_scales {}\n", model.normalization.controls.size());
    for (const auto& s : model.normalization.controls) fmt::print(out, "{:.17g} {:.17g}\n", s.mean, s.std);
    fmt::print(out, "final_loss {:.17g}\n", model.final_loss);
    fmt::print(out, "loss_history {}\n", model.loss_history.size());
    for (double v : model.loss_history) fmt::print(out, "{:.17g}\n", v);
    for (const auto& block : model.blocks) {
        for (const auto& layer : block.trunk.layers()) write_layer(out, layer);
        write_layer(out, block.forecast_head);
        write_layer(out, block.backcast_head);
    }
    if (!out) throw std::runtime_error("failed to write model");
}

ForecastModel load_model(std::istream& in) {
    expect(in, kMagic);
    const int version = read_value<int>(in, "format version");
    if (version != kFormatVersion) {
        throw std::runtime_error("unsupported model format version " + std::to_string(version));
    }
    ForecastModel model;
    expect(in, "mode");
    model.mode = parse_forecast_mode(read_value<std::string>(in, "mode"));
    expect(in, "n_lag");
    model.n_lag = read_value<std::size_t>(in, "n_lag");
    expect(in, "seed");
    model.seed = read_value<std::uint64_t>(in, "seed");
    expect(in, "epochs");
    model.epochs = read_value<std::size_t>(in, "epochs");
    expect(in, "learning_rate");
    model.learning_rate = read_value<double>(in, "learning_rate");
    expect(in, "config");
    auto& c = model.config;
    c.num_stacks = read_value<std::size_t>(in, "num_stacks");
    c.blocks_per_stack = read_value<std::size_t>(in, "blocks_per_stack");
    c.layers_per_block = read_value<std::size_t>(in, "layers_per_block");
    c.layer_width = read_value<std::size_t>(in, "layer_width");
    c.input_dim = read_value<std::size_t>(in, "input_dim");
    c.forecast_dim = read_value<std::size_t>(in, "forecast_dim");
    c.validate();
    expect(in, "treated_scale");
    model.normalization.treated.mean = read_value<double>(in, "scale");
    model.normalization.treated.std = read_value<double>(in, "scale");
    expect(in, "control_scales");
    const auto nscales = read_value<std::size_t>(in, "scale count");
    for (std::size_t i = 0; i < nscales; ++i) {
        SeriesScale s;
        s.mean = read_value<double>(in, "scale");
        s.std = read_value<double>(in, "scale");
        model.normalization.controls.push_back(s);
    }
    expect(in, "final_loss");
    model.final_loss = read_value<double>(in, "final_loss");
    expect(in, "loss_history");
    const auto nloss = read_value<std::size_t>(in, "loss count");
    model.loss_history.reserve(nloss);
    for (std::size_t i = 0; i < nloss; ++i) model.loss_history.push_back(read_value<double>(in, "loss"));
    model.blocks.resize(c.num_blocks());
    for (auto& block : model.blocks) {
        std::vector<nn::DenseLayer> trunk;
        for (std::size_t l = 0; l < c.layers_per_block; ++l) trunk.push_back(read_layer(in));
        block.trunk = nn::Sequential(std::move(trunk));
        block.forecast_head = read_layer(in);
        block.backcast_head = read_layer(in);
    }
    return model;
}

void save_model(const ForecastModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_model(model, out);
}

ForecastModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    return load_model(in);
}

} // namespace synbeats
