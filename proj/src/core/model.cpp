#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "error.hpp"
#include "rng.hpp"
#include "states.hpp"

namespace pressflow {

namespace {

[[noreturn]] void bad_name(const char* what, std::string_view name) {
    throw UsageError(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

double apply_activation(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Identity: return z;
    }
    std::abort();
}

// derivative expressed from the activation output (enough for all three)
double activation_grad(Activation a, double out) {
    switch (a) {
        case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - out * out;
        case Activation::Identity: return 1.0;
    }
    std::abort();
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

void check_training_data(const TrainingData& data, const NetworkConfig& config) {
    if (data.x.rows == 0) throw DataError("training data is empty");
    if (data.x.rows != data.t.rows) {
        throw DataError("input and target row counts differ (" + std::to_string(data.x.rows) +
                        " vs " + std::to_string(data.t.rows) + ")");
    }
    if (data.x.cols != static_cast<size_t>(config.input_width()) ||
        data.t.cols != static_cast<size_t>(config.output_width())) {
        throw DataError("dataset width (" + std::to_string(data.x.cols) + " -> " +
                        std::to_string(data.t.cols) + ") does not match layer sizes (" +
                        std::to_string(config.input_width()) + " -> " +
                        std::to_string(config.output_width()) + ")");
    }
    if (!all_finite(data.x) || !all_finite(data.t)) {
        throw DataError("training data contains non-finite values");
    }
}

// Optimizer scratch, same shapes as the parameters.
struct OptState {
    std::vector<Layer> m;
    std::vector<Layer> v;
};

OptState make_opt_state(const ModelParams& params) {
    OptState s;
    for (const auto& layer : params.layers) {
        Layer zero;
        zero.weights = Matrix(layer.weights.rows, layer.weights.cols);
        zero.bias.assign(layer.bias.size(), 0.0);
        s.m.push_back(zero);
        s.v.push_back(std::move(zero));
    }
    return s;
}

void optimizer_step(ModelParams& params, const ModelParams& grads, OptState& state,
                    const NetworkConfig& config, int step) {
    const double lr = config.learning_rate;
    if (config.optimizer == Optimizer::Sgd) {
        for (size_t l = 0; l < params.layers.size(); ++l) {
            auto& layer = params.layers[l];
            const auto& g = grads.layers[l];
            for (size_t i = 0; i < layer.weights.data.size(); ++i) {
                layer.weights.data[i] -= lr * g.weights.data[i];
            }
            for (size_t i = 0; i < layer.bias.size(); ++i) {
                layer.bias[i] -= lr * g.bias[i];
            }
        }
        return;
    }

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    const double bc1 = 1.0 - std::pow(kBeta1, step);
    const double bc2 = 1.0 - std::pow(kBeta2, step);
    auto update = [&](double& theta, double g, double& m, double& v) {
        m = kBeta1 * m + (1.0 - kBeta1) * g;
        v = kBeta2 * v + (1.0 - kBeta2) * g * g;
        theta -= lr * (m / bc1) / (std::sqrt(v / bc2) + kEps);
    };
    for (size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const auto& g = grads.layers[l];
        auto& m = state.m[l];
        auto& v = state.v[l];
        for (size_t i = 0; i < layer.weights.data.size(); ++i) {
            update(layer.weights.data[i], g.weights.data[i], m.weights.data[i], v.weights.data[i]);
        }
        for (size_t i = 0; i < layer.bias.size(); ++i) {
            update(layer.bias[i], g.bias[i], m.bias[i], v.bias[i]);
        }
    }
}

// forward keeping every layer's output for the backward pass
std::vector<Matrix> forward_collect(const ModelParams& params, const Matrix& x,
                                    Activation activation) {
    std::vector<Matrix> outs;
    outs.reserve(params.layers.size() + 1);
    outs.push_back(x);
    for (size_t l = 0; l < params.layers.size(); ++l) {
        const Layer& layer = params.layers[l];
        Matrix z = matmul_nt(outs.back(), layer.weights);
        const bool last = (l + 1 == params.layers.size());
        for (size_t r = 0; r < z.rows; ++r) {
            for (size_t c = 0; c < z.cols; ++c) {
                double v = z.at(r, c) + layer.bias[c];
                z.at(r, c) = last ? v : apply_activation(activation, v);
            }
        }
        outs.push_back(std::move(z));
    }
    return outs;
}

} // namespace

Activation activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    bad_name("activation", name);
}

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    std::abort();
}

Optimizer optimizer_from_name(std::string_view name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "sgd") return Optimizer::Sgd;
    bad_name("optimizer", name);
}

std::string_view optimizer_name(Optimizer o) {
    return o == Optimizer::Adam ? "adam" : "sgd";
}

LossKind loss_from_name(std::string_view name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "mae") return LossKind::Mae;
    bad_name("loss", name);
}

std::string_view loss_name(LossKind l) {
    return l == LossKind::Mse ? "mse" : "mae";
}

DatasetMode mode_from_name(std::string_view name) {
    if (name == "vector") return DatasetMode::Vector;
    if (name == "pairwise") return DatasetMode::Pairwise;
    bad_name("mode", name);
}

std::string_view mode_name(DatasetMode m) {
    return m == DatasetMode::Vector ? "vector" : "pairwise";
}

ModelKind kind_from_name(std::string_view name) {
    if (name == "network") return ModelKind::Network;
    if (name == "logistic") return ModelKind::Logistic;
    bad_name("model kind", name);
}

std::string_view kind_name(ModelKind k) {
    return k == ModelKind::Network ? "network" : "logistic";
}

void NetworkConfig::validate() const {
    if (layer_sizes.size() < 2) {
        throw UsageError("layer sizes need at least an input and an output width");
    }
    for (int w : layer_sizes) {
        if (w <= 0) throw UsageError("layer sizes must be positive");
    }
    if (epochs <= 0) throw UsageError("epochs must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw UsageError("learning rate must be a positive number");
    }
    if (!(split_fraction > 0.0) || !(split_fraction < 1.0)) {
        throw UsageError("split fraction must be strictly between 0 and 1");
    }
}

size_t ModelParams::parameter_count() const {
    size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.data.size() + layer.bias.size();
    return n;
}

Scaler Scaler::fit(const Matrix& x, const Matrix& t) {
    auto fit_columns = [](const Matrix& m, std::vector<double>& mean, std::vector<double>& scale,
                          std::vector<int>& degenerate) {
        mean.assign(m.cols, 0.0);
        scale.assign(m.cols, 1.0);
        for (size_t c = 0; c < m.cols; ++c) {
            double sum = 0.0;
            for (size_t r = 0; r < m.rows; ++r) sum += m.at(r, c);
            mean[c] = sum / static_cast<double>(m.rows);
            double var = 0.0;
            for (size_t r = 0; r < m.rows; ++r) {
                const double d = m.at(r, c) - mean[c];
                var += d * d;
            }
            const double sd = std::sqrt(var / static_cast<double>(m.rows));
            if (sd < 1e-12) {
                scale[c] = 1.0;
                degenerate.push_back(static_cast<int>(c));
            } else {
                scale[c] = sd;
            }
        }
    };
    if (x.rows == 0 || t.rows == 0) throw DataError("cannot fit a scaler on empty data");
    Scaler s;
    fit_columns(x, s.in_mean, s.in_scale, s.in_degenerate);
    fit_columns(t, s.out_mean, s.out_scale, s.out_degenerate);
    return s;
}

namespace {

Matrix apply_scale(const Matrix& m, const std::vector<double>& mean,
                   const std::vector<double>& scale, bool inverse) {
    if (m.cols != mean.size()) {
        throw DataError("scaler width " + std::to_string(mean.size()) +
                        " does not match data width " + std::to_string(m.cols));
    }
    Matrix out(m.rows, m.cols);
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t c = 0; c < m.cols; ++c) {
            out.at(r, c) = inverse ? m.at(r, c) * scale[c] + mean[c]
                                   : (m.at(r, c) - mean[c]) / scale[c];
        }
    }
    return out;
}

} // namespace

Matrix Scaler::transform_in(const Matrix& x) const { return apply_scale(x, in_mean, in_scale, false); }
Matrix Scaler::transform_out(const Matrix& t) const { return apply_scale(t, out_mean, out_scale, false); }
Matrix Scaler::inverse_out(const Matrix& t) const { return apply_scale(t, out_mean, out_scale, true); }

TrainingData training_data_from_vector_rows(const std::vector<VectorRow>& rows) {
    if (rows.empty()) throw DataError("vector dataset is empty");
    TrainingData data;
    data.x = Matrix(rows.size(), kStateCount);
    data.t = Matrix(rows.size(), kStateCount);
    for (size_t r = 0; r < rows.size(); ++r) {
        for (int s = 0; s < kStateCount; ++s) {
            data.x.at(r, static_cast<size_t>(s)) = rows[r].sentiment[static_cast<size_t>(s)];
            data.t.at(r, static_cast<size_t>(s)) = rows[r].target[static_cast<size_t>(s)];
        }
    }
    return data;
}

TrainingData training_data_from_pairwise(const std::vector<PairwiseRow>& rows) {
    if (rows.empty()) throw DataError("pairwise dataset is empty");
    TrainingData data;
    data.x = Matrix(rows.size(), 1);
    data.t = Matrix(rows.size(), 1);
    for (size_t r = 0; r < rows.size(); ++r) {
        data.x.at(r, 0) = rows[r].sentiment_delta;
        data.t.at(r, 0) = rows[r].flow;
    }
    return data;
}

ModelParams init_params(const NetworkConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.seed, "init"));
    ModelParams params;
    for (size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
        const size_t fan_in = static_cast<size_t>(config.layer_sizes[l]);
        const size_t fan_out = static_cast<size_t>(config.layer_sizes[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weights = Matrix(fan_out, fan_in);
        for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
        layer.bias.assign(fan_out, 0.0);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

Matrix forward(const ModelParams& params, const Matrix& x, Activation activation) {
    if (params.layers.empty()) throw DataError("model has no layers");
    if (x.cols != params.layers.front().weights.cols) {
        throw DataError("input width " + std::to_string(x.cols) + " does not match model width " +
                        std::to_string(params.layers.front().weights.cols));
    }
    if (!all_finite(x)) throw DataError("non-finite input to forward pass");
    return forward_collect(params, x, activation).back();
}

LossGrad loss_and_grad(const ModelParams& params, const Matrix& x, const Matrix& t,
                       Activation activation, LossKind loss) {
    if (x.rows == 0) throw DataError("empty batch");
    if (x.rows != t.rows || params.layers.empty() ||
        t.cols != params.layers.back().weights.rows) {
        throw DataError("batch shapes do not match the model");
    }
    const auto outs = forward_collect(params, x, activation);
    const Matrix& y = outs.back();
    const double denom = static_cast<double>(y.rows) * static_cast<double>(y.cols);

    double total = 0.0;
    Matrix dz(y.rows, y.cols);
    for (size_t i = 0; i < y.data.size(); ++i) {
        const double r = y.data[i] - t.data[i];
        if (loss == LossKind::Mse) {
            total += r * r;
            dz.data[i] = 2.0 * r / denom;
        } else {
            total += std::fabs(r);
            dz.data[i] = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) / denom;
        }
    }

    LossGrad out;
    out.loss = total / denom;
    out.grads.layers.resize(params.layers.size());
    for (size_t l = params.layers.size(); l-- > 0;) {
        const Matrix& a_prev = outs[l];
        Layer& g = out.grads.layers[l];
        g.weights = matmul_tn(dz, a_prev);
        g.bias.assign(dz.cols, 0.0);
        for (size_t r = 0; r < dz.rows; ++r) {
            for (size_t c = 0; c < dz.cols; ++c) g.bias[c] += dz.at(r, c);
        }
        if (l == 0) break;
        Matrix da = matmul(dz, params.layers[l].weights);
        const Matrix& a = outs[l]; // post-activation output of layer l-1
        for (size_t i = 0; i < da.data.size(); ++i) {
            da.data[i] *= activation_grad(activation, a.data[i]);
        }
        dz = std::move(da);
    }
    return out;
}

ModelCheckpoint train_network(const TrainingData& data, const NetworkConfig& config,
                              const std::string& dataset_fingerprint) {
    config.validate();
    check_training_data(data, config);

    ModelCheckpoint ckpt;
    ckpt.kind = ModelKind::Network;
    ckpt.config = config;
    ckpt.scaler = Scaler::fit(data.x, data.t);
    ckpt.dataset_fingerprint = dataset_fingerprint;

    const Matrix xs = ckpt.scaler.transform_in(data.x);
    const Matrix ts = ckpt.scaler.transform_out(data.t);

    ModelParams params = init_params(config);
    OptState opt = make_opt_state(params);
    ckpt.loss_trace.reserve(static_cast<size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        LossGrad lg = loss_and_grad(params, xs, ts, config.activation, config.loss);
        if (!std::isfinite(lg.loss)) {
            throw DataError("non-finite loss at epoch " + std::to_string(epoch) +
                            " (training diverged; reduce the learning rate)");
        }
        ckpt.loss_trace.push_back(lg.loss);
        optimizer_step(params, lg.grads, opt, config, epoch + 1);
    }
    ckpt.params = std::move(params);
    return ckpt;
}

Matrix predict(const ModelCheckpoint& ckpt, const Matrix& x, bool clamp_nonnegative) {
    if (x.rows == 0) throw DataError("empty prediction input");
    if (!all_finite(x)) throw DataError("non-finite prediction input");

    if (ckpt.kind == ModelKind::Logistic) {
        if (x.cols != 1) {
            throw DataError("logistic baseline expects one input column, got " +
                            std::to_string(x.cols));
        }
        const double w = ckpt.params.layers.at(0).weights.at(0, 0);
        const double b = ckpt.params.layers.at(0).bias.at(0);
        Matrix out(x.rows, 1);
        for (size_t r = 0; r < x.rows; ++r) out.at(r, 0) = sigmoid(w * x.at(r, 0) + b);
        return out;
    }

    if (x.cols != static_cast<size_t>(ckpt.config.input_width())) {
        throw DataError("input width " + std::to_string(x.cols) +
                        " does not match checkpoint width " +
                        std::to_string(ckpt.config.input_width()));
    }
    const Matrix xs = ckpt.scaler.transform_in(x);
    const Matrix ys = forward(ckpt.params, xs, ckpt.config.activation);
    Matrix out = ckpt.scaler.inverse_out(ys);
    if (clamp_nonnegative) {
        for (double& v : out.data) v = std::max(0.0, v);
    }
    return out;
}

ModelCheckpoint fit_logistic_baseline(const std::vector<PairwiseRow>& rows,
                                      const NetworkConfig& config,
                                      const std::string& dataset_fingerprint) {
    config.validate();
    if (rows.size() < 2) throw DataError("logistic baseline needs at least two rows");

    std::vector<double> flows;
    flows.reserve(rows.size());
    for (const auto& r : rows) flows.push_back(r.flow);
    std::sort(flows.begin(), flows.end());
    const size_t n = flows.size();
    const double median =
        (n % 2 == 1) ? flows[n / 2] : 0.5 * (flows[n / 2 - 1] + flows[n / 2]);

    std::vector<double> deltas(rows.size());
    std::vector<double> labels(rows.size());
    size_t positives = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        deltas[i] = rows[i].sentiment_delta;
        labels[i] = rows[i].flow > median ? 1.0 : 0.0;
        positives += labels[i] > 0.5 ? 1 : 0;
    }
    if (positives == 0 || positives == rows.size()) {
        throw DataError("logistic baseline needs both classes; flow > median(" +
                        std::to_string(median) + ") labeled " + std::to_string(positives) +
                        " of " + std::to_string(rows.size()) + " rows positive");
    }

    // plain full-batch descent keeps the convex non-increasing-loss contract
    double w = 0.0, b = 0.0;
    std::vector<double> trace;
    trace.reserve(static_cast<size_t>(config.epochs));
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = 0.0, gw = 0.0, gb = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const double z = w * deltas[i] + b;
            loss += softplus(z) - labels[i] * z;
            const double err = sigmoid(z) - labels[i];
            gw += err * deltas[i];
            gb += err;
        }
        loss *= inv_n;
        if (!std::isfinite(loss)) {
            throw DataError("non-finite log-loss at epoch " + std::to_string(epoch));
        }
        trace.push_back(loss);
        w -= config.learning_rate * gw * inv_n;
        b -= config.learning_rate * gb * inv_n;
    }

    ModelCheckpoint ckpt;
    ckpt.kind = ModelKind::Logistic;
    ckpt.config = config;
    ckpt.config.layer_sizes = {1, 1};
    ckpt.config.mode = DatasetMode::Pairwise;
    Layer unit;
    unit.weights = Matrix(1, 1);
    unit.weights.at(0, 0) = w;
    unit.bias.assign(1, b);
    ckpt.params.layers.push_back(std::move(unit));
    ckpt.scaler.in_mean = {0.0};
    ckpt.scaler.in_scale = {1.0};
    ckpt.scaler.out_mean = {0.0};
    ckpt.scaler.out_scale = {1.0};
    ckpt.loss_trace = std::move(trace);
    ckpt.threshold = median;
    ckpt.dataset_fingerprint = dataset_fingerprint;
    return ckpt;
}

namespace {

// flat coordinate -> a specific weight or bias cell
double* param_cell(ModelParams& params, size_t flat) {
    for (auto& layer : params.layers) {
        if (flat < layer.weights.data.size()) return &layer.weights.data[flat];
        flat -= layer.weights.data.size();
        if (flat < layer.bias.size()) return &layer.bias[flat];
        flat -= layer.bias.size();
    }
    throw DataError("parameter index out of range");
}

std::vector<double> flatten_params(const ModelParams& params) {
    std::vector<double> out;
    out.reserve(params.parameter_count());
    for (const auto& layer : params.layers) {
        out.insert(out.end(), layer.weights.data.begin(), layer.weights.data.end());
        out.insert(out.end(), layer.bias.begin(), layer.bias.end());
    }
    return out;
}

double loss_value(const ModelParams& params, const Matrix& x, const Matrix& t,
                  Activation activation, LossKind loss) {
    const Matrix y = forward(params, x, activation);
    double total = 0.0;
    for (size_t i = 0; i < y.data.size(); ++i) {
        const double r = y.data[i] - t.data[i];
        total += loss == LossKind::Mse ? r * r : std::fabs(r);
    }
    return total / (static_cast<double>(y.rows) * static_cast<double>(y.cols));
}

// smallest |pre-activation| over the hidden layers; relu probes must stay
// clear of the kink or central differences straddle it
double min_hidden_margin(const ModelParams& params, const Matrix& x, Activation activation) {
    double margin = std::numeric_limits<double>::infinity();
    Matrix a = x;
    for (size_t l = 0; l + 1 < params.layers.size(); ++l) {
        const Layer& layer = params.layers[l];
        Matrix z = matmul_nt(a, layer.weights);
        for (size_t r = 0; r < z.rows; ++r) {
            for (size_t c = 0; c < z.cols; ++c) {
                const double v = z.at(r, c) + layer.bias[c];
                margin = std::min(margin, std::fabs(v));
                z.at(r, c) = apply_activation(activation, v);
            }
        }
        a = std::move(z);
    }
    return margin;
}

} // namespace

double grad_check(const NetworkConfig& config, int trials, double h, bool zero_params) {
    config.validate();
    if (trials < 1) throw UsageError("grad_check needs at least one trial");
    if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");

    Rng rng(derive_seed(config.seed, "grad_check"));
    const size_t batch = 4;
    const size_t d_in = static_cast<size_t>(config.input_width());
    const size_t d_out = static_cast<size_t>(config.output_width());

    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        ModelParams params;
        for (size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
            const size_t fan_in = static_cast<size_t>(config.layer_sizes[l]);
            const size_t fan_out = static_cast<size_t>(config.layer_sizes[l + 1]);
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            Layer layer;
            layer.weights = Matrix(fan_out, fan_in);
            layer.bias.assign(fan_out, 0.0);
            if (!zero_params) {
                for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
                for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
            }
            params.layers.push_back(std::move(layer));
        }

        Matrix x(batch, d_in), t(batch, d_out);
        for (int attempt = 0; attempt < 200; ++attempt) {
            for (double& v : x.data) v = rng.normal();
            for (double& v : t.data) v = rng.normal();
            if (config.activation != Activation::Relu || zero_params) break;
            if (min_hidden_margin(params, x, config.activation) > 1e-3) break;
        }

        const LossGrad analytic = loss_and_grad(params, x, t, config.activation, config.loss);
        const std::vector<double> flat_grads = flatten_params(analytic.grads);
        const size_t total = flat_grads.size();
        const size_t probes = std::min<size_t>(total, 200);

        for (size_t p = 0; p < probes; ++p) {
            const size_t flat = rng.uniform_index(total);
            double* cell = param_cell(params, flat);
            const double saved = *cell;
            *cell = saved + h;
            const double plus = loss_value(params, x, t, config.activation, config.loss);
            *cell = saved - h;
            const double minus = loss_value(params, x, t, config.activation, config.loss);
            *cell = saved;

            const double numeric = (plus - minus) / (2.0 * h);
            const double exact = flat_grads[flat];
            // both effectively zero: central differences carry no signal there,
            // the comparison is all rounding noise
            if (std::fabs(exact) < 1e-5 && std::fabs(numeric) < 1e-5) continue;
            const double rel = std::fabs(exact - numeric) /
                               std::max({std::fabs(exact), std::fabs(numeric), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace pressflow
