#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "matrix.hpp"

namespace pressflow {

enum class Activation { Relu, Tanh, Identity };
enum class Optimizer { Adam, Sgd };
enum class LossKind { Mse, Mae };
enum class DatasetMode { Vector, Pairwise };
enum class ModelKind { Network, Logistic };

Activation activation_from_name(std::string_view name);
std::string_view activation_name(Activation a);
Optimizer optimizer_from_name(std::string_view name);
std::string_view optimizer_name(Optimizer o);
LossKind loss_from_name(std::string_view name);
std::string_view loss_name(LossKind l);
DatasetMode mode_from_name(std::string_view name);
std::string_view mode_name(DatasetMode m);
ModelKind kind_from_name(std::string_view name);
std::string_view kind_name(ModelKind k);

// layer_sizes is the width chain including input and output, so the default
// {50, 64, 64, 50} yields three weight matrices. Hidden transitions get the
// activation; the last transition is linear so negative predictions stay
// representable. Chains other than length 4 are accepted (tests use tiny
// degenerate nets) but the dataset width must match both ends.
struct NetworkConfig {
    std::vector<int> layer_sizes{50, 64, 64, 50};
    Activation activation = Activation::Relu;
    LossKind loss = LossKind::Mse;
    Optimizer optimizer = Optimizer::Adam;
    int epochs = 2000;
    double learning_rate = 1e-3;
    uint64_t seed = 42;
    DatasetMode mode = DatasetMode::Vector;
    double split_fraction = 0.8;

    void validate() const; // throws UsageError
    int input_width() const { return layer_sizes.front(); }
    int output_width() const { return layer_sizes.back(); }
};

// weights are (out x in) row-major, one bias per output unit
struct Layer {
    Matrix weights;
    std::vector<double> bias;
};

struct ModelParams {
    std::vector<Layer> layers;

    size_t parameter_count() const;
};

// Per-dimension standardization fitted on the training split. Constant
// dimensions keep scale 1 and are listed as degenerate.
struct Scaler {
    std::vector<double> in_mean, in_scale;
    std::vector<double> out_mean, out_scale;
    std::vector<int> in_degenerate, out_degenerate;

    static Scaler fit(const Matrix& x, const Matrix& t);
    Matrix transform_in(const Matrix& x) const;
    Matrix transform_out(const Matrix& t) const;
    Matrix inverse_out(const Matrix& t) const;
};

struct ModelCheckpoint {
    ModelKind kind = ModelKind::Network;
    NetworkConfig config;
    ModelParams params;
    Scaler scaler;
    std::vector<double> loss_trace;
    double threshold = 0.0; // logistic only: median training flow
    std::string dataset_fingerprint;
};

// Numeric training set: one sample per row.
struct TrainingData {
    Matrix x;
    Matrix t;
};

TrainingData training_data_from_vector_rows(const std::vector<VectorRow>& rows);
// pairwise: x = sentiment_delta (n x 1), t = flow (n x 1)
TrainingData training_data_from_pairwise(const std::vector<PairwiseRow>& rows);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic per seed.
ModelParams init_params(const NetworkConfig& config);

// batch forward: x is (n x input_width) -> (n x output_width)
Matrix forward(const ModelParams& params, const Matrix& x, Activation activation);

struct LossGrad {
    double loss = 0.0;
    ModelParams grads; // same shapes as the params
};

// loss is the mean over batch and output dimensions (squared or absolute
// error); gradients by reverse-mode accumulation.
LossGrad loss_and_grad(const ModelParams& params, const Matrix& x, const Matrix& t,
                       Activation activation, LossKind loss);

// Standardizes with a fitted Scaler, then full-batch descent for
// config.epochs. trace[i] is the loss the i-th step was computed from, so
// trace.front() is the untrained loss. Non-finite loss aborts with the epoch.
ModelCheckpoint train_network(const TrainingData& data, const NetworkConfig& config,
                              const std::string& dataset_fingerprint);

// input scaling -> forward -> inverse target scaling. For logistic
// checkpoints the output column holds probabilities and no clamp applies.
Matrix predict(const ModelCheckpoint& ckpt, const Matrix& x, bool clamp_nonnegative = false);

// Single logistic unit p(flow above median | sentiment_delta), plain
// full-batch gradient descent on mean log-loss (the convexity contract is
// stated for a fixed step, so the adaptive optimizer is not used here).
// threshold holds the median; labels are flow > threshold.
ModelCheckpoint fit_logistic_baseline(const std::vector<PairwiseRow>& rows,
                                      const NetworkConfig& config,
                                      const std::string& dataset_fingerprint);

// Worst relative deviation between analytic and central finite-difference
// gradients over `trials` random (params, batch) draws, probing a seeded
// subset of coordinates per trial. Relative error uses
// max(|analytic|, |numeric|, 1e-8) denominators; coordinates where both
// sides are below 1e-5 are skipped (dead paths compare rounding noise, and a
// genuinely wrong gradient shows up on the live side). zero_params swaps the
// random parameter draw for all-zeros.
double grad_check(const NetworkConfig& config, int trials, double h = 1e-5,
                  bool zero_params = false);

} // namespace pressflow
