#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"

using namespace pressflow;

namespace {

NetworkConfig small_config() {
    NetworkConfig c;
    c.layer_sizes = {5, 8, 8, 3};
    c.epochs = 10;
    c.seed = 7;
    return c;
}

Matrix random_inputs(size_t rows, size_t cols, uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

// identity checkpoint: one linear layer, unit weights on the diagonal
ModelCheckpoint identity_checkpoint(int width) {
    ModelCheckpoint ckpt;
    ckpt.kind = ModelKind::Network;
    ckpt.config.layer_sizes = {width, width};
    ckpt.config.activation = Activation::Identity;
    ckpt.config.epochs = 1;
    Layer layer;
    layer.weights = Matrix(static_cast<size_t>(width), static_cast<size_t>(width));
    for (int i = 0; i < width; ++i) layer.weights.at(i, i) = 1.0;
    layer.bias.assign(static_cast<size_t>(width), 0.0);
    ckpt.params.layers.push_back(std::move(layer));
    ckpt.scaler.in_mean.assign(static_cast<size_t>(width), 0.0);
    ckpt.scaler.in_scale.assign(static_cast<size_t>(width), 1.0);
    ckpt.scaler.out_mean.assign(static_cast<size_t>(width), 0.0);
    ckpt.scaler.out_scale.assign(static_cast<size_t>(width), 1.0);
    ckpt.loss_trace = {0.0};
    ckpt.dataset_fingerprint.assign(64, 'a');
    return ckpt;
}

} // namespace

TEST_CASE("init_params is deterministic with zero biases and stated bounds") {
    NetworkConfig config; // default 50-64-64-50
    ModelParams a = init_params(config);
    ModelParams b = init_params(config);
    REQUIRE(a.layers.size() == 3);
    CHECK(a.parameter_count() == 10674);

    for (size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].weights.data == b.layers[l].weights.data);
        for (double bias : a.layers[l].bias) CHECK(bias == 0.0);
    }

    config.seed = 43;
    ModelParams c = init_params(config);
    CHECK(a.layers[0].weights.data != c.layers[0].weights.data);

    // layer (50 -> 64): every draw inside +/- sqrt(6/114), range actually used
    const double bound = std::sqrt(6.0 / 114.0);
    double hi = 0.0;
    size_t sampled = 0;
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        config.seed = seed;
        ModelParams p = init_params(config);
        for (double w : p.layers[0].weights.data) {
            CHECK(std::fabs(w) <= bound);
            hi = std::max(hi, std::fabs(w));
            ++sampled;
        }
    }
    CHECK(sampled >= 10000);
    CHECK(hi > 0.95 * bound);
}

TEST_CASE("forward with zero weights returns the output bias") {
    ModelParams params;
    Layer l1{Matrix(4, 3), std::vector<double>(4, 0.0)};
    Layer l2{Matrix(2, 4), {1.5, -2.5}};
    params.layers = {l1, l2};

    Matrix x = random_inputs(6, 3, 5);
    Matrix y = forward(params, x, Activation::Relu);
    REQUIRE(y.rows == 6);
    REQUIRE(y.cols == 2);
    for (size_t r = 0; r < y.rows; ++r) {
        CHECK(y.at(r, 0) == 1.5);
        CHECK(y.at(r, 1) == -2.5);
    }
}

TEST_CASE("single identity layer reproduces its input") {
    ModelCheckpoint ckpt = identity_checkpoint(3);
    Matrix x = random_inputs(5, 3, 8);
    Matrix y = forward(ckpt.params, x, Activation::Identity);
    for (size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == x.data[i]);
}

TEST_CASE("forward matches a hand-rolled pass") {
    NetworkConfig config = small_config();
    ModelParams params = init_params(config);
    Matrix x = random_inputs(4, 5, 21);
    Matrix y = forward(params, x, Activation::Relu);

    for (size_t r = 0; r < x.rows; ++r) {
        std::vector<double> a(x.data.begin() + static_cast<long>(r * x.cols),
                              x.data.begin() + static_cast<long>((r + 1) * x.cols));
        for (size_t l = 0; l < params.layers.size(); ++l) {
            const Layer& layer = params.layers[l];
            std::vector<double> z(layer.weights.rows, 0.0);
            for (size_t i = 0; i < layer.weights.rows; ++i) {
                double acc = layer.bias[i];
                for (size_t k = 0; k < layer.weights.cols; ++k) {
                    acc += layer.weights.at(i, k) * a[k];
                }
                z[i] = (l + 1 < params.layers.size()) ? std::max(0.0, acc) : acc;
            }
            a = std::move(z);
        }
        for (size_t c = 0; c < y.cols; ++c) {
            CHECK(std::fabs(y.at(r, c) - a[c]) < 1e-12);
        }
    }
}

TEST_CASE("forward rejects bad input") {
    ModelParams params = init_params(small_config());
    Matrix wrong(2, 4);
    CHECK_THROWS_AS(forward(params, wrong, Activation::Relu), DataError);
    Matrix bad(2, 5);
    bad.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(forward(params, bad, Activation::Relu), DataError);
}

TEST_CASE("perfect predictions give zero loss and zero grads") {
    ModelCheckpoint ckpt = identity_checkpoint(3);
    Matrix x = random_inputs(4, 3, 9);
    LossGrad lg = loss_and_grad(ckpt.params, x, x, Activation::Identity, LossKind::Mse);
    CHECK(lg.loss == 0.0);
    for (const auto& layer : lg.grads.layers) {
        for (double g : layer.weights.data) CHECK(g == 0.0);
        for (double g : layer.bias) CHECK(g == 0.0);
    }
}

TEST_CASE("single linear layer matches the closed-form gradient") {
    // one sample, one linear layer: dL/dW = 2 (y - t) x^T / D
    ModelParams params;
    Layer layer;
    layer.weights = Matrix(2, 3);
    Rng rng(33);
    for (double& w : layer.weights.data) w = rng.uniform(-1.0, 1.0);
    layer.bias = {0.3, -0.7};
    params.layers.push_back(layer);

    Matrix x(1, 3);
    x.data = {0.5, -1.2, 2.0};
    Matrix t(1, 2);
    t.data = {1.0, -1.0};

    Matrix y = forward(params, x, Activation::Identity);
    LossGrad lg = loss_and_grad(params, x, t, Activation::Identity, LossKind::Mse);

    const double d = 2.0;
    double want_loss = 0.0;
    for (size_t j = 0; j < 2; ++j) {
        const double r = y.at(0, j) - t.at(0, j);
        want_loss += r * r;
        for (size_t i = 0; i < 3; ++i) {
            const double want = 2.0 * r * x.at(0, i) / d;
            CHECK(std::fabs(lg.grads.layers[0].weights.at(j, i) - want) < 1e-12);
        }
        CHECK(std::fabs(lg.grads.layers[0].bias[j] - 2.0 * r / d) < 1e-12);
    }
    CHECK(std::fabs(lg.loss - want_loss / d) < 1e-12);
}

TEST_CASE("gradient shapes equal parameter shapes") {
    NetworkConfig config = small_config();
    ModelParams params = init_params(config);
    Matrix x = random_inputs(3, 5, 2);
    Matrix t = random_inputs(3, 3, 3);
    LossGrad lg = loss_and_grad(params, x, t, Activation::Relu, LossKind::Mse);
    REQUIRE(lg.grads.layers.size() == params.layers.size());
    for (size_t l = 0; l < params.layers.size(); ++l) {
        CHECK(lg.grads.layers[l].weights.rows == params.layers[l].weights.rows);
        CHECK(lg.grads.layers[l].weights.cols == params.layers[l].weights.cols);
        CHECK(lg.grads.layers[l].bias.size() == params.layers[l].bias.size());
    }
}

TEST_CASE("empty batch aborts") {
    ModelParams params = init_params(small_config());
    Matrix x(0, 5), t(0, 3);
    CHECK_THROWS_AS(loss_and_grad(params, x, t, Activation::Relu, LossKind::Mse), DataError);
}

TEST_CASE("grad_check stays within tolerance on varied configs") {
    NetworkConfig config = small_config();
    CHECK(grad_check(config, 20) <= 1e-4);

    config.activation = Activation::Tanh;
    CHECK(grad_check(config, 20) <= 1e-4);

    config.activation = Activation::Relu;
    config.loss = LossKind::Mae;
    CHECK(grad_check(config, 20) <= 1e-4);
}

TEST_CASE("grad_check on the default config") {
    NetworkConfig config;
    CHECK(grad_check(config, 5) <= 1e-4);
}

TEST_CASE("grad_check with zero params stays finite") {
    NetworkConfig config = small_config();
    const double err = grad_check(config, 1, 1e-5, true);
    CHECK(std::isfinite(err));
    CHECK(err <= 1e-4);
}

TEST_CASE("larger finite-difference steps report larger error") {
    NetworkConfig config = small_config();
    config.activation = Activation::Tanh;
    const double fine = grad_check(config, 10, 1e-5);
    const double coarse = grad_check(config, 10, 1e-2);
    CHECK(coarse > fine);
}

TEST_CASE("scaler standardizes and flags degenerate columns") {
    Matrix x(4, 2);
    // column 0 varies, column 1 is constant
    x.data = {1.0, 5.0, 2.0, 5.0, 3.0, 5.0, 4.0, 5.0};
    Matrix t(4, 1);
    t.data = {10.0, 20.0, 30.0, 40.0};
    Scaler s = Scaler::fit(x, t);

    CHECK(s.in_mean[0] == doctest::Approx(2.5));
    CHECK(s.in_mean[1] == doctest::Approx(5.0));
    CHECK(s.in_scale[1] == 1.0);
    REQUIRE(s.in_degenerate.size() == 1);
    CHECK(s.in_degenerate[0] == 1);
    CHECK(s.out_degenerate.empty());

    Matrix xs = s.transform_in(x);
    double mean0 = 0.0;
    for (size_t r = 0; r < 4; ++r) mean0 += xs.at(r, 0);
    CHECK(std::fabs(mean0) < 1e-12);
    for (size_t r = 0; r < 4; ++r) CHECK(xs.at(r, 1) == 0.0);

    Matrix ts = s.transform_out(t);
    Matrix back = s.inverse_out(ts);
    for (size_t i = 0; i < t.data.size(); ++i) {
        CHECK(back.data[i] == doctest::Approx(t.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("train fits a linear task well below its starting loss") {
    Rng rng(101);
    const int d = 50;
    Matrix a(static_cast<size_t>(d), static_cast<size_t>(d));
    for (double& v : a.data) v = rng.uniform(-0.5, 0.5);

    TrainingData data;
    data.x = Matrix(400, static_cast<size_t>(d));
    for (double& v : data.x.data) v = rng.normal();
    data.t = Matrix(400, static_cast<size_t>(d));
    for (size_t r = 0; r < 400; ++r) {
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int k = 0; k < d; ++k) {
                acc += a.at(static_cast<size_t>(i), static_cast<size_t>(k)) *
                       data.x.at(r, static_cast<size_t>(k));
            }
            data.t.at(r, static_cast<size_t>(i)) = acc;
        }
    }

    NetworkConfig config; // default 50-64-64-50, adam
    ModelCheckpoint ckpt = train_network(data, config, std::string(64, 'b'));
    REQUIRE(ckpt.loss_trace.size() == 2000);
    CHECK(ckpt.loss_trace.back() < 1e-3 * ckpt.loss_trace.front());
}

TEST_CASE("train memorizes ten rows") {
    Rng rng(55);
    TrainingData data;
    data.x = Matrix(10, 50);
    data.t = Matrix(10, 50);
    for (double& v : data.x.data) v = rng.normal();
    for (double& v : data.t.data) v = rng.uniform(500.0, 5000.0);

    NetworkConfig config;
    ModelCheckpoint ckpt = train_network(data, config, std::string(64, 'c'));
    CHECK(ckpt.loss_trace.back() < 0.01 * ckpt.loss_trace.front());

    // predictions on the training rows land close to their targets
    Matrix pred = predict(ckpt, data.x);
    for (size_t i = 0; i < pred.data.size(); ++i) {
        CHECK(std::fabs(pred.data[i] - data.t.data[i]) < 0.01 * std::fabs(data.t.data[i]) + 1.0);
    }
}

TEST_CASE("training is deterministic") {
    Rng rng(66);
    TrainingData data;
    data.x = Matrix(20, 5);
    data.t = Matrix(20, 3);
    for (double& v : data.x.data) v = rng.normal();
    for (double& v : data.t.data) v = rng.normal();

    NetworkConfig config = small_config();
    config.epochs = 50;
    ModelCheckpoint a = train_network(data, config, std::string(64, 'd'));
    ModelCheckpoint b = train_network(data, config, std::string(64, 'd'));
    CHECK(checkpoint_to_string(a) == checkpoint_to_string(b));

    config.seed = 8;
    ModelCheckpoint c = train_network(data, config, std::string(64, 'd'));
    CHECK(checkpoint_to_string(a) != checkpoint_to_string(c));
}

TEST_CASE("divergence aborts with the epoch number") {
    Rng rng(77);
    TrainingData data;
    data.x = Matrix(8, 5);
    data.t = Matrix(8, 3);
    for (double& v : data.x.data) v = rng.normal();
    for (double& v : data.t.data) v = rng.normal();

    NetworkConfig config = small_config();
    config.optimizer = Optimizer::Sgd;
    config.learning_rate = 1e9;
    config.epochs = 500;
    CHECK_THROWS_WITH_AS(train_network(data, config, std::string(64, 'e')),
                         doctest::Contains("epoch"), DataError);
}

TEST_CASE("train validates shapes and content") {
    NetworkConfig config = small_config();
    TrainingData empty;
    empty.x = Matrix(0, 5);
    empty.t = Matrix(0, 3);
    CHECK_THROWS_AS(train_network(empty, config, std::string(64, 'f')), DataError);

    TrainingData bad;
    bad.x = Matrix(4, 7); // wrong width
    bad.t = Matrix(4, 3);
    CHECK_THROWS_AS(train_network(bad, config, std::string(64, 'f')), DataError);

    TrainingData nans;
    nans.x = Matrix(4, 5);
    nans.t = Matrix(4, 3);
    nans.x.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(train_network(nans, config, std::string(64, 'f')), DataError);
}

TEST_CASE("predict clamps negatives only when asked") {
    ModelCheckpoint ckpt = identity_checkpoint(1);
    ckpt.params.layers[0].weights.at(0, 0) = 0.0;
    ckpt.params.layers[0].bias[0] = -120.0;

    Matrix x(1, 1);
    x.at(0, 0) = 3.0;
    CHECK(predict(ckpt, x).at(0, 0) == -120.0);
    CHECK(predict(ckpt, x, true).at(0, 0) == 0.0);
}

TEST_CASE("predict at the input mean returns the target mean") {
    Rng rng(88);
    Matrix xfit(30, 2), tfit(30, 2);
    for (double& v : xfit.data) v = rng.uniform(10.0, 20.0);
    for (double& v : tfit.data) v = rng.uniform(-5.0, 5.0);

    ModelCheckpoint ckpt = identity_checkpoint(2);
    ckpt.scaler = Scaler::fit(xfit, tfit);

    Matrix x(1, 2);
    x.at(0, 0) = ckpt.scaler.in_mean[0];
    x.at(0, 1) = ckpt.scaler.in_mean[1];
    Matrix y = predict(ckpt, x);
    CHECK(y.at(0, 0) == doctest::Approx(ckpt.scaler.out_mean[0]).epsilon(1e-12));
    CHECK(y.at(0, 1) == doctest::Approx(ckpt.scaler.out_mean[1]).epsilon(1e-12));
}

TEST_CASE("predict validates widths") {
    ModelCheckpoint ckpt = identity_checkpoint(2);
    Matrix wrong(1, 3);
    CHECK_THROWS_AS(predict(ckpt, wrong), DataError);
    Matrix empty(0, 2);
    CHECK_THROWS_AS(predict(ckpt, empty), DataError);
}

namespace {

std::vector<PairwiseRow> toy_pairwise(const std::vector<double>& deltas,
                                      const std::vector<double>& flows) {
    std::vector<PairwiseRow> rows;
    for (size_t i = 0; i < deltas.size(); ++i) {
        PairwiseRow r;
        r.origin = 0;
        r.destination = 1;
        r.year = 2015;
        r.sentiment_delta = deltas[i];
        r.flow = flows[i];
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_CASE("logistic baseline separates a separable toy set") {
    auto rows = toy_pairwise({-2.0, -1.0, -0.5, 0.5, 1.0, 2.0},
                             {10.0, 20.0, 30.0, 1000.0, 2000.0, 3000.0});
    NetworkConfig config;
    config.epochs = 4000;
    config.learning_rate = 0.5;
    ModelCheckpoint ckpt = fit_logistic_baseline(rows, config, std::string(64, '0'));
    CHECK(ckpt.kind == ModelKind::Logistic);
    CHECK(ckpt.threshold == doctest::Approx(515.0)); // median of the six flows

    Matrix x(6, 1);
    for (size_t i = 0; i < 6; ++i) x.at(i, 0) = rows[i].sentiment_delta;
    Matrix p = predict(ckpt, x);
    for (size_t i = 0; i < 6; ++i) {
        const bool label = rows[i].flow > ckpt.threshold;
        CHECK((p.at(i, 0) > 0.5) == label);
    }
}

TEST_CASE("logistic baseline keeps a zero bias on symmetric data") {
    auto rows = toy_pairwise({0.8, -0.8, 0.3, -0.3, 1.2, -1.2},
                             {100.0, 1.0, 90.0, 2.0, 110.0, 3.0});
    NetworkConfig config;
    config.epochs = 2000;
    config.learning_rate = 0.1;
    ModelCheckpoint ckpt = fit_logistic_baseline(rows, config, std::string(64, '1'));
    CHECK(std::fabs(ckpt.params.layers[0].bias[0]) < 1e-6);
}

TEST_CASE("logistic log-loss is non-increasing at a small fixed step") {
    Rng rng(202);
    std::vector<double> deltas, flows;
    for (int i = 0; i < 80; ++i) {
        const double d = rng.uniform(-1.0, 1.0);
        deltas.push_back(d);
        flows.push_back(1000.0 + 800.0 * d + rng.normal() * 150.0);
    }
    auto rows = toy_pairwise(deltas, flows);
    NetworkConfig config;
    config.epochs = 500;
    config.learning_rate = 0.05;
    ModelCheckpoint ckpt = fit_logistic_baseline(rows, config, std::string(64, '2'));
    REQUIRE(ckpt.loss_trace.size() == 500);
    for (size_t i = 1; i < ckpt.loss_trace.size(); ++i) {
        CHECK(ckpt.loss_trace[i] <= ckpt.loss_trace[i - 1] + 1e-15);
    }
}

TEST_CASE("logistic baseline rejects degenerate data") {
    auto single = toy_pairwise({0.5}, {10.0});
    NetworkConfig config;
    CHECK_THROWS_AS(fit_logistic_baseline(single, config, std::string(64, '3')), DataError);

    // identical flows: nothing exceeds the median, one class only
    auto flat = toy_pairwise({0.1, 0.2, 0.3, 0.4}, {50.0, 50.0, 50.0, 50.0});
    CHECK_THROWS_WITH_AS(fit_logistic_baseline(flat, config, std::string(64, '4')),
                         doctest::Contains("both classes"), DataError);
}

TEST_CASE("training data converters") {
    std::vector<VectorRow> vrows(2);
    for (auto& r : vrows) {
        r.sentiment.assign(50, 0.1);
        r.target.assign(50, 7.0);
    }
    vrows[1].sentiment[3] = -0.5;
    TrainingData vd = training_data_from_vector_rows(vrows);
    CHECK(vd.x.rows == 2);
    CHECK(vd.x.cols == 50);
    CHECK(vd.t.cols == 50);
    CHECK(vd.x.at(1, 3) == -0.5);
    CHECK(vd.t.at(0, 0) == 7.0);

    auto prows = toy_pairwise({0.25, -0.75}, {100.0, 200.0});
    TrainingData pd = training_data_from_pairwise(prows);
    CHECK(pd.x.rows == 2);
    CHECK(pd.x.cols == 1);
    CHECK(pd.x.at(1, 0) == -0.75);
    CHECK(pd.t.at(1, 0) == 200.0);

    CHECK_THROWS_AS(training_data_from_vector_rows({}), DataError);
    CHECK_THROWS_AS(training_data_from_pairwise({}), DataError);
}

TEST_CASE("config validation") {
    NetworkConfig config;
    CHECK_NOTHROW(config.validate());
    config.layer_sizes = {50};
    CHECK_THROWS_AS(config.validate(), UsageError);
    config.layer_sizes = {50, 0, 50};
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = NetworkConfig{};
    config.epochs = 0;
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = NetworkConfig{};
    config.learning_rate = -1.0;
    CHECK_THROWS_AS(config.validate(), UsageError);
    config = NetworkConfig{};
    config.split_fraction = 1.0;
    CHECK_THROWS_AS(config.validate(), UsageError);
}

TEST_CASE("name round-trips") {
    for (auto a : {Activation::Relu, Activation::Tanh, Activation::Identity}) {
        CHECK(activation_from_name(activation_name(a)) == a);
    }
    for (auto o : {Optimizer::Adam, Optimizer::Sgd}) {
        CHECK(optimizer_from_name(optimizer_name(o)) == o);
    }
    for (auto l : {LossKind::Mse, LossKind::Mae}) {
        CHECK(loss_from_name(loss_name(l)) == l);
    }
    for (auto m : {DatasetMode::Vector, DatasetMode::Pairwise}) {
        CHECK(mode_from_name(mode_name(m)) == m);
    }
    CHECK_THROWS_AS(activation_from_name("sigmoid"), UsageError);
    CHECK_THROWS_AS(optimizer_from_name("rmsprop"), UsageError);
}
