#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "courier/neuralnet.hpp"
#include "courier/rng.hpp"
#include "oracles.hpp"

using namespace courier;

TEST_CASE("all-zero parameters produce all-zero outputs") {
    auto net = zeros_like(make_mlp(1, 4, {8, 8}, 3));
    const auto out = forward(net, std::vector<double>{0.5, -0.2, 0.1, 0.9});
    REQUIRE(out.size() == 3);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("hand-computed single-layer forward pass") {
    MlpParams net;
    DenseLayer layer;
    layer.weights = Matrix(2, 2);
    layer.weights(0, 0) = 1.0;
    layer.weights(0, 1) = 2.0;
    layer.weights(1, 0) = -0.5;
    layer.weights(1, 1) = 0.25;
    layer.biases = {0.1, -0.2};
    net.layers.push_back(layer);

    const auto out = forward(net, std::vector<double>{3.0, 4.0});
    REQUIRE(out.size() == 2);
    CHECK(out[0] == doctest::Approx(1 * 3 + 2 * 4 + 0.1));
    CHECK(out[1] == doctest::Approx(-0.5 * 3 + 0.25 * 4 - 0.2));
}

TEST_CASE("relu suppresses negative hidden pre-activations") {
    MlpParams net;
    DenseLayer hidden;
    hidden.weights = Matrix(1, 1);
    hidden.weights(0, 0) = -1.0;  // negative activation for positive input
    hidden.biases = {0.0};
    DenseLayer out_layer;
    out_layer.weights = Matrix(1, 1);
    out_layer.weights(0, 0) = 5.0;
    out_layer.biases = {0.0};
    net.layers = {hidden, out_layer};

    CHECK(forward(net, std::vector<double>{2.0})[0] == 0.0);
    CHECK(forward(net, std::vector<double>{-2.0})[0] == doctest::Approx(10.0));
}

TEST_CASE("forward pass is pure") {
    const auto net = make_mlp(33, 6, {16, 16}, 4);
    const std::vector<double> x{0.1, 0.9, 0.3, 0.7, 0.2, 0.5};
    CHECK(forward(net, x) == forward(net, x));
}

TEST_CASE("loss is zero when predictions equal targets") {
    const auto net = make_mlp(5, 3, {8}, 2);
    const std::vector<double> x{0.2, 0.4, 0.6};
    const auto q = forward(net, x);
    const auto lg = mse_loss_and_gradient(net, {x}, {1}, {q[1]});
    CHECK(lg.loss == doctest::Approx(0.0));
    for (const auto& layer : lg.gradient.layers) {
        for (double g : layer.weights.data) CHECK(g == 0.0);
        for (double g : layer.biases) CHECK(g == 0.0);
    }
    CHECK_THROWS_AS(mse_loss_and_gradient(net, {}, {}, {}), std::invalid_argument);
}

TEST_CASE("analytic gradient of a linear net matches the closed form") {
    // One linear layer, one sample: L = (w.x + b - y)^2, dL/dw = 2(wx+b-y)x.
    MlpParams net;
    DenseLayer layer;
    layer.weights = Matrix(1, 2);
    layer.weights(0, 0) = 0.5;
    layer.weights(0, 1) = -1.5;
    layer.biases = {0.25};
    net.layers.push_back(layer);

    const std::vector<double> x{2.0, 3.0};
    const double y = 1.0;
    const double pred = 0.5 * 2 - 1.5 * 3 + 0.25;
    const auto lg = mse_loss_and_gradient(net, {x}, {0}, {y});
    CHECK(lg.loss == doctest::Approx((pred - y) * (pred - y)));
    CHECK(lg.gradient.layers[0].weights(0, 0) == doctest::Approx(2 * (pred - y) * 2.0));
    CHECK(lg.gradient.layers[0].weights(0, 1) == doctest::Approx(2 * (pred - y) * 3.0));
    CHECK(lg.gradient.layers[0].biases[0] == doctest::Approx(2 * (pred - y)));
}

TEST_CASE("backprop matches central finite differences on random nets") {
    RngStream rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const int input = 2 + rng.uniform_int(4);
        const int output = 2 + rng.uniform_int(3);
        const auto net = make_mlp(1000 + trial, input, {6, 5}, output);

        std::vector<std::vector<double>> inputs;
        std::vector<int> actions;
        std::vector<double> targets;
        const int batch = 1 + rng.uniform_int(4);
        for (int b = 0; b < batch; ++b) {
            std::vector<double> x(input);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            inputs.push_back(x);
            actions.push_back(rng.uniform_int(output));
            targets.push_back(rng.uniform(-2.0, 2.0));
        }
        const auto lg = mse_loss_and_gradient(net, inputs, actions, targets);
        const auto numeric =
            testing::finite_difference_gradient(net, inputs, actions, targets);
        CHECK(testing::max_relative_gradient_error(lg.gradient, numeric) < 1e-4);
    }
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
    auto net = make_mlp(7, 3, {4}, 2);
    const auto before = net;
    auto adam = AdamState::for_params(net, 0.01);
    adam_step(net, adam, zeros_like(net));
    CHECK(adam.step == 1);
    for (size_t l = 0; l < net.layers.size(); ++l)
        CHECK(net.layers[l].weights.data == before.layers[l].weights.data);
}

TEST_CASE("adam's first step has learning-rate magnitude") {
    auto net = make_mlp(8, 2, {3}, 1);
    const auto before = net;
    auto adam = AdamState::for_params(net, 0.01);
    auto grad = zeros_like(net);
    for (auto& layer : grad.layers) {
        for (auto& g : layer.weights.data) g = 3.0;
        for (auto& g : layer.biases) g = -7.0;
    }
    adam_step(net, adam, grad);
    // With constant gradient g, step 1 moves each weight by lr * g/(|g|+eps).
    for (size_t l = 0; l < net.layers.size(); ++l) {
        for (size_t i = 0; i < net.layers[l].weights.data.size(); ++i) {
            const double delta =
                net.layers[l].weights.data[i] - before.layers[l].weights.data[i];
            CHECK(delta == doctest::Approx(-0.01).epsilon(1e-6));
        }
        for (size_t i = 0; i < net.layers[l].biases.size(); ++i) {
            const double delta = net.layers[l].biases[i] - before.layers[l].biases[i];
            CHECK(delta == doctest::Approx(0.01).epsilon(1e-6));
        }
    }
}

TEST_CASE("adam descends a quadratic bowl monotonically after warmup") {
    // Minimize (w - 3)^2 for a single scalar parameter.
    MlpParams net;
    DenseLayer layer;
    layer.weights = Matrix(1, 1);
    layer.weights(0, 0) = -2.0;
    layer.biases = {0.0};
    net.layers.push_back(layer);
    auto adam = AdamState::for_params(net, 0.05);

    double prev = 1e18;
    for (int i = 0; i < 400; ++i) {
        const double w = net.layers[0].weights(0, 0);
        const double loss = (w - 3.0) * (w - 3.0);
        auto grad = zeros_like(net);
        grad.layers[0].weights(0, 0) = 2.0 * (w - 3.0);
        adam_step(net, adam, grad);
        if (i >= 40) CHECK(loss <= prev + 1e-9);
        prev = loss;
    }
    CHECK(net.layers[0].weights(0, 0) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("training fits a frozen random teacher") {
    const auto teacher = make_mlp(404, 4, {8}, 3);
    auto student = make_mlp(505, 4, {16, 16}, 3);
    auto adam = AdamState::for_params(student, 0.01);
    RngStream rng(606);

    double final_mse = 1e18;
    for (int step = 0; step < 4000; ++step) {
        std::vector<std::vector<double>> inputs;
        std::vector<int> actions;
        std::vector<double> targets;
        for (int b = 0; b < 16; ++b) {
            std::vector<double> x(4);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            const int a = rng.uniform_int(3);
            targets.push_back(forward(teacher, x)[a]);
            inputs.push_back(std::move(x));
            actions.push_back(a);
        }
        final_mse = mse_loss_and_gradient(student, inputs, actions, targets).loss;
        auto lg = mse_loss_and_gradient(student, inputs, actions, targets);
        adam_step(student, adam, lg.gradient);
    }
    CHECK(final_mse < 1e-3);
}

TEST_CASE("cloned parameters are independent") {
    const auto net = make_mlp(12, 3, {4}, 2);
    auto original = net;
    const auto copy = clone_params(original);
    for (size_t l = 0; l < copy.layers.size(); ++l)
        CHECK(copy.layers[l].weights.data == net.layers[l].weights.data);

    original.layers[0].weights(0, 0) += 100.0;
    CHECK(copy.layers[0].weights(0, 0) == net.layers[0].weights(0, 0));
    const auto copy2 = clone_params(copy);
    for (size_t l = 0; l < copy2.layers.size(); ++l)
        CHECK(copy2.layers[l].weights.data == net.layers[l].weights.data);
}

TEST_CASE("checkpoints round-trip and validate") {
    Checkpoint ckpt;
    ckpt.params = make_mlp(31, 12, {64, 64, 64, 64}, 16);
    ckpt.adam = AdamState::for_params(ckpt.params, 0.01);
    ckpt.adam.step = 7;
    ckpt.has_adam = true;
    ckpt.fingerprint = "deadbeefdeadbeef";
    ckpt.trained_episodes = 42;

    const auto restored = checkpoint_from_json(checkpoint_to_json(ckpt));
    CHECK(restored.fingerprint == ckpt.fingerprint);
    CHECK(restored.trained_episodes == 42);
    CHECK(restored.has_adam);
    CHECK(restored.adam.step == 7);
    REQUIRE(restored.params.same_shape(ckpt.params));
    for (size_t l = 0; l < ckpt.params.layers.size(); ++l)
        CHECK(restored.params.layers[l].weights.data ==
              ckpt.params.layers[l].weights.data);

    CHECK_THROWS_AS(checkpoint_from_json("{not json"), std::runtime_error);
    CHECK_THROWS_AS(checkpoint_from_json("{\"format_version\": 9}"),
                    std::runtime_error);
}
