#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace courier {

// Row-major dense matrix; rows index output units, columns input units.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
};

struct DenseLayer {
    Matrix weights;              // [out x in]
    std::vector<double> biases;  // [out]
};

// Weights and biases of one feed-forward ReLU network (linear output layer).
// Plain value type: copying yields an independent parameter set.
struct MlpParams {
    std::vector<DenseLayer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().weights.cols; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().weights.rows; }
    size_t parameter_count() const;
    bool same_shape(const MlpParams& other) const;
};

// He-uniform weight init (fan-in scaled), zero biases.
MlpParams make_mlp(std::uint64_t seed, int input_dim,
                   const std::vector<int>& hidden_layers, int output_dim);

MlpParams zeros_like(const MlpParams& params);

std::vector<double> forward(const MlpParams& params, std::span<const double> input);

struct LossGradient {
    double loss = 0.0;
    MlpParams gradient;
};

// Mean squared error over a batch where only the chosen action's output unit
// carries error signal per sample: loss = mean_i (target_i - Q(s_i, a_i))^2.
// Gradient computed by backpropagation through the shared trunk.
LossGradient mse_loss_and_gradient(const MlpParams& params,
                                   const std::vector<std::vector<double>>& inputs,
                                   const std::vector<int>& action_indices,
                                   const std::vector<double>& targets);

struct AdamState {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<DenseLayer> first_moment;
    std::vector<DenseLayer> second_moment;

    static AdamState for_params(const MlpParams& params, double learning_rate);
};

// Standard Adam update with bias correction; increments the step counter.
void adam_step(MlpParams& params, AdamState& state, const MlpParams& gradient);

inline MlpParams clone_params(const MlpParams& params) { return params; }

struct Checkpoint {
    MlpParams params;
    AdamState adam;
    bool has_adam = false;
    std::string fingerprint;
    long trained_episodes = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
// Validates shapes; throws std::runtime_error on malformed input.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace courier
