#include "courier/neuralnet.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "courier/rng.hpp"

namespace courier {

size_t MlpParams::parameter_count() const {
    size_t n = 0;
    for (const auto& layer : layers)
        n += layer.weights.data.size() + layer.biases.size();
    return n;
}

bool MlpParams::same_shape(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].weights.rows != other.layers[i].weights.rows ||
            layers[i].weights.cols != other.layers[i].weights.cols)
            return false;
    }
    return true;
}

MlpParams make_mlp(std::uint64_t seed, int input_dim,
                   const std::vector<int>& hidden_layers, int output_dim) {
    if (input_dim <= 0 || output_dim <= 0)
        throw std::invalid_argument("network dimensions must be positive");
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int h : hidden_layers) {
        if (h <= 0) throw std::invalid_argument("hidden layer width must be positive");
        dims.push_back(h);
    }
    dims.push_back(output_dim);

    RngStream rng(seed);
    MlpParams params;
    params.layers.reserve(dims.size() - 1);
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer layer;
        layer.weights = Matrix(dims[i + 1], dims[i]);
        layer.biases.assign(dims[i + 1], 0.0);
        const double limit = std::sqrt(6.0 / dims[i]);  // He-uniform, fan-in scaled
        for (auto& w : layer.weights.data) w = rng.uniform(-limit, limit);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

MlpParams zeros_like(const MlpParams& params) {
    MlpParams out;
    out.layers.reserve(params.layers.size());
    for (const auto& layer : params.layers) {
        DenseLayer z;
        z.weights = Matrix(layer.weights.rows, layer.weights.cols);
        z.biases.assign(layer.biases.size(), 0.0);
        out.layers.push_back(std::move(z));
    }
    return out;
}

namespace {

// One affine layer over a batch: z[i] = W * a[i] + b.
void affine_forward(const DenseLayer& layer, const std::vector<double>& input,
                    int batch, std::vector<double>& output) {
    const int in_dim = layer.weights.cols;
    const int out_dim = layer.weights.rows;
    output.assign(static_cast<size_t>(batch) * out_dim, 0.0);
    for (int i = 0; i < batch; ++i) {
        const double* x = input.data() + static_cast<size_t>(i) * in_dim;
        double* z = output.data() + static_cast<size_t>(i) * out_dim;
        for (int o = 0; o < out_dim; ++o) {
            const double* w = layer.weights.row(o);
            double acc = layer.biases[o];
            for (int k = 0; k < in_dim; ++k) acc += w[k] * x[k];
            z[o] = acc;
        }
    }
}

void relu_inplace(std::vector<double>& v) {
    for (auto& x : v)
        if (x < 0.0) x = 0.0;
}

}  // namespace

std::vector<double> forward(const MlpParams& params, std::span<const double> input) {
    if (params.layers.empty()) throw std::invalid_argument("empty network");
    if (static_cast<int>(input.size()) != params.input_dim())
        throw std::invalid_argument("input length does not match network input dim");

    std::vector<double> activation(input.begin(), input.end());
    std::vector<double> next;
    for (size_t l = 0; l < params.layers.size(); ++l) {
        affine_forward(params.layers[l], activation, 1, next);
        if (l + 1 < params.layers.size()) relu_inplace(next);
        activation.swap(next);
    }
    return activation;
}

LossGradient mse_loss_and_gradient(const MlpParams& params,
                                   const std::vector<std::vector<double>>& inputs,
                                   const std::vector<int>& action_indices,
                                   const std::vector<double>& targets) {
    const int batch = static_cast<int>(inputs.size());
    if (batch == 0) throw std::invalid_argument("empty batch");
    if (action_indices.size() != inputs.size() || targets.size() != inputs.size())
        throw std::invalid_argument("batch arrays must have equal length");

    const int in_dim = params.input_dim();
    const int out_dim = params.output_dim();
    const size_t n_layers = params.layers.size();

    // Batched activations per layer; activations[0] is the input batch.
    std::vector<std::vector<double>> activations(n_layers + 1);
    activations[0].resize(static_cast<size_t>(batch) * in_dim);
    for (int i = 0; i < batch; ++i) {
        if (static_cast<int>(inputs[i].size()) != in_dim)
            throw std::invalid_argument("input length does not match network input dim");
        std::copy(inputs[i].begin(), inputs[i].end(),
                  activations[0].begin() + static_cast<size_t>(i) * in_dim);
    }
    for (size_t l = 0; l < n_layers; ++l) {
        affine_forward(params.layers[l], activations[l], batch, activations[l + 1]);
        if (l + 1 < n_layers) relu_inplace(activations[l + 1]);
    }

    // Output error: only each sample's chosen action unit is penalized.
    double loss = 0.0;
    std::vector<double> delta(static_cast<size_t>(batch) * out_dim, 0.0);
    for (int i = 0; i < batch; ++i) {
        const int a = action_indices[i];
        if (a < 0 || a >= out_dim)
            throw std::invalid_argument("action index out of range");
        const double q = activations[n_layers][static_cast<size_t>(i) * out_dim + a];
        const double err = q - targets[i];
        loss += err * err;
        delta[static_cast<size_t>(i) * out_dim + a] = 2.0 * err / batch;
    }
    loss /= batch;

    LossGradient result;
    result.loss = loss;
    result.gradient = zeros_like(params);

    std::vector<double> prev_delta;
    for (size_t l = n_layers; l-- > 0;) {
        const DenseLayer& layer = params.layers[l];
        DenseLayer& grad = result.gradient.layers[l];
        const int rows = layer.weights.rows;
        const int cols = layer.weights.cols;
        const std::vector<double>& a_in = activations[l];

        for (int i = 0; i < batch; ++i) {
            const double* d = delta.data() + static_cast<size_t>(i) * rows;
            const double* x = a_in.data() + static_cast<size_t>(i) * cols;
            for (int o = 0; o < rows; ++o) {
                const double dv = d[o];
                if (dv == 0.0) continue;
                grad.biases[o] += dv;
                double* g = grad.weights.row(o);
                for (int k = 0; k < cols; ++k) g[k] += dv * x[k];
            }
        }

        if (l == 0) break;
        prev_delta.assign(static_cast<size_t>(batch) * cols, 0.0);
        for (int i = 0; i < batch; ++i) {
            const double* d = delta.data() + static_cast<size_t>(i) * rows;
            const double* a = a_in.data() + static_cast<size_t>(i) * cols;
            double* pd = prev_delta.data() + static_cast<size_t>(i) * cols;
            for (int o = 0; o < rows; ++o) {
                const double dv = d[o];
                if (dv == 0.0) continue;
                const double* w = layer.weights.row(o);
                for (int k = 0; k < cols; ++k) pd[k] += dv * w[k];
            }
            // ReLU derivative gates on the post-activation value.
            for (int k = 0; k < cols; ++k)
                if (a[k] <= 0.0) pd[k] = 0.0;
        }
        delta.swap(prev_delta);
    }
    return result;
}

AdamState AdamState::for_params(const MlpParams& params, double learning_rate) {
    AdamState state;
    state.learning_rate = learning_rate;
    state.first_moment = zeros_like(params).layers;
    state.second_moment = zeros_like(params).layers;
    return state;
}

void adam_step(MlpParams& params, AdamState& state, const MlpParams& gradient) {
    if (!params.same_shape(gradient))
        throw std::invalid_argument("gradient shape does not match parameters");
    if (state.first_moment.size() != params.layers.size())
        throw std::invalid_argument("optimizer state shape does not match parameters");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    const auto update = [&](double& w, double g, double& m, double& v) {
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        w -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    };

    for (size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const auto& grad = gradient.layers[l];
        auto& m = state.first_moment[l];
        auto& v = state.second_moment[l];
        for (size_t i = 0; i < layer.weights.data.size(); ++i)
            update(layer.weights.data[i], grad.weights.data[i], m.weights.data[i],
                   v.weights.data[i]);
        for (size_t i = 0; i < layer.biases.size(); ++i)
            update(layer.biases[i], grad.biases[i], m.biases[i], v.biases[i]);
    }
}

namespace {

using nlohmann::json;

json layers_to_json(const std::vector<DenseLayer>& layers) {
    json arr = json::array();
    for (const auto& layer : layers) {
        arr.push_back({{"rows", layer.weights.rows},
                       {"cols", layer.weights.cols},
                       {"weights", layer.weights.data},
                       {"biases", layer.biases}});
    }
    return arr;
}

std::vector<DenseLayer> layers_from_json(const json& arr) {
    std::vector<DenseLayer> layers;
    int prev_rows = -1;
    for (const auto& jl : arr) {
        DenseLayer layer;
        layer.weights.rows = jl.at("rows").get<int>();
        layer.weights.cols = jl.at("cols").get<int>();
        layer.weights.data = jl.at("weights").get<std::vector<double>>();
        layer.biases = jl.at("biases").get<std::vector<double>>();
        if (layer.weights.rows <= 0 || layer.weights.cols <= 0 ||
            layer.weights.data.size() !=
                static_cast<size_t>(layer.weights.rows) * layer.weights.cols ||
            layer.biases.size() != static_cast<size_t>(layer.weights.rows))
            throw std::runtime_error("checkpoint layer shape is inconsistent");
        if (prev_rows >= 0 && layer.weights.cols != prev_rows)
            throw std::runtime_error("checkpoint layer shapes do not chain");
        prev_rows = layer.weights.rows;
        layers.push_back(std::move(layer));
    }
    return layers;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    json j;
    j["format_version"] = 1;
    j["fingerprint"] = ckpt.fingerprint;
    j["trained_episodes"] = ckpt.trained_episodes;
    j["layers"] = layers_to_json(ckpt.params.layers);
    if (ckpt.has_adam) {
        j["adam"] = {{"learning_rate", ckpt.adam.learning_rate},
                     {"beta1", ckpt.adam.beta1},
                     {"beta2", ckpt.adam.beta2},
                     {"epsilon", ckpt.adam.epsilon},
                     {"step", ckpt.adam.step},
                     {"first_moment", layers_to_json(ckpt.adam.first_moment)},
                     {"second_moment", layers_to_json(ckpt.adam.second_moment)}};
    }
    return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (j.value("format_version", 0) != 1)
        throw std::runtime_error("unsupported checkpoint format_version");
    Checkpoint ckpt;
    ckpt.fingerprint = j.at("fingerprint").get<std::string>();
    ckpt.trained_episodes = j.value("trained_episodes", 0L);
    ckpt.params.layers = layers_from_json(j.at("layers"));
    if (ckpt.params.layers.empty()) throw std::runtime_error("checkpoint has no layers");
    if (j.contains("adam")) {
        const auto& ja = j.at("adam");
        ckpt.adam.learning_rate = ja.at("learning_rate").get<double>();
        ckpt.adam.beta1 = ja.at("beta1").get<double>();
        ckpt.adam.beta2 = ja.at("beta2").get<double>();
        ckpt.adam.epsilon = ja.at("epsilon").get<double>();
        ckpt.adam.step = ja.at("step").get<long>();
        ckpt.adam.first_moment = layers_from_json(ja.at("first_moment"));
        ckpt.adam.second_moment = layers_from_json(ja.at("second_moment"));
        MlpParams m{ckpt.adam.first_moment}, v{ckpt.adam.second_moment};
        if (!m.same_shape(ckpt.params) || !v.same_shape(ckpt.params))
            throw std::runtime_error("checkpoint optimizer state does not match layers");
        ckpt.has_adam = true;
    }
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << checkpoint_to_json(ckpt) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return checkpoint_from_json(text);
}

}  // namespace courier
