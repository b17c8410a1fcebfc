#include "courier/dqn.hpp"

#include <algorithm>
#include <stdexcept>

#include "courier/environment.hpp"
#include "courier/matching.hpp"

namespace courier {

ReplayMemory::ReplayMemory(int capacity) : capacity_(capacity) {
    if (capacity <= 0) throw std::invalid_argument("replay capacity must be positive");
    buffer_.reserve(capacity);
}

void ReplayMemory::push(Experience e) {
    if (static_cast<int>(buffer_.size()) < capacity_) {
        buffer_.push_back(std::move(e));
        size_ = buffer_.size();
        return;
    }
    buffer_[head_] = std::move(e);
    head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayMemory::at(int i) const {
    const size_t oldest = (static_cast<int>(buffer_.size()) < capacity_) ? 0 : head_;
    return buffer_[(oldest + i) % buffer_.size()];
}

std::vector<const Experience*> ReplayMemory::sample(int count, RngStream& rng) const {
    if (count > size()) throw std::invalid_argument("sample larger than memory");
    std::vector<int> indices(size_);
    for (size_t i = 0; i < size_; ++i) indices[i] = static_cast<int>(i);
    // Partial Fisher-Yates: the first `count` entries become the sample.
    for (int i = 0; i < count; ++i) {
        const int j = i + rng.uniform_int(static_cast<int>(size_) - i);
        std::swap(indices[i], indices[j]);
    }
    std::vector<const Experience*> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(&buffer_[indices[i]]);
    return out;
}

int argmax_action(const MlpParams& q_net, std::span<const double> features) {
    const auto q = forward(q_net, features);
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

int select_action(const MlpParams& q_net, std::span<const double> features,
                  double epsilon, RngStream& rng) {
    if (rng.uniform01() < epsilon)
        return rng.uniform_int(q_net.output_dim());
    return argmax_action(q_net, features);
}

std::vector<double> compute_targets(const MlpParams& target_net,
                                    const std::vector<const Experience*>& batch,
                                    double gamma) {
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Experience* e : batch) {
        if (e->terminal) {
            targets.push_back(e->reward);
            continue;
        }
        const auto q = forward(target_net, e->next_state);
        targets.push_back(e->reward + gamma * *std::max_element(q.begin(), q.end()));
    }
    return targets;
}

std::optional<double> train_step(MlpParams& q_net, const MlpParams& target_net,
                                 const ReplayMemory& memory, AdamState& adam,
                                 int batch_size, double gamma, RngStream& rng) {
    if (memory.size() < batch_size) return std::nullopt;
    const auto batch = memory.sample(batch_size, rng);
    const auto targets = compute_targets(target_net, batch, gamma);

    std::vector<std::vector<double>> inputs;
    std::vector<int> actions;
    inputs.reserve(batch.size());
    actions.reserve(batch.size());
    for (const Experience* e : batch) {
        inputs.push_back(e->state);
        actions.push_back(e->action);
    }
    auto lg = mse_loss_and_gradient(q_net, inputs, actions, targets);
    adam_step(q_net, adam, lg.gradient);
    return lg.loss;
}

bool maybe_sync_target(const MlpParams& q_net, MlpParams& target_net,
                       long global_epoch, int sync_interval) {
    if (global_epoch % sync_interval != 0) return false;
    target_net = clone_params(q_net);
    return true;
}

std::string network_fingerprint(int max_notified) {
    const std::string desc = catalog_description(max_notified) +
                             "|features:v1:" + std::to_string(kFeatureCount);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(desc)));
    return buf;
}

TrainResult train(const EpisodeConfig& env_cfg, const AgentConfig& agent_cfg,
                  std::uint64_t master_seed, const EpisodeCallback& on_episode) {
    env_cfg.validate();
    agent_cfg.validate();

    Environment env(env_cfg);
    const auto catalog = action_catalog(env_cfg.extension.max_notified);

    MlpParams q_net = make_mlp(derive_seed(master_seed, "net-init"), kFeatureCount,
                               agent_cfg.hidden_layers,
                               static_cast<int>(catalog.size()));
    MlpParams target_net = clone_params(q_net);
    AdamState adam = AdamState::for_params(q_net, agent_cfg.learning_rate);
    ReplayMemory memory(agent_cfg.replay_capacity);
    RngStream action_rng(derive_seed(master_seed, "action"));
    RngStream replay_rng(derive_seed(master_seed, "replay"));

    TrainResult result;
    result.fingerprint = network_fingerprint(env_cfg.extension.max_notified);
    result.episodes.reserve(agent_cfg.episodes);

    double epsilon = agent_cfg.epsilon_start;
    long global_epoch = 0;
    double reward_running_sum = 0.0;

    for (int episode = 0; episode < agent_cfg.episodes; ++episode) {
        env.reset(derive_seed(master_seed, static_cast<std::uint64_t>(episode)));
        std::vector<double> features = env.features();

        double episode_reward = 0.0;
        double loss_sum = 0.0;
        int loss_count = 0;

        while (!env.is_terminal()) {
            const int action = select_action(q_net, features, epsilon, action_rng);
            TransitionOutcome outcome = env.step(catalog[action]);
            std::vector<double> next_features = env.features();

            memory.push({features, action, outcome.reward, next_features,
                         env.is_terminal()});
            if (auto loss = train_step(q_net, target_net, memory, adam,
                                       agent_cfg.batch_size, agent_cfg.gamma,
                                       replay_rng)) {
                loss_sum += *loss;
                ++loss_count;
            }
            epsilon = decay_epsilon(epsilon, agent_cfg.epsilon_decay,
                                    agent_cfg.min_epsilon);
            ++global_epoch;
            maybe_sync_target(q_net, target_net, global_epoch,
                              agent_cfg.target_sync_interval);

            episode_reward += outcome.reward;
            features = std::move(next_features);
        }

        reward_running_sum += episode_reward;
        EpisodeStats stats;
        stats.episode = episode;
        stats.reward = episode_reward;
        stats.cumulative_avg_reward = reward_running_sum / (episode + 1);
        stats.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        stats.train_steps = loss_count;
        stats.epsilon = epsilon;
        stats.lost_requests = env.state().total_lost;
        stats.extensions = env.state().total_extensions_accepted;
        result.episodes.push_back(stats);
        if (on_episode) on_episode(stats, q_net);
    }

    result.params = std::move(q_net);
    result.adam = std::move(adam);
    result.total_epochs = global_epoch;
    return result;
}

}  // namespace courier
