#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "courier/config.hpp"
#include "courier/neuralnet.hpp"
#include "courier/rng.hpp"

namespace courier {

struct Experience {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

// FIFO ring buffer; inserting into a full buffer evicts the oldest entry.
class ReplayMemory {
public:
    explicit ReplayMemory(int capacity);

    void push(Experience e);
    int size() const { return static_cast<int>(size_); }
    int capacity() const { return capacity_; }

    // Entry by age: index 0 is the oldest currently stored.
    const Experience& at(int i) const;

    // Uniform sample of `count` distinct entries.
    std::vector<const Experience*> sample(int count, RngStream& rng) const;

private:
    int capacity_;
    size_t head_ = 0;  // slot the next push writes to
    size_t size_ = 0;
    std::vector<Experience> buffer_;
};

// Epsilon-greedy over the q-network's outputs; greedy ties break to the
// lowest action index.
int select_action(const MlpParams& q_net, std::span<const double> features,
                  double epsilon, RngStream& rng);

int argmax_action(const MlpParams& q_net, std::span<const double> features);

inline double decay_epsilon(double epsilon, double decay, double min_epsilon) {
    return std::max(min_epsilon, epsilon * decay);
}

// Bellman targets from the frozen target network: r + gamma * max_a' Q(s', a')
// for non-terminal samples, plain r for terminal ones.
std::vector<double> compute_targets(const MlpParams& target_net,
                                    const std::vector<const Experience*>& batch,
                                    double gamma);

// One learning update: skipped (nullopt) until the memory holds a full batch,
// otherwise samples a minibatch, computes targets, and takes one Adam step on
// the MSE loss. Returns the pre-step loss.
std::optional<double> train_step(MlpParams& q_net, const MlpParams& target_net,
                                 const ReplayMemory& memory, AdamState& adam,
                                 int batch_size, double gamma, RngStream& rng);

// Copies the q-network into the target every `sync_interval`-th global epoch
// (1-based). Returns whether a sync happened.
bool maybe_sync_target(const MlpParams& q_net, MlpParams& target_net,
                       long global_epoch, int sync_interval);

struct EpisodeStats {
    int episode = 0;
    double reward = 0.0;
    double cumulative_avg_reward = 0.0;
    double mean_loss = 0.0;  // mean over this episode's executed train steps
    int train_steps = 0;
    double epsilon = 0.0;  // value after the episode's decays
    long lost_requests = 0;
    long extensions = 0;
};

struct TrainResult {
    MlpParams params;
    AdamState adam;
    std::string fingerprint;
    std::vector<EpisodeStats> episodes;
    long total_epochs = 0;
};

// Invoked after every episode with the running stats and the current
// q-network (for metric streaming and periodic checkpointing).
using EpisodeCallback = std::function<void(const EpisodeStats&, const MlpParams&)>;

// Full training loop: for each episode, reset the environment from a seed
// derived from (master_seed, episode), then per decision epoch select an
// action epsilon-greedily, apply it, store the experience, take one training
// step, decay epsilon, and periodically refresh the target network. Epsilon
// and the sync counter persist across episodes. Bit-reproducible per seed.
TrainResult train(const EpisodeConfig& env_cfg, const AgentConfig& agent_cfg,
                  std::uint64_t master_seed, const EpisodeCallback& on_episode = {});

// Fingerprint binding a checkpoint to the action catalog and feature layout.
std::string network_fingerprint(int max_notified);

}  // namespace courier
