#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "courier/config.hpp"
#include "courier/environment.hpp"
#include "courier/matching.hpp"
#include "courier/neuralnet.hpp"

namespace courier {

// Uniform decision interface for evaluation runs.
class Policy {
public:
    virtual ~Policy() = default;
    virtual CompositeAction decide(const std::vector<double>& features,
                                   const SystemState& state) = 0;
    virtual std::string name() const = 0;
};

// Greedy inference over a trained q-network (no exploration).
class DqnPolicy : public Policy {
public:
    DqnPolicy(MlpParams params, int max_notified);
    CompositeAction decide(const std::vector<double>& features,
                           const SystemState& state) override;
    std::string name() const override { return "dqn"; }

private:
    MlpParams params_;
    std::vector<CompositeAction> catalog_;
};

// Baseline without shift extensions: always zero notifications, assignment
// rule picked per state by one-step reward (declared rule order breaks ties).
class NoExtensionPolicy : public Policy {
public:
    explicit NoExtensionPolicy(EconomicsConfig econ);
    CompositeAction decide(const std::vector<double>& features,
                           const SystemState& state) override;
    std::string name() const override { return "no_extension"; }

private:
    EconomicsConfig econ_;
};

// Uniform draw over the catalog; a sanity floor.
class RandomPolicy : public Policy {
public:
    RandomPolicy(std::uint64_t seed, int max_notified);
    CompositeAction decide(const std::vector<double>& features,
                           const SystemState& state) override;
    std::string name() const override { return "random"; }

private:
    RngStream rng_;
    std::vector<CompositeAction> catalog_;
};

// Emits one fixed catalog entry every epoch; diagnostic harness.
class FixedActionPolicy : public Policy {
public:
    explicit FixedActionPolicy(CompositeAction action) : action_(action) {}
    CompositeAction decide(const std::vector<double>&, const SystemState&) override {
        return action_;
    }
    std::string name() const override { return "fixed"; }

private:
    CompositeAction action_;
};

// Per-run evaluation metrics: per-episode averages within one replication.
struct RunMetrics {
    int run_index = 0;
    std::uint64_t seed = 0;
    int episodes = 0;
    double mean_episode_reward = 0.0;
    double mean_lost_count = 0.0;
    double mean_lost_cost = 0.0;
    double mean_extension_count = 0.0;
    double mean_extension_cost = 0.0;
    double mean_served_committed = 0.0;
    double mean_served_occasional = 0.0;
    double mean_arrivals = 0.0;            // includes the initial batch
    double mean_arrivals_excl_initial = 0.0;
};

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t run_seed)>;

PolicyFactory dqn_policy_factory(MlpParams params, int max_notified);
PolicyFactory no_extension_policy_factory(EconomicsConfig econ);
PolicyFactory random_policy_factory(int max_notified);
PolicyFactory fixed_action_policy_factory(CompositeAction action);

// Seed-aligned replications: run i always uses the seed derived from
// (master_seed, i), so two policies evaluated with the same master seed see
// identical exogenous arrivals. Runs execute on up to `threads` workers; each
// owns its environment, and results are returned in run order.
std::vector<RunMetrics> evaluate(const PolicyFactory& make_policy,
                                 const EpisodeConfig& cfg, int n_runs,
                                 int episodes_per_run, std::uint64_t master_seed,
                                 int threads = 0);

}  // namespace courier
