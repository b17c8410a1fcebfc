#include "courier/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "courier/dqn.hpp"
#include "courier/rng.hpp"
#include "courier/util.hpp"

namespace courier {

DqnPolicy::DqnPolicy(MlpParams params, int max_notified)
    : params_(std::move(params)), catalog_(action_catalog(max_notified)) {
    if (params_.output_dim() != static_cast<int>(catalog_.size()))
        throw std::invalid_argument(
            "network output dimension does not match the action catalog");
}

CompositeAction DqnPolicy::decide(const std::vector<double>& features,
                                  const SystemState&) {
    return catalog_[argmax_action(params_, features)];
}

NoExtensionPolicy::NoExtensionPolicy(EconomicsConfig econ) : econ_(econ) {}

CompositeAction NoExtensionPolicy::decide(const std::vector<double>&,
                                          const SystemState& state) {
    static constexpr AssignmentRule kRules[] = {
        AssignmentRule::GlobalGreedy, AssignmentRule::CommittedFirst,
        AssignmentRule::OccasionalFirst, AssignmentRule::DeferAll};
    CompositeAction best{0, AssignmentRule::GlobalGreedy};
    double best_value = -std::numeric_limits<double>::infinity();
    for (AssignmentRule rule : kRules) {
        const CompositeAction action{0, rule};
        const double value =
            assignment_value(state, expand(state, action, econ_), econ_);
        if (value > best_value) {
            best_value = value;
            best = action;
        }
    }
    return best;
}

RandomPolicy::RandomPolicy(std::uint64_t seed, int max_notified)
    : rng_(seed), catalog_(action_catalog(max_notified)) {}

CompositeAction RandomPolicy::decide(const std::vector<double>&,
                                     const SystemState&) {
    return catalog_[rng_.uniform_int(static_cast<int>(catalog_.size()))];
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    if (values.empty()) return s;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const double pos = q * (sorted.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - lo;
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / sorted.size();
    s.median = quantile(0.5);
    s.q25 = quantile(0.25);
    s.q75 = quantile(0.75);
    s.min = sorted.front();
    s.max = sorted.back();
    double var = 0.0;
    for (double v : sorted) var += (v - s.mean) * (v - s.mean);
    s.stddev = sorted.size() > 1 ? std::sqrt(var / (sorted.size() - 1)) : 0.0;
    return s;
}

PolicyFactory dqn_policy_factory(MlpParams params, int max_notified) {
    return [params = std::move(params), max_notified](std::uint64_t) {
        return std::make_unique<DqnPolicy>(params, max_notified);
    };
}

PolicyFactory no_extension_policy_factory(EconomicsConfig econ) {
    return [econ](std::uint64_t) { return std::make_unique<NoExtensionPolicy>(econ); };
}

PolicyFactory random_policy_factory(int max_notified) {
    return [max_notified](std::uint64_t run_seed) {
        return std::make_unique<RandomPolicy>(derive_seed(run_seed, "policy"),
                                              max_notified);
    };
}

PolicyFactory fixed_action_policy_factory(CompositeAction action) {
    return [action](std::uint64_t) { return std::make_unique<FixedActionPolicy>(action); };
}

std::vector<RunMetrics> evaluate(const PolicyFactory& make_policy,
                                 const EpisodeConfig& cfg, int n_runs,
                                 int episodes_per_run, std::uint64_t master_seed,
                                 int threads) {
    if (n_runs < 1) throw std::invalid_argument("evaluate requires n_runs >= 1");
    if (episodes_per_run < 1)
        throw std::invalid_argument("evaluate requires episodes_per_run >= 1");
    cfg.validate();

    std::vector<RunMetrics> results(n_runs);
    parallel_for(n_runs, threads, [&](int run) {
        const std::uint64_t run_seed = derive_seed(master_seed, static_cast<std::uint64_t>(run));
        Environment env(cfg);
        auto policy = make_policy(run_seed);

        RunMetrics m;
        m.run_index = run;
        m.seed = run_seed;
        m.episodes = episodes_per_run;

        for (int ep = 0; ep < episodes_per_run; ++ep) {
            env.reset(derive_seed(run_seed, static_cast<std::uint64_t>(ep)));
            double total_reward = 0.0;
            double extension_pay = 0.0;
            while (!env.is_terminal()) {
                const auto features = env.features();
                const auto action = policy->decide(features, env.state());
                const auto outcome = env.step(action);
                total_reward += outcome.reward;
                extension_pay += outcome.diag.extension_pay;
            }
            const auto& final_state = env.state();
            m.mean_episode_reward += total_reward;
            m.mean_lost_count += static_cast<double>(final_state.total_lost);
            m.mean_lost_cost += final_state.total_lost * cfg.economics.lost_penalty;
            m.mean_extension_count +=
                static_cast<double>(final_state.total_extensions_accepted);
            m.mean_extension_cost += extension_pay;
            m.mean_served_committed +=
                static_cast<double>(final_state.total_assigned_committed);
            m.mean_served_occasional +=
                static_cast<double>(final_state.total_assigned_occasional);
            m.mean_arrivals += static_cast<double>(final_state.total_requests_arrived);
            m.mean_arrivals_excl_initial += static_cast<double>(
                final_state.total_requests_arrived - cfg.initial.requests);
        }
        const double n = episodes_per_run;
        m.mean_episode_reward /= n;
        m.mean_lost_count /= n;
        m.mean_lost_cost /= n;
        m.mean_extension_count /= n;
        m.mean_extension_cost /= n;
        m.mean_served_committed /= n;
        m.mean_served_occasional /= n;
        m.mean_arrivals /= n;
        m.mean_arrivals_excl_initial /= n;
        results[run] = m;
    });
    return results;
}

}  // namespace courier
