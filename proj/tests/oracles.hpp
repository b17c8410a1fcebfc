#pragma once

// Independent reference implementations used only by tests: a from-scratch
// reward calculator, a brute-force one-epoch matcher, value iteration for a
// tiny two-state decision process, a finite-difference gradient, and a random
// coherent-state generator. None of these share code with the checked paths.

#include <array>
#include <vector>

#include "courier/config.hpp"
#include "courier/environment.hpp"
#include "courier/matching.hpp"
#include "courier/neuralnet.hpp"
#include "courier/rng.hpp"
#include "courier/state.hpp"

namespace courier::testing {

// Literal evaluation of the per-epoch reward from the pre-decision state, the
// expanded action, and the observed extension acceptances.
double reward_oracle(const SystemState& pre, const ExpandedAction& expanded,
                     const std::vector<int>& accepted_ids, const EpisodeConfig& cfg);

// Exhaustive search over all partial matchings for the best action-dependent
// one-step value (assignment gains minus unavoidable expiry penalties).
double best_one_step_assignment(const SystemState& state, const EconomicsConfig& econ);

// Random state whose entities satisfy the presence invariants at `epoch`.
FixtureState random_fixture(RngStream& rng, const EpisodeConfig& cfg,
                            const WorldMap& world, int epoch);

// Deterministic two-state, two-action process: taking action a moves to state
// a and pays rewards[s][a].
struct ToyMdp {
    std::array<std::array<double, 2>, 2> rewards{{{5.0, 10.0}, {-1.0, 2.0}}};

    std::array<std::array<double, 2>, 2> optimal_q(double gamma, int sweeps = 500) const;
    static std::vector<double> features(int state);
};

// Central-difference gradient of the minibatch MSE loss.
MlpParams finite_difference_gradient(const MlpParams& params,
                                     const std::vector<std::vector<double>>& inputs,
                                     const std::vector<int>& actions,
                                     const std::vector<double>& targets,
                                     double h = 1e-6);

double max_relative_gradient_error(const MlpParams& analytic, const MlpParams& numeric);

// Audits one transition against the pre-state and the reported set deltas:
// courier/request/occasional set algebra, request conservation, and the
// reward decomposition. Returns a description of the first violation, or an
// empty string when everything holds.
std::string check_transition(const SystemState& pre, const TransitionOutcome& out);

}  // namespace courier::testing
