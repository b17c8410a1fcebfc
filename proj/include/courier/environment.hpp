#pragma once

#include <cstdint>
#include <vector>

#include "courier/config.hpp"
#include "courier/matching.hpp"
#include "courier/state.hpp"
#include "courier/world.hpp"

namespace courier {

// Per-step reward components (positive magnitudes; signs applied in reward)
// plus the set deltas needed to audit the transition algebra.
struct StepDiagnostics {
    double revenue = 0.0;
    double wage_cost = 0.0;
    double committed_distance_cost = 0.0;
    double occasional_fixed_cost = 0.0;
    double occasional_distance_cost = 0.0;
    double lost_penalty = 0.0;
    double extension_pay = 0.0;

    int assignments_committed = 0;
    int assignments_occasional = 0;
    int lost_now = 0;
    int notifications_sent = 0;
    int extensions_accepted = 0;

    std::vector<int> notified_courier_ids;
    std::vector<int> accepted_courier_ids;
    std::vector<AssignmentPair> assignment_pairs;

    // Transition sets, by entity id.
    std::vector<int> committed_started;     // shifts beginning in (t, t+1]
    std::vector<int> committed_extended;    // accepted an extension at t
    std::vector<int> committed_ended;       // shifts over after t
    std::vector<int> committed_released;    // busy -> free at t+1
    std::vector<int> committed_now_busy;    // assigned this epoch
    std::vector<int> occasional_arrived;
    std::vector<int> occasional_assigned;
    std::vector<int> occasional_abandoned;
    std::vector<int> requests_arrived;
    std::vector<int> requests_assigned;
    std::vector<int> requests_lost;

    double reward_sum() const {
        return revenue - wage_cost - committed_distance_cost -
               occasional_fixed_cost - occasional_distance_cost - lost_penalty -
               extension_pay;
    }
};

struct TransitionOutcome {
    SystemState next_state;
    double reward = 0.0;
    StepDiagnostics diag;
};

// Normalization constants for the fixed-length feature vector, derived from
// the episode configuration so every component lands in [0, 1].
struct FeatureScaling {
    double horizon = 1.0;
    double request_cap = 1.0;
    double committed_cap = 1.0;
    double occasional_cap = 1.0;
    double ending_cap = 1.0;
    double slack_cap = 1.0;
    double distance_cap = 1.0;
    double lost_cap = 1.0;
    double extension_cap = 1.0;

    static FeatureScaling from_config(const EpisodeConfig& cfg, const WorldMap& world);
};

constexpr int kFeatureCount = 12;

std::vector<double> observe_features(const SystemState& state,
                                     const FeatureScaling& scaling);

// Explicit entity roster for constructing controlled single-epoch scenarios.
struct FixtureState {
    int epoch = 0;
    std::vector<CommittedCourier> committed;
    std::vector<OccasionalCourier> occasional;
    std::vector<Request> requests;
};

// The sequential decision engine: owns the entity rosters and the stochastic
// streams of one episode. Strictly single-threaded; run one instance per
// thread with distinct seeds for parallel replications.
class Environment {
public:
    explicit Environment(const EpisodeConfig& cfg);
    Environment(const EpisodeConfig& cfg, WorldMap world, OfflineSchedule schedule);

    // Builds the initial state: the configured number of initial requests,
    // committed couriers (the earliest scheduled shifts pulled to epoch 0),
    // and occasional couriers, all drawn from freshly seeded substreams.
    const SystemState& reset(std::uint64_t master_seed);

    // Loads an explicit state; stochastic streams are seeded from `seed`.
    const SystemState& load_fixture(const FixtureState& fixture,
                                    std::uint64_t seed = 0);

    const SystemState& state() const { return snapshot_; }
    bool is_terminal() const { return courier::is_terminal(snapshot_); }

    // Runs one decision epoch: expand the action, sample extension responses,
    // apply assignments, price the step, then inject arrivals, releases,
    // shift boundaries and abandonments. Throws std::logic_error if called on
    // a terminal state.
    TransitionOutcome step(const CompositeAction& action);

    std::vector<double> features() const;

    const EpisodeConfig& config() const { return cfg_; }
    const WorldMap& world() const { return world_; }
    const OfflineSchedule& schedule() const { return schedule_; }
    const FeatureScaling& scaling() const { return scaling_; }

    // Whole-episode rosters, for traces and conservation checks.
    const std::vector<Request>& all_requests() const { return requests_; }
    const std::vector<CommittedCourier>& all_committed() const { return committed_; }

private:
    void rebuild_snapshot();
    void validate_ready() const;

    EpisodeConfig cfg_;
    WorldMap world_;
    OfflineSchedule schedule_;
    FeatureScaling scaling_;

    std::vector<CommittedCourier> committed_;
    std::vector<OccasionalCourier> occasional_;  // currently present only
    std::vector<Request> requests_;              // every request generated so far

    RngStream request_rng_;
    RngStream occasional_rng_;
    RngStream patience_rng_;
    RngStream acceptance_rng_;

    int epoch_ = 0;
    int next_request_id_ = 0;
    int next_occasional_id_ = 0;
    long total_lost_ = 0;
    long total_assigned_committed_ = 0;
    long total_assigned_occasional_ = 0;
    long total_extensions_ = 0;
    bool ready_ = false;

    SystemState snapshot_;
};

}  // namespace courier
