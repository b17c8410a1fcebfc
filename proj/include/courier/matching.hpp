#pragma once

#include <string>
#include <vector>

#include "courier/config.hpp"
#include "courier/state.hpp"

namespace courier {

enum class AssignmentRule {
    GlobalGreedy,     // cheapest profitable (request, courier) pairs across both types
    CommittedFirst,   // nearest-courier greedy over committed, then occasional
    OccasionalFirst,  // reverse order
    DeferAll,         // no assignments this epoch
};

const char* to_string(AssignmentRule rule);

// One entry of the discrete action catalog the Q-network ranks.
struct CompositeAction {
    int extension_count = 0;  // couriers to notify, clamped to budget and eligibility
    AssignmentRule rule = AssignmentRule::GlobalGreedy;

    bool operator==(const CompositeAction&) const = default;
};

enum class CourierType { Committed, Occasional };

struct AssignmentPair {
    int request_id = 0;
    CourierType courier_type = CourierType::Committed;
    int courier_id = 0;

    bool operator==(const AssignmentPair&) const = default;
};

struct ExpandedAction {
    std::vector<int> notify_ids;  // committed couriers offered an extension
    std::vector<AssignmentPair> assignments;
};

// Full fixed-order catalog: extension counts 0..max_notified crossed with the
// four assignment rules. Constant size so the Q-network output is fixed.
std::vector<CompositeAction> action_catalog(int max_notified);

// Stable description of the catalog ordering; checkpoints embed a fingerprint
// of this so a trained network is never applied to a reordered action space.
std::string catalog_description(int max_notified);

// Deterministically expands a catalog entry against a state. Output always
// satisfies the notification budget and the one-request-per-courier /
// one-courier-per-request matching constraints.
ExpandedAction expand(const SystemState& state, const CompositeAction& action,
                      const EconomicsConfig& econ);

// Marginal serving cost of a pair (committed: per-distance for both legs;
// occasional: fixed fee plus per-distance for the delivery leg).
double serving_cost(const Request& req, CourierType type,
                    const Location& courier_location, const EconomicsConfig& econ);

// Action-dependent part of the one-step reward: sum of (revenue - serving
// cost) over the pairs minus the lost-request penalty for requests expiring
// this epoch that the action leaves unassigned.
double assignment_value(const SystemState& state, const ExpandedAction& expanded,
                        const EconomicsConfig& econ);

}  // namespace courier
