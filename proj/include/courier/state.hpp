#pragma once

#include <vector>

#include "courier/entities.hpp"

namespace courier {

// Decision-epoch snapshot handed to matching and policies. Entity entries are
// value copies sorted by id; mutating a snapshot never touches the environment.
struct SystemState {
    int epoch = 0;
    int horizon = 0;

    std::vector<Request> present_requests;            // unassigned, within window
    std::vector<CommittedCourier> available_committed;  // on shift, not busy
    std::vector<CommittedCourier> busy_committed;       // on shift, mid-delivery
    std::vector<OccasionalCourier> present_occasional;

    int on_shift_count = 0;               // available + busy committed couriers
    std::vector<int> ending_next_epoch;   // on-shift couriers whose shift ends at
                                          // epoch+1 (extension-notification pool)

    // Episode bookkeeping carried for features and conservation checks.
    long total_requests_arrived = 0;  // includes the initial batch
    long total_assigned_committed = 0;
    long total_assigned_occasional = 0;
    long total_lost = 0;
    long total_extensions_accepted = 0;
};

inline bool is_terminal(const SystemState& s) { return s.epoch >= s.horizon; }

}  // namespace courier
