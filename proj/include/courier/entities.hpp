#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "courier/rng.hpp"
#include "courier/world.hpp"

namespace courier {

struct Request {
    int id = 0;
    int arrival_epoch = 0;
    int deadline_epoch = 0;  // latest epoch at which assignment is still possible
    Location pickup;
    Location delivery;
    double revenue = 0.0;
    bool lost = false;
    std::optional<int> assigned_epoch;

    bool assignable_at(int epoch) const {
        return !lost && !assigned_epoch && arrival_epoch <= epoch &&
               epoch <= deadline_epoch;
    }
};

struct CommittedCourier {
    int id = 0;
    int shift_start = 0;
    int shift_end = 0;  // inclusive; grows by the extension length per acceptance
    Location location;
    bool busy = false;
    double busy_until = 0.0;  // real-valued epoch time of the current delivery's end
    bool extension_active = false;
    int extension_pay_until = -1;  // exclusive end of the per-period compensation window
    int extensions_accepted = 0;

    bool on_shift(int epoch) const {
        return shift_start <= epoch && epoch <= shift_end;
    }
    bool available(int epoch) const { return on_shift(epoch) && !busy; }
    // Compensation runs from the acceptance epoch for exactly the extension
    // length, so each accepted extension is charged the full per-period rate.
    bool paying_extension(int epoch) const { return epoch < extension_pay_until; }
};

struct OccasionalCourier {
    int id = 0;
    int arrival_epoch = 0;
    Location location;
    int patience_periods = 0;  // idle periods tolerated before abandoning
};

struct ShiftSpec {
    int courier_id = 0;
    int start = 0;
    int end = 0;  // inclusive
    Location start_location;
};

struct OfflineSchedule {
    std::vector<ShiftSpec> shifts;  // sorted by courier id

    std::string to_json_string() const;
    static OfflineSchedule from_json_string(const std::string& text);
};

// Equal-length shifts with start times evenly staggered over
// [0, horizon - shift_length]; courier start locations drawn uniformly from
// the world's pickup pool. Deterministic per seed.
OfflineSchedule generate_offline_schedule(std::uint64_t seed, int n_couriers,
                                          int horizon, int shift_length,
                                          const WorldMap& world);

// Draws `count` requests arriving at `epoch` with pickup/delivery uniform over
// the world pools. Ids are assigned from `next_id` onward.
std::vector<Request> sample_requests(RngStream& rng, int count, int epoch,
                                     int assignment_window, double revenue,
                                     const WorldMap& world, int& next_id);

// Poisson(rate) sized batch of new requests for one period.
std::vector<Request> sample_request_arrivals(RngStream& rng, double rate,
                                             int epoch, int assignment_window,
                                             double revenue, const WorldMap& world,
                                             int& next_id);

std::vector<OccasionalCourier> sample_occasionals(RngStream& rng,
                                                  RngStream& patience_rng,
                                                  int count, int epoch,
                                                  double patience_mean,
                                                  const WorldMap& world,
                                                  int& next_id);

std::vector<OccasionalCourier> sample_occasional_arrivals(
    RngStream& rng, RngStream& patience_rng, double rate, int epoch,
    double patience_mean, const WorldMap& world, int& next_id);

inline bool sample_extension_response(RngStream& rng, double accept_prob) {
    return rng.bernoulli(accept_prob);
}

}  // namespace courier
