#include "courier/entities.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace courier {

OfflineSchedule generate_offline_schedule(std::uint64_t seed, int n_couriers,
                                          int horizon, int shift_length,
                                          const WorldMap& world) {
    if (n_couriers <= 0) throw std::invalid_argument("schedule.n_couriers must be > 0");
    if (shift_length <= 0) throw std::invalid_argument("schedule.shift_length must be > 0");
    if (shift_length > horizon)
        throw std::invalid_argument("schedule.shift_length must not exceed the horizon");

    RngStream rng(seed);
    const int span = horizon - shift_length;
    OfflineSchedule schedule;
    schedule.shifts.reserve(n_couriers);
    for (int i = 0; i < n_couriers; ++i) {
        ShiftSpec shift;
        shift.courier_id = i;
        shift.start = n_couriers == 1
                          ? 0
                          : static_cast<int>(std::lround(
                                static_cast<double>(i) * span / (n_couriers - 1)));
        shift.end = shift.start + shift_length;
        const int pick = rng.uniform_int(static_cast<int>(world.pickup_points.size()));
        shift.start_location = world.pickup_points[pick];
        schedule.shifts.push_back(shift);
    }
    return schedule;
}

std::vector<Request> sample_requests(RngStream& rng, int count, int epoch,
                                     int assignment_window, double revenue,
                                     const WorldMap& world, int& next_id) {
    std::vector<Request> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Request r;
        r.id = next_id++;
        r.arrival_epoch = epoch;
        r.deadline_epoch = epoch + assignment_window;
        r.pickup = world.pickup_points[rng.uniform_int(
            static_cast<int>(world.pickup_points.size()))];
        r.delivery = world.delivery_points[rng.uniform_int(
            static_cast<int>(world.delivery_points.size()))];
        r.revenue = revenue;
        out.push_back(r);
    }
    return out;
}

std::vector<Request> sample_request_arrivals(RngStream& rng, double rate,
                                             int epoch, int assignment_window,
                                             double revenue, const WorldMap& world,
                                             int& next_id) {
    const int count = rng.poisson(rate);
    return sample_requests(rng, count, epoch, assignment_window, revenue, world,
                           next_id);
}

std::vector<OccasionalCourier> sample_occasionals(RngStream& rng,
                                                  RngStream& patience_rng,
                                                  int count, int epoch,
                                                  double patience_mean,
                                                  const WorldMap& world,
                                                  int& next_id) {
    std::vector<OccasionalCourier> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        OccasionalCourier c;
        c.id = next_id++;
        c.arrival_epoch = epoch;
        c.location = {rng.uniform(0.0, world.extent), rng.uniform(0.0, world.extent)};
        c.patience_periods = patience_rng.poisson(patience_mean);
        out.push_back(c);
    }
    return out;
}

std::vector<OccasionalCourier> sample_occasional_arrivals(
    RngStream& rng, RngStream& patience_rng, double rate, int epoch,
    double patience_mean, const WorldMap& world, int& next_id) {
    const int count = rng.poisson(rate);
    return sample_occasionals(rng, patience_rng, count, epoch, patience_mean,
                              world, next_id);
}

std::string OfflineSchedule::to_json_string() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : shifts) {
        arr.push_back({{"courier_id", s.courier_id},
                       {"start", s.start},
                       {"end", s.end},
                       {"x", s.start_location.x},
                       {"y", s.start_location.y}});
    }
    return nlohmann::json{{"shifts", arr}}.dump(2);
}

OfflineSchedule OfflineSchedule::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    OfflineSchedule schedule;
    for (const auto& s : j.at("shifts")) {
        ShiftSpec shift;
        shift.courier_id = s.at("courier_id").get<int>();
        shift.start = s.at("start").get<int>();
        shift.end = s.at("end").get<int>();
        shift.start_location = {s.at("x").get<double>(), s.at("y").get<double>()};
        if (shift.end < shift.start)
            throw std::invalid_argument("schedule shift end precedes start");
        schedule.shifts.push_back(shift);
    }
    return schedule;
}

}  // namespace courier
