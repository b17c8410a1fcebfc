#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace courier {

struct Location {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Location&) const = default;
};

double distance(const Location& a, const Location& b);

// Travel time in periods at the given speed (distance units per period).
double travel_time(const Location& a, const Location& b, double speed);

// Service-area geometry: fixed pickup/delivery point pools plus the courier
// speed. Immutable after construction; safe to share read-only.
struct WorldMap {
    std::vector<Location> pickup_points;
    std::vector<Location> delivery_points;
    double extent = 100.0;
    double speed = 100.0;

    double travel_time(const Location& a, const Location& b) const {
        return courier::travel_time(a, b, speed);
    }

    double diagonal() const;

    std::string to_json_string() const;
    static WorldMap from_json_string(const std::string& text);
};

// Samples both point pools uniformly i.i.d. on [0, extent]^2.
// Deterministic per seed. Throws std::invalid_argument on bad parameters.
WorldMap generate_world(std::uint64_t seed, int n_pickup, int n_delivery,
                        double extent, double speed);

}  // namespace courier
