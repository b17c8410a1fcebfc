#include "courier/world.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "courier/rng.hpp"

namespace courier {

double distance(const Location& a, const Location& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double travel_time(const Location& a, const Location& b, double speed) {
    return distance(a, b) / speed;
}

double WorldMap::diagonal() const { return extent * std::sqrt(2.0); }

WorldMap generate_world(std::uint64_t seed, int n_pickup, int n_delivery,
                        double extent, double speed) {
    if (n_pickup <= 0) throw std::invalid_argument("world.n_pickup must be > 0");
    if (n_delivery <= 0) throw std::invalid_argument("world.n_delivery must be > 0");
    if (extent <= 0.0) throw std::invalid_argument("world.extent must be > 0");
    if (speed <= 0.0) throw std::invalid_argument("world.speed must be > 0");

    WorldMap world;
    world.extent = extent;
    world.speed = speed;
    RngStream rng(seed);
    world.pickup_points.reserve(n_pickup);
    for (int i = 0; i < n_pickup; ++i)
        world.pickup_points.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent)});
    world.delivery_points.reserve(n_delivery);
    for (int i = 0; i < n_delivery; ++i)
        world.delivery_points.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent)});
    return world;
}

namespace {

nlohmann::json points_to_json(const std::vector<Location>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({{"x", p.x}, {"y", p.y}});
    return arr;
}

std::vector<Location> points_from_json(const nlohmann::json& arr) {
    std::vector<Location> pts;
    pts.reserve(arr.size());
    for (const auto& p : arr) pts.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
    return pts;
}

}  // namespace

std::string WorldMap::to_json_string() const {
    nlohmann::json j;
    j["extent"] = extent;
    j["speed"] = speed;
    j["pickup_points"] = points_to_json(pickup_points);
    j["delivery_points"] = points_to_json(delivery_points);
    return j.dump(2);
}

WorldMap WorldMap::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    WorldMap world;
    world.extent = j.at("extent").get<double>();
    world.speed = j.at("speed").get<double>();
    if (world.extent <= 0.0) throw std::invalid_argument("world.extent must be > 0");
    if (world.speed <= 0.0) throw std::invalid_argument("world.speed must be > 0");
    world.pickup_points = points_from_json(j.at("pickup_points"));
    world.delivery_points = points_from_json(j.at("delivery_points"));
    return world;
}

}  // namespace courier
