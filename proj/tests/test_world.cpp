#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "courier/rng.hpp"
#include "courier/world.hpp"

using namespace courier;

TEST_CASE("distance basics") {
    CHECK(distance({0, 0}, {0, 0}) == doctest::Approx(0.0));
    CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(distance({10, 20}, {70, 100}) == doctest::Approx(100.0));
}

TEST_CASE("distance is a metric on random triples") {
    RngStream rng(7);
    for (int i = 0; i < 500; ++i) {
        const Location a{rng.uniform(0, 100), rng.uniform(0, 100)};
        const Location b{rng.uniform(0, 100), rng.uniform(0, 100)};
        const Location c{rng.uniform(0, 100), rng.uniform(0, 100)};
        CHECK(distance(a, b) >= 0.0);
        CHECK(distance(a, b) == doctest::Approx(distance(b, a)));
        CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    }
    CHECK(distance({4, 4}, {4, 4}) == 0.0);
}

TEST_CASE("travel time scales with speed") {
    const Location a{0, 0};
    const Location b{100, 0};
    CHECK(travel_time(a, a, 100.0) == doctest::Approx(0.0));
    CHECK(travel_time(a, b, 100.0) == doctest::Approx(1.0));
    CHECK(travel_time(a, {50, 0}, 100.0) == doctest::Approx(0.5));
    RngStream rng(3);
    for (int i = 0; i < 100; ++i) {
        const Location p{rng.uniform(0, 100), rng.uniform(0, 100)};
        const Location q{rng.uniform(0, 100), rng.uniform(0, 100)};
        const double s = rng.uniform(1.0, 200.0);
        CHECK(travel_time(p, q, 2 * s) == doctest::Approx(travel_time(p, q, s) / 2));
    }
}

TEST_CASE("world generation is seeded and bounded") {
    const auto w1 = generate_world(42, 40, 40, 100.0, 100.0);
    const auto w2 = generate_world(42, 40, 40, 100.0, 100.0);
    const auto w3 = generate_world(43, 40, 40, 100.0, 100.0);

    REQUIRE(w1.pickup_points.size() == 40);
    REQUIRE(w1.delivery_points.size() == 40);
    for (const auto& p : w1.pickup_points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 100.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 100.0);
    }
    CHECK(w1.pickup_points == w2.pickup_points);
    CHECK(w1.delivery_points == w2.delivery_points);
    CHECK(w1.pickup_points != w3.pickup_points);
}

TEST_CASE("world generation rejects bad parameters") {
    CHECK_THROWS_AS(generate_world(1, 0, 40, 100.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_world(1, 40, 40, 0.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_world(1, 40, 40, 100.0, 0.0), std::invalid_argument);
}

TEST_CASE("world json round trip") {
    const auto w = generate_world(11, 5, 7, 80.0, 120.0);
    const auto restored = WorldMap::from_json_string(w.to_json_string());
    CHECK(restored.pickup_points == w.pickup_points);
    CHECK(restored.delivery_points == w.delivery_points);
    CHECK(restored.extent == w.extent);
    CHECK(restored.speed == w.speed);
}
