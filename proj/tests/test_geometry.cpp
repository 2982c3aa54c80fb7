#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ceptde/eval.hpp"
#include "ceptde/geometry.hpp"

using namespace ceptde;

namespace {

// Independent image-source oracle: place source and receiver in 2D
// (range, height) coordinates, mirror the source across the seafloor, take
// Euclidean distances via hypot.
double oracle_delay(double ground_range, double hs, double hr, double c) {
  const double direct = std::hypot(ground_range, hs - hr);
  const double mirrored_source_height = -hs;
  const double indirect = std::hypot(ground_range, hr - mirrored_source_height);
  return (indirect - direct) / c;
}

}  // namespace

TEST_CASE("multipath delay matches the image-source oracle", "[geometry]") {
  const EnvironmentModel env;
  for (double d : {0.0, 1.0, 10.0, 100.0, 200.0, 1000.0}) {
    const auto g = multipath_delay(d, env);
    const double expect = oracle_delay(d, 20.0, 1.0, 1520.0);
    CHECK(g.delay_s == Catch::Approx(expect).epsilon(1e-12));
    CHECK(g.indirect_len_m >= g.direct_len_m);
    CHECK(g.delta_l_m ==
          Catch::Approx(g.indirect_len_m - g.direct_len_m).epsilon(1e-12));
  }
}

TEST_CASE("vertical incidence gives (a - b) / c exactly", "[geometry]") {
  const EnvironmentModel env;
  const auto g = multipath_delay(0.0, env);
  CHECK(g.delay_s == (21.0 - 19.0) / 1520.0);
  CHECK(g.delay_s == Catch::Approx(1315.8e-6).epsilon(1e-4));
}

TEST_CASE("delay decreases strictly with ground range", "[geometry]") {
  const EnvironmentModel env;
  double prev = multipath_delay(0.0, env).delay_s;
  for (double d = 0.5; d < 2000.0; d *= 1.7) {
    const double cur = multipath_delay(d, env).delay_s;
    CHECK(cur < prev);
    CHECK(cur > 0.0);
    prev = cur;
  }
  // Far-field limit: delay ~ (a^2 - b^2) / (2 D c) tends to zero.
  CHECK(multipath_delay(1e6, env).delay_s < 1e-7);
  CHECK(multipath_delay(1e8, env).delay_s < 1e-9);
}

TEST_CASE("environment validation", "[geometry]") {
  EnvironmentModel env;
  env.receiver_height_m = 25.0;  // above the source
  CHECK_THROWS_AS(multipath_delay(10.0, env), std::invalid_argument);
  env = EnvironmentModel{};
  env.source_height_m = 30.0;  // above the water column
  CHECK_THROWS_AS(multipath_delay(10.0, env), std::invalid_argument);
  CHECK_THROWS_AS(multipath_delay(-1.0, EnvironmentModel{}),
                  std::invalid_argument);
}

TEST_CASE("straight transit covers inbound and outbound legs", "[geometry]") {
  const auto track = straight_transit(10.0, 3.0, 200.0, 0.1);
  // One leg is sqrt(200^2 - 10^2) / 3 = 66.58 s.
  const double t_leg = std::sqrt(200.0 * 200.0 - 10.0 * 10.0) / 3.0;
  CHECK(track.cpa_time_s == Catch::Approx(t_leg).epsilon(1e-12));
  CHECK(track.times_s.back() == Catch::Approx(2.0 * t_leg).margin(0.11));
  CHECK(track.ground_ranges_m.front() == Catch::Approx(200.0).epsilon(1e-9));
  CHECK(track.ground_ranges_m.back() ==
        Catch::Approx(200.0).margin(3.0 * 0.11));

  // Ranges decrease to CPA then increase again.
  double min_range = 1e18;
  std::size_t min_at = 0;
  for (std::size_t i = 0; i < track.ground_ranges_m.size(); ++i) {
    if (track.ground_ranges_m[i] < min_range) {
      min_range = track.ground_ranges_m[i];
      min_at = i;
    }
  }
  CHECK(min_range == Catch::Approx(10.0).margin(0.01));
  for (std::size_t i = 1; i <= min_at; ++i) {
    CHECK(track.ground_ranges_m[i] <= track.ground_ranges_m[i - 1] + 1e-12);
  }
  for (std::size_t i = min_at + 1; i < track.ground_ranges_m.size(); ++i) {
    CHECK(track.ground_ranges_m[i] >= track.ground_ranges_m[i - 1] - 1e-12);
  }
}

TEST_CASE("degenerate transits", "[geometry]") {
  SECTION("cpa == start gives a constant-range track") {
    const auto track = straight_transit(50.0, 2.0, 50.0, 0.1);
    REQUIRE(track.times_s.size() == 1);
    CHECK(track.ground_ranges_m[0] == 50.0);
  }
  SECTION("large speed gives few samples") {
    const auto track = straight_transit(10.0, 500.0, 200.0, 0.1);
    CHECK(track.times_s.size() < 10);
  }
  SECTION("bad arguments") {
    CHECK_THROWS_AS(straight_transit(10.0, -1.0, 200.0), std::invalid_argument);
    CHECK_THROWS_AS(straight_transit(100.0, 1.0, 50.0), std::invalid_argument);
  }
}

TEST_CASE("predicted delays map track ranges through the geometry",
          "[geometry][eval]") {
  const EnvironmentModel env;
  SECTION("constant 200 m track") {
    TransitTrack track;
    for (int i = 0; i < 5; ++i) {
      track.times_s.push_back(0.1 * i);
      track.ground_ranges_m.push_back(200.0);
    }
    const auto truth = predicted_delays(track, env);
    REQUIRE(truth.true_delays_s.size() == 5);
    for (double t : truth.true_delays_s) {
      CHECK(t == Catch::Approx(130.9e-6).epsilon(5e-3));
    }
  }
  SECTION("zero-range point gives the vertical-incidence delay") {
    TransitTrack track;
    track.times_s = {0.0};
    track.ground_ranges_m = {0.0};
    const auto truth = predicted_delays(track, env);
    CHECK(truth.true_delays_s[0] == Catch::Approx(1315.8e-6).epsilon(1e-4));
  }
  SECTION("empty track gives empty truth") {
    const auto truth = predicted_delays(TransitTrack{}, env);
    CHECK(truth.true_delays_s.empty());
  }
}
