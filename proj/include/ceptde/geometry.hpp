#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ceptde {

// Isovelocity shallow-water channel with a flat seafloor. Heights are
// measured above the seafloor.
struct EnvironmentModel {
  double sound_speed_mps = 1520.0;
  double water_depth_m = 20.0;
  double source_height_m = 20.0;
  double receiver_height_m = 1.0;

  void validate() const {
    if (!(sound_speed_mps > 0.0) || !(water_depth_m > 0.0)) {
      throw std::invalid_argument("EnvironmentModel: non-positive medium");
    }
    if (!(receiver_height_m > 0.0) ||
        !(receiver_height_m < source_height_m) ||
        !(source_height_m <= water_depth_m)) {
      throw std::invalid_argument(
          "EnvironmentModel: need 0 < receiver height < source height <= depth");
    }
  }
};

struct PathGeometry {
  double ground_range_m = 0.0;
  double direct_len_m = 0.0;
  double indirect_len_m = 0.0;
  double delta_l_m = 0.0;
  double delay_s = 0.0;
};

// Image-source construction for one seafloor bounce: the indirect path runs
// to the source's mirror image below the seafloor. Delay is maximal at
// zero range, exactly ((hs+hr) - (hs-hr)) / c, and strictly decreases with
// ground range.
inline PathGeometry multipath_delay(double ground_range_m,
                                    const EnvironmentModel& env) {
  env.validate();
  if (!(ground_range_m >= 0.0)) {
    throw std::invalid_argument("multipath_delay: negative ground range");
  }
  const double a = env.source_height_m + env.receiver_height_m;
  const double b = env.source_height_m - env.receiver_height_m;
  const double d2 = ground_range_m * ground_range_m;

  PathGeometry g;
  g.ground_range_m = ground_range_m;
  g.direct_len_m = std::sqrt(d2 + b * b);
  g.indirect_len_m = std::sqrt(d2 + a * a);
  g.delta_l_m = g.indirect_len_m - g.direct_len_m;
  g.delay_s = g.delta_l_m / env.sound_speed_mps;
  return g;
}

// Straight-line transit past the sensor: ranges decrease from start_range
// to the closest point of approach, then mirror back out.
struct TransitTrack {
  std::vector<double> times_s;
  std::vector<double> ground_ranges_m;
  double cpa_time_s = 0.0;
  double cpa_range_m = 0.0;
  double speed_mps = 0.0;
};

inline TransitTrack straight_transit(double cpa_range_m, double speed_mps,
                                     double start_range_m,
                                     double step_s = 0.1) {
  if (!(speed_mps > 0.0) || !(step_s > 0.0)) {
    throw std::invalid_argument("straight_transit: non-positive speed or step");
  }
  if (!(start_range_m >= cpa_range_m) || !(cpa_range_m >= 0.0)) {
    throw std::invalid_argument(
        "straight_transit: need start_range >= cpa_range >= 0");
  }

  // Along-track offset covered per leg.
  const double x0 = std::sqrt(start_range_m * start_range_m -
                              cpa_range_m * cpa_range_m);
  const double t_leg = x0 / speed_mps;

  TransitTrack track;
  track.cpa_range_m = cpa_range_m;
  track.cpa_time_s = t_leg;
  track.speed_mps = speed_mps;

  const auto steps =
      static_cast<std::size_t>(std::floor(2.0 * t_leg / step_s + 1e-9));
  track.times_s.reserve(steps + 1);
  track.ground_ranges_m.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * step_s;
    const double x = std::fabs(x0 - speed_mps * t);
    track.times_s.push_back(t);
    track.ground_ranges_m.push_back(
        std::sqrt(cpa_range_m * cpa_range_m + x * x));
  }
  return track;
}

}  // namespace ceptde
