#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ceptde/cepstrogram.hpp"
#include "ceptde/eval.hpp"
#include "ceptde/geometry.hpp"
#include "ceptde/synthesis.hpp"

namespace ceptde {

inline constexpr const char* kVersion = "0.1.0";

// CSV conventions: '.' decimal separator, comment lines start with '#',
// times in seconds, delays and quefrencies in microseconds.

using MetaRows = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": cannot parse number '" + s + "'");
  }
}

inline void write_meta(std::ofstream& f, const MetaRows& meta) {
  for (const auto& [k, v] : meta) f << "# " << k << "=" << v << "\n";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Track CSV: header `time_s,range_m`, strictly increasing times.

inline TransitTrack read_track_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_track_csv: cannot open " + path);

  TransitTrack track;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string s = detail::strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (!header_seen) {
      const auto cols = detail::split_csv(s);
      if (cols.size() != 2 || cols[0] != "time_s" || cols[1] != "range_m") {
        throw std::runtime_error(
            "read_track_csv: expected header 'time_s,range_m' in " + path);
      }
      header_seen = true;
      continue;
    }
    const auto cols = detail::split_csv(s);
    if (cols.size() != 2) {
      throw std::runtime_error("read_track_csv: line " +
                               std::to_string(line_no) + ": need 2 columns");
    }
    const double t = detail::parse_double(cols[0], "read_track_csv");
    const double r = detail::parse_double(cols[1], "read_track_csv");
    if (!track.times_s.empty() && !(t > track.times_s.back())) {
      throw std::runtime_error("read_track_csv: line " +
                               std::to_string(line_no) +
                               ": time not increasing");
    }
    if (r < 0.0) {
      throw std::runtime_error("read_track_csv: line " +
                               std::to_string(line_no) + ": negative range");
    }
    track.times_s.push_back(t);
    track.ground_ranges_m.push_back(r);
  }
  if (track.times_s.empty()) {
    throw std::runtime_error("read_track_csv: no data rows in " + path);
  }

  std::size_t cpa = 0;
  for (std::size_t i = 1; i < track.ground_ranges_m.size(); ++i) {
    if (track.ground_ranges_m[i] < track.ground_ranges_m[cpa]) cpa = i;
  }
  track.cpa_time_s = track.times_s[cpa];
  track.cpa_range_m = track.ground_ranges_m[cpa];
  return track;
}

// Linear interpolation of logged ranges onto arbitrary frame times.
inline std::vector<double> resample_track_ranges(
    const TransitTrack& track, const std::vector<double>& frame_times_s) {
  std::vector<double> out;
  out.reserve(frame_times_s.size());
  for (double t : frame_times_s) {
    if (t <= track.times_s.front()) {
      out.push_back(track.ground_ranges_m.front());
      continue;
    }
    if (t >= track.times_s.back()) {
      out.push_back(track.ground_ranges_m.back());
      continue;
    }
    std::size_t i = 1;
    while (track.times_s[i] < t) ++i;
    const double t0 = track.times_s[i - 1], t1 = track.times_s[i];
    const double r0 = track.ground_ranges_m[i - 1],
                 r1 = track.ground_ranges_m[i];
    out.push_back(r0 + (r1 - r0) * (t - t0) / (t1 - t0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truth CSV: `frame_time_s,true_delay_us`.

inline void write_truth_csv(const std::string& path,
                            const GroundTruthTrack& truth,
                            const MetaRows& meta = {}) {
  auto f = detail::open_out(path);
  detail::write_meta(f, meta);
  f << "frame_time_s,true_delay_us\n";
  for (std::size_t i = 0; i < truth.frame_times_s.size(); ++i) {
    f << detail::fmt_double(truth.frame_times_s[i]) << ","
      << detail::fmt_double(truth.true_delays_s[i] * 1e6) << "\n";
  }
}

inline GroundTruthTrack read_truth_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_truth_csv: cannot open " + path);
  GroundTruthTrack truth;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    const std::string s = detail::strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // header row
      continue;
    }
    const auto cols = detail::split_csv(s);
    if (cols.size() != 2) {
      throw std::runtime_error("read_truth_csv: need 2 columns in " + path);
    }
    truth.frame_times_s.push_back(
        detail::parse_double(cols[0], "read_truth_csv"));
    truth.true_delays_s.push_back(
        detail::parse_double(cols[1], "read_truth_csv") * 1e-6);
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Estimates CSV: `frame_time_s,method,delay_us,peak_value`.

inline void write_estimates_csv(
    const std::string& path, const std::vector<DelayEstimateSeries>& series,
    const MetaRows& meta = {}) {
  auto f = detail::open_out(path);
  detail::write_meta(f, meta);
  f << "frame_time_s,method,delay_us,peak_value\n";
  for (const auto& s : series) {
    for (std::size_t m = 0; m < s.estimates.size(); ++m) {
      f << detail::fmt_double(s.frame_times_s[m]) << "," << to_string(s.method)
        << "," << detail::fmt_double(s.estimates[m].delay_s * 1e6) << ","
        << detail::fmt_double(s.estimates[m].peak_value) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Sweep CSV: `grid_value,method,mae_us,frames_used,frames_excluded`.

inline void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                            const MetaRows& meta = {}) {
  auto f = detail::open_out(path);
  detail::write_meta(f, meta);
  f << "grid_value,method,mae_us,frames_used,frames_excluded\n";
  for (const auto& point : sweep.points) {
    for (const auto& rep : point.reports) {
      f << detail::fmt_double(point.grid_value) << "," << to_string(rep.method)
        << "," << detail::fmt_double(rep.mae_s * 1e6) << "," << rep.frames_used
        << "," << rep.frames_excluded << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Cepstrogram CSV. First non-comment row is the quefrency axis in
// microseconds (starting at 0); each following row is one frame, prefixed
// by its start time. Values are cepstrum magnitudes.

inline void write_cepstrogram_csv(const Cepstrogram& cg,
                                  const std::string& path, double q_max_us,
                                  const MetaRows& meta = {}) {
  auto f = detail::open_out(path);
  detail::write_meta(f, meta);
  if (cg.empty()) {
    f << "time_s\n";
    return;
  }
  const double step_us = cg.rows[0].quefrency_step_s * 1e6;
  const double extent_us =
      static_cast<double>(cg.rows[0].values.size() - 1) * step_us;
  if (!(q_max_us > 0.0) || q_max_us > extent_us * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "write_cepstrogram_csv: q_max outside quefrency axis");
  }
  const auto k_max =
      static_cast<std::size_t>(std::floor(q_max_us / step_us + 1e-9));

  f << "time_s";
  for (std::size_t k = 0; k <= k_max; ++k) {
    f << "," << detail::fmt_double(static_cast<double>(k) * step_us);
  }
  f << "\n";
  for (std::size_t m = 0; m < cg.rows.size(); ++m) {
    f << detail::fmt_double(cg.frame_times_s[m]);
    for (std::size_t k = 0; k <= k_max; ++k) {
      f << "," << detail::fmt_double(std::fabs(cg.rows[m].values[k]));
    }
    f << "\n";
  }
}

// ---------------------------------------------------------------------------
// Reference PSD CSV: `freq_hz,psd`, ascending frequency.

inline NoiseModel read_psd_csv(const std::string& path, std::uint64_t seed) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_psd_csv: cannot open " + path);
  std::vector<double> freq, psd;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    const std::string s = detail::strip(line);
    if (s.empty() || s[0] == '#') continue;
    const auto cols = detail::split_csv(s);
    if (!header_seen && cols.size() == 2 && cols[0] == "freq_hz") {
      header_seen = true;
      continue;
    }
    header_seen = true;
    if (cols.size() != 2) {
      throw std::runtime_error("read_psd_csv: need 2 columns in " + path);
    }
    freq.push_back(detail::parse_double(cols[0], "read_psd_csv"));
    psd.push_back(detail::parse_double(cols[1], "read_psd_csv"));
  }
  return NoiseModel::from_points(freq, psd, seed);
}

// ---------------------------------------------------------------------------
// Scenario file: flat key/value text with [sections]; unknown keys are
// rejected so config typos fail loudly.

struct NoiseSpec {
  std::optional<std::string> psd_file;  // absent: flat reference PSD
  std::optional<double> snr_db;         // absent: no noise added
  std::uint64_t seed = 1;
};

// Defaults reproduce the reference transit: 200 m inbound to a 10 m CPA
// and back out at 1.5 m/s, about 270 s of recording in 0.1 s frames.
struct Scenario {
  EnvironmentModel env;
  double cpa_range_m = 10.0;
  double speed_mps = 1.5;
  double start_range_m = 200.0;
  double alpha = 1.0;
  NoiseSpec noise;
};

inline Scenario read_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_scenario: cannot open " + path);

  Scenario sc;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::string s = detail::strip(line);
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = detail::strip(s.substr(0, hash));
    if (s.empty()) continue;

    if (s.front() == '[' && s.back() == ']') {
      section = detail::strip(s.substr(1, s.size() - 2));
      if (section != "environment" && section != "track" &&
          section != "echo" && section != "noise") {
        throw std::runtime_error("read_scenario: line " +
                                 std::to_string(line_no) +
                                 ": unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("read_scenario: line " +
                               std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = detail::strip(s.substr(0, eq));
    const std::string value = detail::strip(s.substr(eq + 1));
    const std::string where = "read_scenario: line " + std::to_string(line_no);

    auto num = [&] { return detail::parse_double(value, where); };
    if (section == "environment") {
      if (key == "sound_speed_mps") sc.env.sound_speed_mps = num();
      else if (key == "water_depth_m") sc.env.water_depth_m = num();
      else if (key == "source_height_m") sc.env.source_height_m = num();
      else if (key == "receiver_height_m") sc.env.receiver_height_m = num();
      else throw std::runtime_error(where + ": unknown key '" + key + "'");
    } else if (section == "track") {
      if (key == "cpa_range_m") sc.cpa_range_m = num();
      else if (key == "speed_mps") sc.speed_mps = num();
      else if (key == "start_range_m") sc.start_range_m = num();
      else throw std::runtime_error(where + ": unknown key '" + key + "'");
    } else if (section == "echo") {
      if (key == "alpha") sc.alpha = num();
      else throw std::runtime_error(where + ": unknown key '" + key + "'");
    } else if (section == "noise") {
      if (key == "psd") {
        if (value != "flat") {
          throw std::runtime_error(where + ": psd must be 'flat' (or use psd_file)");
        }
        sc.noise.psd_file.reset();
      } else if (key == "psd_file") {
        sc.noise.psd_file = value;
      } else if (key == "snr_db") {
        sc.noise.snr_db = num();
      } else if (key == "seed") {
        sc.noise.seed = static_cast<std::uint64_t>(
            std::strtoull(value.c_str(), nullptr, 10));
      } else {
        throw std::runtime_error(where + ": unknown key '" + key + "'");
      }
    } else {
      throw std::runtime_error(where + ": key outside any section");
    }
  }
  sc.env.validate();
  return sc;
}

}  // namespace ceptde
