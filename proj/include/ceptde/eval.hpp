#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceptde/autocorr.hpp"
#include "ceptde/cepstrogram.hpp"
#include "ceptde/estimators.hpp"
#include "ceptde/geometry.hpp"
#include "ceptde/signal.hpp"
#include "ceptde/synthesis.hpp"

namespace ceptde {

// How the subtraction mean is estimated: once over the whole recording
// (two-pass), or as a running mean over the trailing window_frames rows.
enum class MeanMode { full_recording, trailing_window };

struct EstimatorConfig {
  double frame_len_s = 0.1;
  double hop_s = 0.1;
  WindowKind window = WindowKind::hann;
  std::size_t nfft = 0;  // 0: next power of two >= frame length
  double floor_rel = 1e-12;
  double q_min_s = 40e-6;
  double q_max_s = 2000e-6;
  SubtractionConfig subtraction{1.5};
  MeanMode mean_mode = MeanMode::full_recording;
  std::size_t trailing_frames = 20;
};

struct GroundTruthTrack {
  std::vector<double> frame_times_s;
  std::vector<double> true_delays_s;
};

struct DelayEstimateSeries {
  DelayMethod method = DelayMethod::cepstrum;
  std::vector<double> frame_times_s;
  std::vector<DelayEstimate> estimates;
  EstimatorConfig config;
};

struct MAEReport {
  DelayMethod method = DelayMethod::cepstrum;
  double mae_s = 0.0;
  std::size_t frames_used = 0;
  std::size_t frames_excluded = 0;
};

// Predicted delay per track point from the image-source geometry.
inline GroundTruthTrack predicted_delays(const TransitTrack& track,
                                         const EnvironmentModel& env) {
  GroundTruthTrack truth;
  truth.frame_times_s = track.times_s;
  truth.true_delays_s.reserve(track.ground_ranges_m.size());
  for (double d : track.ground_ranges_m) {
    truth.true_delays_s.push_back(multipath_delay(d, env).delay_s);
  }
  return truth;
}

// Runs the requested per-frame delay estimators over one recording. The
// cepstrum-subtracted method estimates the non-rahmonic mean over the full
// recording first (two-pass) unless the config selects the trailing mean.
// When truth is given it only has to align with the frame count.
inline std::vector<DelayEstimateSeries> run_estimators(
    const SampledSignal& recording, const GroundTruthTrack* truth,
    const std::vector<DelayMethod>& methods, const EstimatorConfig& cfg) {
  std::vector<DelayEstimateSeries> result;
  if (methods.empty()) return result;

  const auto frames = frame_signal(recording, cfg.frame_len_s, cfg.hop_s);
  if (truth && truth->true_delays_s.size() != frames.frame_count()) {
    throw std::invalid_argument(
        "run_estimators: truth does not align with recording frames");
  }

  bool need_cepstra = false;
  for (auto m : methods) {
    if (m == DelayMethod::cepstrum || m == DelayMethod::cepstrum_subtracted) {
      need_cepstra = true;
    }
  }

  Cepstrogram cg;
  MeanCepstrum full_mean;
  if (need_cepstra && !frames.empty()) {
    cg = build_cepstrogram(frames, cfg.window, cfg.nfft, cfg.floor_rel);
    if (cfg.mean_mode == MeanMode::full_recording) {
      full_mean = mean_cepstrum(cg);
    }
  }

  for (auto method : methods) {
    DelayEstimateSeries series;
    series.method = method;
    series.config = cfg;
    series.frame_times_s = frames.start_times_s();
    series.estimates.reserve(frames.frame_count());

    for (std::size_t m = 0; m < frames.frame_count(); ++m) {
      DelayEstimate est;
      switch (method) {
        case DelayMethod::cepstrum:
          est = pick_delay(cg.rows[m], cfg.q_min_s, cfg.q_max_s,
                           DelayMethod::cepstrum);
          break;
        case DelayMethod::cepstrum_subtracted: {
          const MeanCepstrum mean =
              cfg.mean_mode == MeanMode::full_recording
                  ? full_mean
                  : trailing_mean_cepstrum(cg, m, cfg.trailing_frames);
          const auto sub = cepstrum_subtract(cg.rows[m], mean, cfg.subtraction);
          est = pick_delay(sub, cfg.q_min_s, cfg.q_max_s,
                           DelayMethod::cepstrum_subtracted);
          break;
        }
        case DelayMethod::autocorrelation: {
          const auto ac =
              autocorrelation(frames.frame(m), cfg.q_max_s + 2e-6,
                              frames.sample_rate_hz());
          est = estimate_delay_autocorr(ac, cfg.q_min_s, cfg.q_max_s);
          break;
        }
      }
      series.estimates.push_back(est);
    }
    result.push_back(std::move(series));
  }
  return result;
}

// Mean absolute error against ground truth. Frames whose true delay falls
// outside the search window are excluded and counted; no outlier rejection.
inline MAEReport mae(const DelayEstimateSeries& series,
                     const GroundTruthTrack& truth) {
  if (series.estimates.size() != truth.true_delays_s.size()) {
    throw std::invalid_argument("mae: series/truth length mismatch");
  }
  MAEReport report;
  report.method = series.method;
  double sum = 0.0;
  for (std::size_t m = 0; m < series.estimates.size(); ++m) {
    const double t = truth.true_delays_s[m];
    if (t < series.config.q_min_s || t > series.config.q_max_s) {
      ++report.frames_excluded;
      continue;
    }
    sum += std::fabs(series.estimates[m].delay_s - t);
    ++report.frames_used;
  }
  report.mae_s = report.frames_used > 0
                     ? sum / static_cast<double>(report.frames_used)
                     : 0.0;
  return report;
}

struct SweepPoint {
  double grid_value = 0.0;
  std::vector<MAEReport> reports;  // one per method
};

struct SweepResult {
  std::string variable;  // "a" or "snr_db"
  std::vector<SweepPoint> points;
};

// MAE as a function of the scalar subtraction factor. The mean cepstrum is
// computed once and reused across the grid. Duplicate grid values are
// dropped with a warning.
inline SweepResult sweep_subtraction_factor(const SampledSignal& recording,
                                            const GroundTruthTrack& truth,
                                            std::vector<double> grid,
                                            const EstimatorConfig& cfg) {
  if (grid.empty()) {
    throw std::invalid_argument("sweep_subtraction_factor: empty grid");
  }
  // Grid values are swept in increasing order; duplicates are dropped.
  std::vector<double> unique_grid(grid);
  std::sort(unique_grid.begin(), unique_grid.end());
  const auto dup = std::unique(unique_grid.begin(), unique_grid.end());
  if (dup != unique_grid.end()) {
    std::cerr << "sweep_subtraction_factor: dropped "
              << unique_grid.end() - dup << " duplicate grid value(s)\n";
    unique_grid.erase(dup, unique_grid.end());
  }
  if (!(unique_grid.front() >= 0.0)) {
    throw std::invalid_argument("sweep_subtraction_factor: negative factor");
  }

  const auto frames = frame_signal(recording, cfg.frame_len_s, cfg.hop_s);
  if (truth.true_delays_s.size() != frames.frame_count()) {
    throw std::invalid_argument(
        "sweep_subtraction_factor: truth does not align with frames");
  }
  const auto cg = build_cepstrogram(frames, cfg.window, cfg.nfft, cfg.floor_rel);
  const auto mean = mean_cepstrum(cg);

  SweepResult result;
  result.variable = "a";
  for (double a : unique_grid) {
    DelayEstimateSeries series;
    series.method = DelayMethod::cepstrum_subtracted;
    series.config = cfg;
    series.config.subtraction = SubtractionConfig(a);
    series.frame_times_s = frames.start_times_s();
    series.estimates.reserve(cg.frame_count());
    for (std::size_t m = 0; m < cg.frame_count(); ++m) {
      const auto sub =
          cepstrum_subtract(cg.rows[m], mean, series.config.subtraction);
      series.estimates.push_back(pick_delay(sub, cfg.q_min_s, cfg.q_max_s,
                                            DelayMethod::cepstrum_subtracted));
    }
    SweepPoint point;
    point.grid_value = a;
    point.reports.push_back(mae(series, truth));
    result.points.push_back(std::move(point));
  }
  return result;
}

// MAE per method as a function of SNR. Each (grid point, realization) draws
// its own noise from a derived seed, so parallel and serial sweeps agree.
// alpha is the echo attenuation of the clean recording; it converts the
// recording's in-band power to direct-path power for the SNR definition.
inline SweepResult sweep_snr(const SampledSignal& clean_recording,
                             const GroundTruthTrack& truth,
                             const NoiseModel& noise_model,
                             const std::vector<double>& snr_grid_db,
                             const std::vector<DelayMethod>& methods,
                             const EstimatorConfig& cfg, double alpha,
                             int realizations = 1,
                             FrequencyBand band = {0.0, 90000.0}) {
  if (snr_grid_db.empty()) {
    throw std::invalid_argument("sweep_snr: empty grid");
  }
  if (realizations < 1) {
    throw std::invalid_argument("sweep_snr: need >= 1 realization");
  }
  std::vector<double> sorted_grid(snr_grid_db);
  std::sort(sorted_grid.begin(), sorted_grid.end());
  sorted_grid.erase(std::unique(sorted_grid.begin(), sorted_grid.end()),
                    sorted_grid.end());
  const double direct_power =
      band_power(clean_recording, band) / (1.0 + alpha * alpha);

  SweepResult result;
  result.variable = "snr_db";
  for (std::size_t i = 0; i < sorted_grid.size(); ++i) {
    SweepPoint point;
    point.grid_value = sorted_grid[i];

    std::vector<MAEReport> acc(methods.size());
    for (int r = 0; r < realizations; ++r) {
      NoiseModel draw = noise_model;
      draw.seed = derive_seed(noise_model.seed,
                              i * 1000003ULL + static_cast<std::uint64_t>(r));
      const auto noise = color_noise(draw, clean_recording.duration_s(),
                                     clean_recording.sample_rate_hz);
      const auto noisy = mix_at_snr(clean_recording, noise, sorted_grid[i],
                                    band, direct_power);
      const auto series = run_estimators(noisy, &truth, methods, cfg);
      for (std::size_t j = 0; j < series.size(); ++j) {
        const auto rep = mae(series[j], truth);
        acc[j].method = rep.method;
        acc[j].mae_s += rep.mae_s;
        acc[j].frames_used = rep.frames_used;
        acc[j].frames_excluded = rep.frames_excluded;
      }
    }
    for (auto& rep : acc) {
      rep.mae_s /= static_cast<double>(realizations);
      point.reports.push_back(rep);
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace ceptde
