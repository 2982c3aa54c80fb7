#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ceptde/cepstrum.hpp"
#include "ceptde/signal.hpp"
#include "ceptde/spectrum.hpp"

namespace ceptde {

// Stack of per-frame power cepstra sharing one quefrency axis.
struct Cepstrogram {
  std::vector<PowerCepstrum> rows;
  std::vector<double> frame_times_s;

  std::size_t frame_count() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

inline Cepstrogram build_cepstrogram(const FrameSequence& frames,
                                     WindowKind window, std::size_t nfft,
                                     double floor_rel) {
  Cepstrogram cg;
  if (frames.empty()) return cg;
  if (nfft == 0) nfft = next_pow2(frames.frame_len_samples());

  cg.rows.reserve(frames.frame_count());
  cg.frame_times_s.reserve(frames.frame_count());
  for (std::size_t m = 0; m < frames.frame_count(); ++m) {
    const auto ps =
        power_spectrum(frames.frame(m), window, nfft, frames.sample_rate_hz());
    cg.rows.push_back(power_cepstrum(log_power_spectrum(ps, floor_rel)));
    cg.frame_times_s.push_back(frames.start_time_s(m));
  }
  return cg;
}

// Per-quefrency arithmetic mean over a row range. Summation is sequential
// in frame order, so the result does not depend on how callers parallelize
// row construction.
struct MeanCepstrum {
  std::vector<double> values;
  std::size_t m_used = 0;
  double quefrency_step_s = 0.0;
  std::size_t nfft = 0;
};

inline MeanCepstrum mean_cepstrum(const Cepstrogram& cg, std::size_t begin,
                                  std::size_t end) {
  if (begin >= end || end > cg.rows.size()) {
    throw std::invalid_argument("mean_cepstrum: empty or invalid selection");
  }
  MeanCepstrum mean;
  mean.m_used = end - begin;
  mean.quefrency_step_s = cg.rows[begin].quefrency_step_s;
  mean.nfft = cg.rows[begin].nfft;
  mean.values.assign(cg.rows[begin].values.size(), 0.0);
  for (std::size_t m = begin; m < end; ++m) {
    const auto& row = cg.rows[m].values;
    if (row.size() != mean.values.size()) {
      throw std::invalid_argument("mean_cepstrum: rows differ in length");
    }
    for (std::size_t k = 0; k < row.size(); ++k) mean.values[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(mean.m_used);
  for (double& v : mean.values) v *= inv;
  return mean;
}

inline MeanCepstrum mean_cepstrum(const Cepstrogram& cg) {
  return mean_cepstrum(cg, 0, cg.rows.size());
}

// Mean over the most recent window_frames rows ending at (and including)
// frame m; clipped at the start of the recording. Used for the streaming
// variant of the subtraction mean, which is biased when the delay varies
// slowly across the window.
inline MeanCepstrum trailing_mean_cepstrum(const Cepstrogram& cg,
                                           std::size_t m,
                                           std::size_t window_frames) {
  if (m >= cg.rows.size()) {
    throw std::invalid_argument("trailing_mean_cepstrum: frame index");
  }
  if (window_frames == 0) {
    throw std::invalid_argument("trailing_mean_cepstrum: empty window");
  }
  const std::size_t begin = m + 1 >= window_frames ? m + 1 - window_frames : 0;
  return mean_cepstrum(cg, begin, m + 1);
}

// Subtraction factor a(k): a scalar by default, or one factor per
// quefrency bin.
class SubtractionConfig {
 public:
  SubtractionConfig() = default;

  explicit SubtractionConfig(double scalar) : scalar_(scalar) {
    if (!(scalar >= 0.0)) {
      throw std::invalid_argument("SubtractionConfig: factor must be >= 0");
    }
  }

  explicit SubtractionConfig(std::vector<double> per_quefrency)
      : per_quefrency_(std::move(per_quefrency)) {
    for (double a : *per_quefrency_) {
      if (!(a >= 0.0)) {
        throw std::invalid_argument("SubtractionConfig: factor must be >= 0");
      }
    }
  }

  bool is_scalar() const { return !per_quefrency_.has_value(); }
  double scalar() const { return scalar_; }

  double factor_at(std::size_t k) const {
    return per_quefrency_ ? (*per_quefrency_)[k] : scalar_;
  }

  std::size_t vector_size() const {
    return per_quefrency_ ? per_quefrency_->size() : 0;
  }

 private:
  double scalar_ = 1.0;
  std::optional<std::vector<double>> per_quefrency_;
};

// Cepstrum subtraction: out(k) = c(k) - a(k) * mean(k). With a == 0 the
// input passes through bit-exactly.
inline PowerCepstrum cepstrum_subtract(const PowerCepstrum& c,
                                       const MeanCepstrum& mean,
                                       const SubtractionConfig& cfg) {
  if (c.values.size() != mean.values.size() ||
      c.quefrency_step_s != mean.quefrency_step_s) {
    throw std::invalid_argument("cepstrum_subtract: quefrency axes differ");
  }
  if (!cfg.is_scalar() && cfg.vector_size() != c.values.size()) {
    throw std::invalid_argument(
        "cepstrum_subtract: factor vector does not match axis");
  }
  PowerCepstrum out = c;
  if (cfg.is_scalar() && cfg.scalar() == 0.0) return out;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] -= cfg.factor_at(k) * mean.values[k];
  }
  return out;
}

}  // namespace ceptde
