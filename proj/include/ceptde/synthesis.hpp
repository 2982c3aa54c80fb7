#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ceptde/fft.hpp"
#include "ceptde/geometry.hpp"
#include "ceptde/signal.hpp"

namespace ceptde {

// Synthesis is seed-deterministic: every random block derives its own seed
// from (master seed, block index), so outputs do not depend on evaluation
// order. Noise blocks are 0.1 s long, matching the analysis frame length.

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 of master advanced by index.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct FrequencyBand {
  double low_hz = 0.0;
  double high_hz = 90000.0;
};

namespace detail {

constexpr std::size_t kNoiseBlockSeconds100ths = 10;  // 0.1 s blocks

inline std::size_t noise_block_len(double sample_rate_hz) {
  const auto n = static_cast<std::size_t>(std::llround(
      0.01 * static_cast<double>(kNoiseBlockSeconds100ths) * sample_rate_hz));
  return std::max<std::size_t>(n, 16);
}

// One zero-mean Gaussian block synthesized in the frequency domain from a
// per-bin standard deviation profile (0 outside the support).
template <typename StdDevAt>
std::vector<double> gaussian_block(std::size_t n, double sample_rate_hz,
                                   std::uint64_t seed, StdDevAt&& sigma_at) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::complex<double>> spec(n / 2 + 1, {0.0, 0.0});
  const double bin_hz = sample_rate_hz / static_cast<double>(n);
  // DC stays zero (zero mean); the Nyquist bin stays zero as well.
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double sigma = sigma_at(static_cast<double>(k) * bin_hz);
    if (sigma <= 0.0) continue;
    const double s = sigma / std::numbers::sqrt2;
    spec[k] = {s * gauss(rng), s * gauss(rng)};
  }
  return irfft(spec, n);
}

}  // namespace detail

// Zero-mean Gaussian noise band-limited to band_hz, unit mean-square power,
// built block-wise with per-block derived seeds.
inline SampledSignal synth_source_noise_samples(std::size_t n_samples,
                                                double sample_rate_hz,
                                                FrequencyBand band,
                                                std::uint64_t seed) {
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("synth_source_noise: sample rate must be > 0");
  }
  if (!(band.low_hz >= 0.0) || !(band.high_hz > band.low_hz)) {
    throw std::invalid_argument("synth_source_noise: invalid band");
  }
  if (band.high_hz > sample_rate_hz / 2.0 + 1e-9) {
    throw std::invalid_argument("synth_source_noise: band exceeds Nyquist");
  }
  if (n_samples == 0) {
    throw std::invalid_argument("synth_source_noise: empty output");
  }

  const std::size_t block = detail::noise_block_len(sample_rate_hz);
  const double bin_hz = sample_rate_hz / static_cast<double>(block);

  // Count in-band bins of one block to hit unit mean-square power.
  std::size_t in_band = 0;
  for (std::size_t k = 1; k < block / 2; ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f > band.low_hz && f <= band.high_hz) ++in_band;
  }
  if (in_band == 0) {
    throw std::invalid_argument("synth_source_noise: band holds no bins");
  }
  const double nd = static_cast<double>(block);
  const double sigma =
      std::sqrt(nd * nd / (2.0 * static_cast<double>(in_band)));

  SampledSignal out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.reserve(n_samples);
  for (std::size_t b = 0; out.samples.size() < n_samples; ++b) {
    const auto chunk = detail::gaussian_block(
        block, sample_rate_hz, derive_seed(seed, b),
        [&](double f) {
          return (f > band.low_hz && f <= band.high_hz) ? sigma : 0.0;
        });
    const std::size_t take =
        std::min(chunk.size(), n_samples - out.samples.size());
    out.samples.insert(out.samples.end(), chunk.begin(),
                       chunk.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

inline SampledSignal synth_source_noise(double duration_s,
                                        double sample_rate_hz = 250000.0,
                                        FrequencyBand band = {0.0, 90000.0},
                                        std::uint64_t seed = 1) {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("synth_source_noise: non-positive duration");
  }
  const auto n =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  return synth_source_noise_samples(n, sample_rate_hz, band, seed);
}

// Single indirect path: attenuation and delay of the echo.
struct EchoModel {
  double alpha = 1.0;
  double tau_beta_s = 0.0;

  void validate() const {
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
      throw std::invalid_argument("EchoModel: alpha must be in [0, 1]");
    }
    if (!(tau_beta_s >= 0.0)) {
      throw std::invalid_argument("EchoModel: negative delay");
    }
  }
};

namespace detail {

constexpr int kSincHalfTaps = 32;  // 64-tap interpolator

// Hann-windowed sinc kernel for a fractional offset in [0, 1): kernel[j]
// weights sample floor(pos) - (kSincHalfTaps - 1) + j.
inline std::array<double, 2 * kSincHalfTaps> make_sinc_kernel(double frac) {
  std::array<double, 2 * kSincHalfTaps> kernel{};
  for (int j = 0; j < 2 * kSincHalfTaps; ++j) {
    const double u = static_cast<double>(j - (kSincHalfTaps - 1)) - frac;
    const double w =
        0.5 + 0.5 * std::cos(std::numbers::pi * u / kSincHalfTaps);
    double s = 1.0;
    if (u != 0.0) {
      const double pu = std::numbers::pi * u;
      s = std::sin(pu) / pu;
    }
    kernel[static_cast<std::size_t>(j)] = s * w;
  }
  return kernel;
}

inline double apply_kernel(std::span<const double> s, std::ptrdiff_t i0,
                           const std::array<double, 2 * kSincHalfTaps>& k) {
  double acc = 0.0;
  const std::ptrdiff_t start = i0 - (kSincHalfTaps - 1);
  for (int j = 0; j < 2 * kSincHalfTaps; ++j) {
    acc += s[static_cast<std::size_t>(start + j)] *
           k[static_cast<std::size_t>(j)];
  }
  return acc;
}

}  // namespace detail

// x(t) = s(t) + alpha * s(t - tau). Fractional delays use a 64-tap
// Hann-windowed sinc; integer delays reduce to an exact shift-and-add.
// Output covers only the region where every tap is available, so it is
// shorter than the input by the delay (plus the interpolator margin for
// fractional delays).
inline SampledSignal apply_static_echo(const SampledSignal& signal,
                                       const EchoModel& echo) {
  signal.validate();
  echo.validate();
  if (echo.alpha == 0.0) return signal;

  const double d = echo.tau_beta_s * signal.sample_rate_hz;
  const auto n = signal.samples.size();
  if (!(echo.tau_beta_s < signal.duration_s())) {
    throw std::invalid_argument("apply_static_echo: delay exceeds duration");
  }

  SampledSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;

  const double d_round = std::round(d);
  if (std::fabs(d - d_round) < 1e-9) {
    const auto di = static_cast<std::size_t>(d_round);
    out.samples.resize(n - di);
    for (std::size_t i = di; i < n; ++i) {
      out.samples[i - di] =
          signal.samples[i] + echo.alpha * signal.samples[i - di];
    }
    return out;
  }

  // Every tap position i - d shares the fractional part ceil(d) - d. For
  // delays below the interpolator half-width the kernel reaches forward of
  // the current sample, so the valid region is clipped at both ends.
  const auto d_ceil = static_cast<std::ptrdiff_t>(std::ceil(d));
  const auto kernel =
      detail::make_sinc_kernel(static_cast<double>(d_ceil) - d);
  const auto start = static_cast<std::size_t>(d_ceil) +
                     static_cast<std::size_t>(detail::kSincHalfTaps);
  const std::size_t tail =
      d_ceil < detail::kSincHalfTaps
          ? static_cast<std::size_t>(detail::kSincHalfTaps - d_ceil)
          : 0;
  if (start + tail >= n) {
    throw std::invalid_argument("apply_static_echo: signal too short");
  }
  const std::size_t end = n - tail;
  out.samples.resize(end - start);
  for (std::size_t i = start; i < end; ++i) {
    const auto i0 = static_cast<std::ptrdiff_t>(i) - d_ceil;
    out.samples[i - start] =
        signal.samples[i] +
        echo.alpha * detail::apply_kernel(signal.samples, i0, kernel);
  }
  return out;
}

// Reference ambient PSD on a uniform one-sided frequency grid from 0 Hz.
// Values are power per Hz; 0 outside the grid.
struct NoiseModel {
  std::vector<double> psd;
  double bin_hz = 0.0;
  std::uint64_t seed = 1;

  static NoiseModel flat(FrequencyBand band, std::uint64_t seed,
                         double bin_hz = 50.0) {
    NoiseModel m;
    m.bin_hz = bin_hz;
    m.seed = seed;
    const auto bins =
        static_cast<std::size_t>(std::ceil(band.high_hz / bin_hz)) + 1;
    m.psd.assign(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f > band.low_hz && f <= band.high_hz) m.psd[k] = 1.0;
    }
    return m;
  }

  // Resamples tabulated (freq, psd) points onto a uniform grid.
  static NoiseModel from_points(const std::vector<double>& freq_hz,
                                const std::vector<double>& psd_values,
                                std::uint64_t seed) {
    if (freq_hz.size() != psd_values.size() || freq_hz.size() < 2) {
      throw std::invalid_argument("NoiseModel: need >= 2 PSD points");
    }
    double min_step = freq_hz.back() - freq_hz.front();
    for (std::size_t i = 1; i < freq_hz.size(); ++i) {
      if (!(freq_hz[i] > freq_hz[i - 1])) {
        throw std::invalid_argument("NoiseModel: frequencies must increase");
      }
      min_step = std::min(min_step, freq_hz[i] - freq_hz[i - 1]);
      if (psd_values[i] < 0.0 || psd_values[i - 1] < 0.0) {
        throw std::invalid_argument("NoiseModel: negative PSD");
      }
    }
    NoiseModel m;
    m.seed = seed;
    m.bin_hz = std::max(min_step / 2.0, 1e-3);
    const auto bins =
        static_cast<std::size_t>(std::ceil(freq_hz.back() / m.bin_hz)) + 1;
    m.psd.assign(bins, 0.0);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * m.bin_hz;
      if (f < freq_hz.front() || f > freq_hz.back()) continue;
      while (seg + 2 < freq_hz.size() && freq_hz[seg + 1] < f) ++seg;
      const double f0 = freq_hz[seg], f1 = freq_hz[seg + 1];
      const double p0 = psd_values[seg], p1 = psd_values[seg + 1];
      m.psd[k] = f1 > f0 ? p0 + (p1 - p0) * (f - f0) / (f1 - f0) : p0;
    }
    return m;
  }

  double psd_at(double f_hz) const {
    if (psd.empty() || f_hz < 0.0) return 0.0;
    const double pos = f_hz / bin_hz;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= psd.size()) {
      return k < psd.size() && pos <= static_cast<double>(psd.size() - 1)
                 ? psd[k]
                 : 0.0;
    }
    const double frac = pos - static_cast<double>(k);
    return psd[k] + frac * (psd[k + 1] - psd[k]);
  }

  void validate() const {
    if (psd.empty() || !(bin_hz > 0.0)) {
      throw std::invalid_argument("NoiseModel: empty PSD");
    }
    bool any = false;
    for (double p : psd) {
      if (p < 0.0) throw std::invalid_argument("NoiseModel: negative PSD");
      if (p > 0.0) any = true;
    }
    if (!any) throw std::invalid_argument("NoiseModel: PSD is all zero");
  }
};

// Gaussian noise whose one-sided PSD follows the reference: white noise
// shaped in the frequency domain by sqrt(PSD), block-wise.
inline SampledSignal color_noise(const NoiseModel& model, double duration_s,
                                 double sample_rate_hz) {
  model.validate();
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("color_noise: non-positive duration or rate");
  }
  const auto n_total =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  const std::size_t block = detail::noise_block_len(sample_rate_hz);
  const double nd = static_cast<double>(block);

  SampledSignal out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.reserve(n_total);
  for (std::size_t b = 0; out.samples.size() < n_total; ++b) {
    const auto chunk = detail::gaussian_block(
        block, sample_rate_hz, derive_seed(model.seed, b), [&](double f) {
          // E|X_k|^2 = PSD(f) * n * fs / 2 reproduces the reference PSD.
          return std::sqrt(model.psd_at(f) * nd * sample_rate_hz / 2.0);
        });
    const std::size_t take =
        std::min(chunk.size(), n_total - out.samples.size());
    out.samples.insert(out.samples.end(), chunk.begin(),
                       chunk.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

// Mean in-band power per sample, accumulated over 65536-sample chunks.
inline double band_power(const SampledSignal& signal, FrequencyBand band) {
  if (signal.samples.empty()) return 0.0;
  const std::size_t chunk = std::min<std::size_t>(
      next_pow2(signal.samples.size()), 65536);
  const double bin_hz = signal.sample_rate_hz / static_cast<double>(chunk);

  double energy = 0.0;
  std::vector<double> buf(chunk);
  for (std::size_t off = 0; off < signal.samples.size(); off += chunk) {
    const std::size_t take = std::min(chunk, signal.samples.size() - off);
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(signal.samples.begin() + static_cast<std::ptrdiff_t>(off),
              signal.samples.begin() + static_cast<std::ptrdiff_t>(off + take),
              buf.begin());
    const auto spec = rfft(buf);
    for (std::size_t k = 1; k < spec.size(); ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      if (f > band.low_hz && f <= band.high_hz) {
        const double two_sided = (k < chunk - k) ? 2.0 : 1.0;
        energy += two_sided * std::norm(spec[k]) / static_cast<double>(chunk);
      }
    }
  }
  return energy / static_cast<double>(signal.samples.size());
}

// Adds noise scaled so that the in-band signal/noise power ratio equals
// snr_db. The reference signal power defaults to the in-band power of
// `signal`; pass signal_band_power to use a different reference (e.g. the
// direct-path-only power of an echo-carrying recording).
inline SampledSignal mix_at_snr(
    const SampledSignal& signal, const SampledSignal& noise, double snr_db,
    FrequencyBand band,
    std::optional<double> signal_band_power = std::nullopt) {
  if (signal.samples.size() != noise.samples.size() ||
      signal.sample_rate_hz != noise.sample_rate_hz) {
    throw std::invalid_argument("mix_at_snr: signal/noise layout mismatch");
  }
  const double ps =
      signal_band_power ? *signal_band_power : band_power(signal, band);
  const double pn = band_power(noise, band);
  if (!(pn > 0.0)) {
    throw std::invalid_argument("mix_at_snr: noise has no in-band power");
  }
  if (!(ps > 0.0)) {
    throw std::invalid_argument("mix_at_snr: signal has no in-band power");
  }
  const double gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));

  SampledSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples.resize(signal.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = signal.samples[i] + gain * noise.samples[i];
  }
  return out;
}

// Simulated hydrophone recording of a transit plus the per-frame true
// delays. The echo delay is frozen within each track step (one analysis
// frame) and jumps between frames; delay drift inside a 0.1 s frame is
// negligible at boat speeds.
struct TransitRecording {
  SampledSignal recording;
  std::vector<double> truth_delays_s;
  std::vector<double> frame_times_s;
};

inline TransitRecording simulate_transit(const TransitTrack& track,
                                         const EnvironmentModel& env,
                                         double alpha, std::uint64_t seed,
                                         double sample_rate_hz = 250000.0,
                                         FrequencyBand band = {0.0, 90000.0}) {
  env.validate();
  if (track.times_s.empty() ||
      track.times_s.size() != track.ground_ranges_m.size()) {
    throw std::invalid_argument("simulate_transit: empty or ragged track");
  }
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("simulate_transit: alpha must be in [0, 1]");
  }
  const double step_s = track.times_s.size() >= 2
                            ? track.times_s[1] - track.times_s[0]
                            : 0.1;
  const auto frame_len =
      static_cast<std::size_t>(std::llround(step_s * sample_rate_hz));
  if (frame_len < 2) {
    throw std::invalid_argument("simulate_transit: track step too short");
  }
  const std::size_t frames = track.times_s.size();

  std::vector<double> truth(frames);
  double max_delay = 0.0;
  for (std::size_t m = 0; m < frames; ++m) {
    truth[m] = multipath_delay(track.ground_ranges_m[m], env).delay_s;
    max_delay = std::max(max_delay, truth[m]);
  }

  // Lead-in source blocks so the echo and interpolator taps never reach
  // before the start of the synthesized source, plus a small tail because
  // the kernel can reach forward when the delay is below its half-width.
  const auto margin = static_cast<std::size_t>(
      std::ceil(max_delay * sample_rate_hz)) + detail::kSincHalfTaps + 2;
  const std::size_t lead_frames = margin / frame_len + 1;
  const auto src = synth_source_noise_samples(
      (frames + lead_frames) * frame_len + detail::kSincHalfTaps + 2,
      sample_rate_hz, band, seed);

  TransitRecording rec;
  rec.frame_times_s = track.times_s;
  rec.truth_delays_s = truth;
  rec.recording.sample_rate_hz = sample_rate_hz;
  rec.recording.samples.resize(frames * frame_len);

  for (std::size_t m = 0; m < frames; ++m) {
    const double d = truth[m] * sample_rate_hz;
    const std::size_t base = (m + lead_frames) * frame_len;
    double* out = rec.recording.samples.data() + m * frame_len;

    const double d_round = std::round(d);
    if (std::fabs(d - d_round) < 1e-9) {
      const auto di = static_cast<std::size_t>(d_round);
      for (std::size_t i = 0; i < frame_len; ++i) {
        out[i] = src.samples[base + i] + alpha * src.samples[base + i - di];
      }
    } else {
      const auto d_ceil = static_cast<std::ptrdiff_t>(std::ceil(d));
      const auto kernel =
          detail::make_sinc_kernel(static_cast<double>(d_ceil) - d);
      for (std::size_t i = 0; i < frame_len; ++i) {
        const auto i0 = static_cast<std::ptrdiff_t>(base + i) - d_ceil;
        out[i] = src.samples[base + i] +
                 alpha * detail::apply_kernel(src.samples, i0, kernel);
      }
    }
  }
  return rec;
}

}  // namespace ceptde
