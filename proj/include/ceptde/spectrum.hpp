#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceptde/fft.hpp"

namespace ceptde {

enum class WindowKind { hann, rectangular };

inline std::string to_string(WindowKind w) {
  return w == WindowKind::hann ? "hann" : "rectangular";
}

inline WindowKind parse_window_kind(const std::string& s) {
  if (s == "hann") return WindowKind::hann;
  if (s == "rectangular" || s == "rect") return WindowKind::rectangular;
  throw std::invalid_argument("unknown window kind: " + s);
}

// Analysis window normalized to unit mean (sum == n), so a bin-centered
// full-scale sine yields the same peak power for every window kind.
inline std::vector<double> make_window(WindowKind kind, std::size_t n) {
  if (n == 0) throw std::invalid_argument("make_window: empty window");
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::hann) {
    // Periodic Hann scaled by 2: mean is exactly 1.
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                            static_cast<double>(n));
    }
  }
  return w;
}

// One-sided storage (bins 0..nfft/2) of a two-sided power spectrum.
// values[k] = |X_k|^2 / nfft, so the implied two-sided sum equals the
// windowed-frame energy (Parseval).
struct PowerSpectrum {
  std::vector<double> values;
  double bin_hz = 0.0;
  std::size_t nfft = 0;
};

struct LogPowerSpectrum {
  std::vector<double> values;  // natural log of power
  double bin_hz = 0.0;
  std::size_t nfft = 0;
  bool floor_applied = false;
};

inline PowerSpectrum power_spectrum(std::span<const double> frame,
                                    WindowKind window, std::size_t nfft,
                                    double sample_rate_hz) {
  if (frame.empty()) throw std::invalid_argument("power_spectrum: empty frame");
  if (nfft < frame.size()) {
    throw std::invalid_argument("power_spectrum: nfft < frame length");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("power_spectrum: sample rate must be > 0");
  }

  const auto w = make_window(window, frame.size());
  std::vector<double> padded(nfft, 0.0);
  for (std::size_t i = 0; i < frame.size(); ++i) padded[i] = frame[i] * w[i];

  const auto spec = rfft(padded);
  PowerSpectrum ps;
  ps.nfft = nfft;
  ps.bin_hz = sample_rate_hz / static_cast<double>(nfft);
  ps.values.resize(spec.size());
  const double scale = 1.0 / static_cast<double>(nfft);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    ps.values[k] = std::norm(spec[k]) * scale;
  }
  return ps;
}

// Natural log of the power spectrum with a relative floor: bins below
// floor_rel * max(power) are clipped there, which keeps every value finite
// at spectral nulls. An all-zero spectrum floors at 1e-300 absolute.
inline LogPowerSpectrum log_power_spectrum(const PowerSpectrum& ps,
                                           double floor_rel) {
  if (!(floor_rel > 0.0)) {
    throw std::invalid_argument("log_power_spectrum: floor_rel must be > 0");
  }
  LogPowerSpectrum lps;
  lps.bin_hz = ps.bin_hz;
  lps.nfft = ps.nfft;
  lps.values.resize(ps.values.size());

  const double max_power =
      ps.values.empty()
          ? 0.0
          : *std::max_element(ps.values.begin(), ps.values.end());
  const double floor = max_power > 0.0 ? floor_rel * max_power : 1e-300;

  for (std::size_t k = 0; k < ps.values.size(); ++k) {
    double p = ps.values[k];
    if (!(p > floor)) {
      p = floor;
      lps.floor_applied = true;
    }
    lps.values[k] = std::log(p);
  }
  return lps;
}

}  // namespace ceptde
