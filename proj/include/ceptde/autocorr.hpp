#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ceptde/fft.hpp"

namespace ceptde {

// Biased autocorrelation over nonnegative lags: values[l] = sum_n x[n] x[n+l].
// values[0] is the frame energy.
struct Autocorrelation {
  std::vector<double> values;
  double lag_step_s = 0.0;
};

// Computed as the inverse transform of the (non-log) power spectrum of the
// raw, unwindowed frame, zero-padded enough that lags up to max_lag_s are
// free of circular aliasing.
inline Autocorrelation autocorrelation(std::span<const double> frame,
                                       double max_lag_s,
                                       double sample_rate_hz) {
  if (frame.empty()) throw std::invalid_argument("autocorrelation: empty frame");
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("autocorrelation: sample rate must be > 0");
  }
  const auto max_lag =
      static_cast<std::size_t>(std::floor(max_lag_s * sample_rate_hz));
  if (!(max_lag_s > 0.0) || max_lag >= frame.size()) {
    throw std::invalid_argument("autocorrelation: max_lag outside frame");
  }

  const std::size_t n = next_pow2(frame.size() + max_lag + 1);
  std::vector<double> padded(n, 0.0);
  std::copy(frame.begin(), frame.end(), padded.begin());

  auto spec = rfft(padded);
  for (auto& c : spec) c = std::norm(c);
  const auto r = irfft(spec, n);

  Autocorrelation ac;
  ac.lag_step_s = 1.0 / sample_rate_hz;
  ac.values.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(max_lag + 1));
  return ac;
}

}  // namespace ceptde
