#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceptde/autocorr.hpp"
#include "ceptde/cepstrum.hpp"

namespace ceptde {

enum class DelayMethod { cepstrum, cepstrum_subtracted, autocorrelation };

inline std::string to_string(DelayMethod m) {
  switch (m) {
    case DelayMethod::cepstrum: return "cepstrum";
    case DelayMethod::cepstrum_subtracted: return "cepstrum-subtracted";
    case DelayMethod::autocorrelation: return "autocorrelation";
  }
  return "unknown";
}

inline DelayMethod parse_delay_method(const std::string& s) {
  if (s == "cepstrum") return DelayMethod::cepstrum;
  if (s == "cepstrum-subtracted") return DelayMethod::cepstrum_subtracted;
  if (s == "autocorrelation") return DelayMethod::autocorrelation;
  throw std::invalid_argument("unknown method: " + s);
}

// Peak-picked delay. delay_s is always an integer multiple of the
// quefrency (or lag) step. peak_to_median is the significance ratio of the
// peak against the median absolute value inside the search window; no hard
// threshold is applied here.
struct DelayEstimate {
  double delay_s = 0.0;
  double peak_value = 0.0;
  double peak_to_median = 0.0;
  double q_min_s = 0.0;
  double q_max_s = 0.0;
  DelayMethod method = DelayMethod::cepstrum;
};

namespace detail {

// Shared peak picker over a uniformly stepped axis. Ties break toward the
// smallest index.
inline DelayEstimate pick_peak(const std::vector<double>& values, double step_s,
                               double q_min_s, double q_max_s,
                               DelayMethod method) {
  if (!(q_min_s > 0.0) || !(q_max_s > q_min_s)) {
    throw std::invalid_argument("pick_peak: need 0 < q_min < q_max");
  }
  const double extent = static_cast<double>(values.size() - 1) * step_s;
  if (q_max_s > extent * (1.0 + 1e-12)) {
    throw std::invalid_argument("pick_peak: window exceeds axis extent");
  }
  const auto k_lo =
      static_cast<std::size_t>(std::ceil(q_min_s / step_s - 1e-9));
  const auto k_hi = std::min(
      values.size() - 1,
      static_cast<std::size_t>(std::floor(q_max_s / step_s + 1e-9)));
  if (k_lo > k_hi || k_lo >= values.size()) {
    throw std::invalid_argument("pick_peak: window excludes all bins");
  }

  std::size_t k_best = k_lo;
  for (std::size_t k = k_lo + 1; k <= k_hi; ++k) {
    if (values[k] > values[k_best]) k_best = k;
  }

  std::vector<double> mag(values.begin() + static_cast<std::ptrdiff_t>(k_lo),
                          values.begin() + static_cast<std::ptrdiff_t>(k_hi + 1));
  for (double& v : mag) v = std::fabs(v);
  const std::size_t mid = mag.size() / 2;
  std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(mid),
                   mag.end());
  const double med = mag[mid];

  DelayEstimate est;
  est.delay_s = static_cast<double>(k_best) * step_s;
  est.peak_value = values[k_best];
  est.peak_to_median =
      med > 0.0 ? std::fabs(values[k_best]) / med
                : std::numeric_limits<double>::infinity();
  est.q_min_s = q_min_s;
  est.q_max_s = q_max_s;
  est.method = method;
  return est;
}

}  // namespace detail

// Quefrency of the maximum cepstrum value within [q_min_s, q_max_s].
inline DelayEstimate pick_delay(const PowerCepstrum& c, double q_min_s,
                                double q_max_s,
                                DelayMethod method = DelayMethod::cepstrum) {
  return detail::pick_peak(c.values, c.quefrency_step_s, q_min_s, q_max_s,
                           method);
}

// Lag of the maximum autocorrelation value within [q_min_s, q_max_s].
inline DelayEstimate estimate_delay_autocorr(const Autocorrelation& ac,
                                             double q_min_s, double q_max_s) {
  return detail::pick_peak(ac.values, ac.lag_step_s, q_min_s, q_max_s,
                           DelayMethod::autocorrelation);
}

}  // namespace ceptde
