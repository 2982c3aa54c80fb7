#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ceptde/fft.hpp"
#include "ceptde/spectrum.hpp"

namespace ceptde {

// Power cepstrum on a discrete quefrency axis, one-sided (bins 0..nfft/2,
// step 1/sample_rate). Computed as the normalized inverse DFT of the
// symmetrized two-sided log power spectrum, so values[0] is the mean of the
// log spectrum and an echo of delay tau and attenuation alpha produces
// peaks of height ~ a_n/2 at quefrency n*tau (a_n from rahmonic_strength).
struct PowerCepstrum {
  std::vector<double> values;
  double quefrency_step_s = 0.0;
  std::size_t nfft = 0;

  double sample_rate_hz() const { return 1.0 / quefrency_step_s; }
};

inline PowerCepstrum power_cepstrum(const LogPowerSpectrum& lps) {
  if (lps.values.empty()) {
    throw std::invalid_argument("power_cepstrum: empty log spectrum");
  }
  if (lps.values.size() != lps.nfft / 2 + 1) {
    throw std::invalid_argument("power_cepstrum: inconsistent nfft");
  }
  const std::size_t n = lps.nfft;

  // Rebuild the two-sided (even) log spectrum; its DFT is real, and the
  // forward transform scaled by 1/n equals the inverse transform.
  std::vector<double> two_sided(n);
  for (std::size_t k = 0; k < lps.values.size(); ++k) {
    two_sided[k] = lps.values[k];
    if (k > 0 && k < n - k) two_sided[n - k] = lps.values[k];
  }

  const auto spec = rfft(two_sided);
  PowerCepstrum c;
  c.nfft = n;
  c.quefrency_step_s = 1.0 / (lps.bin_hz * static_cast<double>(n));
  c.values.resize(spec.size());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    // Imaginary residue of the symmetric input is rounding noise; drop it.
    c.values[k] = spec[k].real() * scale;
  }
  return c;
}

// Strength of the n-th rahmonic for attenuation alpha: (2/n)(-1)^(n+1) alpha^n.
// Signs alternate and magnitudes decrease like the Mercator series.
inline double rahmonic_strength(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("rahmonic_strength: n must be >= 1");
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return 2.0 / static_cast<double>(n) * sign *
         std::pow(alpha, static_cast<double>(n));
}

// Analytic impulse-train model of the echo's cepstral signature.
struct RahmonicModel {
  double alpha = 1.0;
  double tau_beta_s = 0.0;

  double strength(int n) const { return rahmonic_strength(n, alpha); }
  double quefrency(int n) const { return static_cast<double>(n) * tau_beta_s; }
};

}  // namespace ceptde
