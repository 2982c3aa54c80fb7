#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace ceptde {

// Thin wrapper around FFTW's double-precision real transforms.
//
// Conventions: rfft() is the unnormalized forward DFT of a real sequence
// (n/2+1 complex bins), irfft() applies the 1/n factor so that
// irfft(rfft(x), x.size()) == x up to rounding. Plans use FFTW_ESTIMATE,
// which is deterministic and does not clobber the input during planning.
// The FFTW planner is not thread safe; plan creation/destruction is
// serialized here, execution is not.

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealBuf {
  double* p = nullptr;
  explicit FftwRealBuf(std::size_t n) : p(fftw_alloc_real(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwRealBuf() { fftw_free(p); }
  FftwRealBuf(const FftwRealBuf&) = delete;
  FftwRealBuf& operator=(const FftwRealBuf&) = delete;
};

struct FftwComplexBuf {
  fftw_complex* p = nullptr;
  explicit FftwComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwComplexBuf() { fftw_free(p); }
  FftwComplexBuf(const FftwComplexBuf&) = delete;
  FftwComplexBuf& operator=(const FftwComplexBuf&) = delete;
};

struct PlanGuard {
  fftw_plan plan = nullptr;
  ~PlanGuard() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace detail

// Forward DFT of a real sequence; returns bins 0..n/2 (unnormalized).
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("rfft: empty input");

  detail::FftwRealBuf in(n);
  detail::FftwComplexBuf out(n / 2 + 1);
  detail::PlanGuard guard;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    guard.plan =
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.p, out.p, FFTW_ESTIMATE);
  }
  if (!guard.plan) throw std::runtime_error("rfft: planning failed");

  std::copy(x.begin(), x.end(), in.p);
  fftw_execute(guard.plan);

  std::vector<std::complex<double>> spec(n / 2 + 1);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] = {out.p[k][0], out.p[k][1]};
  }
  return spec;
}

// Inverse of rfft for a hermitian half-spectrum; n is the logical size.
inline std::vector<double> irfft(const std::vector<std::complex<double>>& spec,
                                 std::size_t n) {
  if (n == 0 || spec.size() != n / 2 + 1) {
    throw std::invalid_argument("irfft: spectrum size does not match n");
  }

  detail::FftwComplexBuf in(n / 2 + 1);
  detail::FftwRealBuf out(n);
  detail::PlanGuard guard;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    guard.plan =
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.p, out.p, FFTW_ESTIMATE);
  }
  if (!guard.plan) throw std::runtime_error("irfft: planning failed");

  for (std::size_t k = 0; k < spec.size(); ++k) {
    in.p[k][0] = spec[k].real();
    in.p[k][1] = spec[k].imag();
  }
  fftw_execute(guard.plan);

  std::vector<double> x(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = out.p[i] * scale;
  return x;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ceptde
