#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "ceptde/fft.hpp"
#include "ceptde/signal.hpp"

using namespace ceptde;

namespace {

// O(n^2) reference DFT, independent of the FFT backend.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(i) / static_cast<double>(n);
      acc += x[i] * std::complex<double>(std::cos(phi), std::sin(phi));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

}  // namespace

TEST_CASE("rfft matches a naive DFT", "[signal][fft]") {
  for (std::size_t n : {8u, 100u, 250u}) {
    const auto x = random_vector(n, 42 + static_cast<unsigned>(n));
    const auto fast = rfft(x);
    const auto slow = naive_dft(x);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      CHECK(std::abs(fast[k] - slow[k]) < 1e-9 * static_cast<double>(n));
    }
  }
}

TEST_CASE("irfft inverts rfft within 1e-10 relative", "[signal][fft]") {
  for (std::size_t n : {16u, 1000u, 25000u, 32768u}) {
    const auto x = random_vector(n, static_cast<unsigned>(n));
    const auto back = irfft(rfft(x), n);
    double max_err = 0.0, max_val = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_err = std::max(max_err, std::fabs(back[i] - x[i]));
      max_val = std::max(max_val, std::fabs(x[i]));
    }
    CHECK(max_err <= 1e-10 * max_val);
  }
}

TEST_CASE("next_pow2", "[signal][fft]") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(2) == 2);
  CHECK(next_pow2(3) == 4);
  CHECK(next_pow2(25000) == 32768);
  CHECK(next_pow2(32768) == 32768);
}

TEST_CASE("frame counts", "[signal]") {
  SECTION("10 s at 250 kHz, 0.1 s frames, 0.1 s hop -> 100 frames") {
    SampledSignal s{std::vector<double>(2500000, 0.0), 250000.0};
    CHECK(frame_signal(s, 0.1, 0.1).frame_count() == 100);
  }
  SECTION("270 s at 250 kHz -> 2700 frames") {
    // Frame count only; samples are untouched.
    SampledSignal s{std::vector<double>(67500000, 0.0), 250000.0};
    CHECK(frame_signal(s, 0.1, 0.1).frame_count() == 2700);
  }
  SECTION("signal shorter than one frame -> empty sequence, not an error") {
    SampledSignal s{std::vector<double>(12500, 0.0), 250000.0};
    const auto frames = frame_signal(s, 0.1, 0.1);
    CHECK(frames.frame_count() == 0);
    CHECK(frames.empty());
  }
}

TEST_CASE("frame layout and start times", "[signal]") {
  SampledSignal s{std::vector<double>(1000, 0.0), 1000.0};
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    s.samples[i] = static_cast<double>(i);
  }
  const auto frames = frame_signal(s, 0.1, 0.04);  // 100 samples, hop 40
  REQUIRE(frames.frame_count() == (1000 - 100) / 40 + 1);
  CHECK(frames.frame(0)[0] == 0.0);
  CHECK(frames.frame(1)[0] == 40.0);
  CHECK(frames.frame(2)[99] == 80.0 + 99.0);

  const auto t = frames.start_times_s();
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t[i] - t[i - 1] == Catch::Approx(0.04).epsilon(1e-12));
  }
}

TEST_CASE("frame_signal rejects bad arguments", "[signal]") {
  SampledSignal s{std::vector<double>(1000, 0.0), 1000.0};
  CHECK_THROWS_AS(frame_signal(s, -0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(frame_signal(s, 0.1, 0.0), std::invalid_argument);
  SampledSignal bad{{1.0, std::nan("")}, 1000.0};
  CHECK_THROWS_AS(frame_signal(bad, 0.1, 0.1), std::invalid_argument);
}
