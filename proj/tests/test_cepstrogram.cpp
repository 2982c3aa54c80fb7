#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ceptde/cepstrogram.hpp"
#include "ceptde/eval.hpp"
#include "ceptde/synthesis.hpp"

using namespace ceptde;

namespace {

Cepstrogram tiny_cepstrogram(std::size_t rows, std::size_t bins) {
  Cepstrogram cg;
  for (std::size_t m = 0; m < rows; ++m) {
    PowerCepstrum c;
    c.nfft = (bins - 1) * 2;
    c.quefrency_step_s = 1e-3;
    c.values.assign(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k) {
      c.values[k] = static_cast<double>(m + 1) * 0.5 +
                    static_cast<double>(k) * 0.125;
    }
    cg.rows.push_back(std::move(c));
    cg.frame_times_s.push_back(static_cast<double>(m) * 0.1);
  }
  return cg;
}

}  // namespace

TEST_CASE("cepstrogram row count follows the frame count", "[cepstrogram]") {
  const double fs = 50000.0;
  const auto noise = synth_source_noise(2.05, fs, {0.0, 20000.0}, 3);
  const auto frames = frame_signal(noise, 0.1, 0.1);
  REQUIRE(frames.frame_count() == 20);
  const auto cg = build_cepstrogram(frames, WindowKind::hann, 0, 1e-12);
  CHECK(cg.frame_count() == 20);
  CHECK(cg.rows[0].nfft == 8192);  // next pow2 of 5000

  SECTION("single frame equals the direct per-frame computation") {
    const auto one = frame_signal(
        SampledSignal{{noise.samples.begin(), noise.samples.begin() + 5000},
                      fs},
        0.1, 0.1);
    const auto cg1 = build_cepstrogram(one, WindowKind::hann, 0, 1e-12);
    REQUIRE(cg1.frame_count() == 1);
    const auto direct = power_cepstrum(log_power_spectrum(
        power_spectrum(one.frame(0), WindowKind::hann, 8192, fs), 1e-12));
    for (std::size_t k = 0; k < direct.values.size(); ++k) {
      CHECK(cg1.rows[0].values[k] == direct.values[k]);
    }
  }

  SECTION("empty frame sequence gives an empty cepstrogram") {
    SampledSignal shorty{std::vector<double>(1000, 0.1), fs};
    const auto none = frame_signal(shorty, 0.1, 0.1);
    CHECK(build_cepstrogram(none, WindowKind::hann, 0, 1e-12).empty());
  }
}

TEST_CASE("mean cepstrum identities", "[cepstrogram]") {
  SECTION("identical rows: mean equals any row exactly") {
    auto cg = tiny_cepstrogram(1, 16);
    for (int i = 0; i < 4; ++i) {
      cg.rows.push_back(cg.rows[0]);
      cg.frame_times_s.push_back(static_cast<double>(i + 1));
    }
    const auto mean = mean_cepstrum(cg);
    CHECK(mean.m_used == 5);
    for (std::size_t k = 0; k < mean.values.size(); ++k) {
      CHECK(mean.values[k] == cg.rows[0].values[k]);
    }
  }
  SECTION("two opposite rows cancel") {
    auto cg = tiny_cepstrogram(1, 16);
    PowerCepstrum neg = cg.rows[0];
    for (double& v : neg.values) v = -v;
    cg.rows.push_back(neg);
    cg.frame_times_s.push_back(1.0);
    const auto mean = mean_cepstrum(cg);
    for (double v : mean.values) CHECK(v == 0.0);
  }
  SECTION("empty selection is rejected") {
    const auto cg = tiny_cepstrogram(3, 16);
    CHECK_THROWS_AS(mean_cepstrum(cg, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(mean_cepstrum(cg, 0, 9), std::invalid_argument);
  }
}

TEST_CASE("subtraction identities", "[cepstrogram]") {
  const auto cg = tiny_cepstrogram(6, 32);
  const auto mean = mean_cepstrum(cg);

  SECTION("a = 0 is the identity, bit for bit") {
    const auto out = cepstrum_subtract(cg.rows[3], mean, SubtractionConfig(0.0));
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      CHECK(out.values[k] == cg.rows[3].values[k]);
    }
  }
  SECTION("a = 1 with c equal to the mean gives zero") {
    Cepstrogram same;
    same.rows.assign(4, cg.rows[2]);
    same.frame_times_s.assign(4, 0.0);
    const auto m2 = mean_cepstrum(same);
    const auto out = cepstrum_subtract(cg.rows[2], m2, SubtractionConfig(1.0));
    for (double v : out.values) CHECK(v == 0.0);
  }
  SECTION("with a = 1, the mean of all subtracted rows vanishes") {
    std::vector<double> residual(mean.values.size(), 0.0);
    for (const auto& row : cg.rows) {
      const auto sub = cepstrum_subtract(row, mean, SubtractionConfig(1.0));
      for (std::size_t k = 0; k < residual.size(); ++k) {
        residual[k] += sub.values[k];
      }
    }
    for (double v : residual) {
      CHECK(std::fabs(v / static_cast<double>(cg.rows.size())) < 1e-12);
    }
  }
  SECTION("per-quefrency factors apply elementwise") {
    std::vector<double> factors(32, 0.0);
    factors[5] = 2.0;
    const auto out =
        cepstrum_subtract(cg.rows[0], mean, SubtractionConfig(factors));
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      const double expect =
          cg.rows[0].values[k] - (k == 5 ? 2.0 * mean.values[k] : 0.0);
      CHECK(out.values[k] == Catch::Approx(expect).margin(1e-15));
    }
  }
  SECTION("axis mismatch is rejected") {
    auto other = tiny_cepstrogram(2, 16);
    CHECK_THROWS_AS(
        cepstrum_subtract(other.rows[0], mean, SubtractionConfig(1.0)),
        std::invalid_argument);
    std::vector<double> wrong(31, 1.0);
    CHECK_THROWS_AS(
        cepstrum_subtract(cg.rows[0], mean, SubtractionConfig(wrong)),
        std::invalid_argument);
  }
  SECTION("negative factors are rejected") {
    CHECK_THROWS_AS(SubtractionConfig(-0.5), std::invalid_argument);
  }
}

TEST_CASE("trailing mean covers the most recent frames", "[cepstrogram]") {
  const auto cg = tiny_cepstrogram(10, 8);
  const auto tail = trailing_mean_cepstrum(cg, 9, 4);
  CHECK(tail.m_used == 4);
  // Rows 6..9 have leading values (m+1)*0.5 = 3.5, 4.0, 4.5, 5.0.
  CHECK(tail.values[0] == Catch::Approx(4.25));

  const auto clipped = trailing_mean_cepstrum(cg, 1, 4);
  CHECK(clipped.m_used == 2);
}

TEST_CASE("transit mean holds almost no rahmonic content",
          "[cepstrogram][slow]") {
  // Over a full transit the delay sweeps many quefrency bins, so the mean
  // cepstrum keeps the source's own (non-rahmonic) structure but only a
  // small residue of the per-frame rahmonic peaks. The rahmonic content of
  // the mean is isolated by differencing against an echo-free transit
  // built from the same seed (identical source realization).
  // Full 200 m -> CPA -> 200 m transit, M ~ 2700.
  const auto track = straight_transit(10.0, 1.5, 200.0, 0.1);
  const EnvironmentModel env;
  const auto rec = simulate_transit(track, env, 1.0, 2024);
  const auto rec0 = simulate_transit(track, env, 0.0, 2024);
  const auto cg = build_cepstrogram(frame_signal(rec.recording, 0.1, 0.1),
                                    WindowKind::hann, 0, 1e-12);
  const auto cg0 = build_cepstrogram(frame_signal(rec0.recording, 0.1, 0.1),
                                     WindowKind::hann, 0, 1e-12);
  const auto mean = mean_cepstrum(cg);
  const auto mean0 = mean_cepstrum(cg0);
  REQUIRE(cg.frame_count() > 2500);

  const double step = cg.rows[0].quefrency_step_s;
  // Median per-frame peak magnitude at the true-delay bin.
  std::vector<double> peaks;
  double band_lo = 1e9, band_hi = 0.0;
  for (std::size_t m = 0; m < cg.frame_count(); ++m) {
    const auto k = static_cast<std::size_t>(
        std::llround(rec.truth_delays_s[m] / step));
    peaks.push_back(std::fabs(cg.rows[m].values[k]));
    band_lo = std::min(band_lo, rec.truth_delays_s[m]);
    band_hi = std::max(band_hi, rec.truth_delays_s[m]);
  }
  std::nth_element(peaks.begin(), peaks.begin() + peaks.size() / 2,
                   peaks.end());
  const double med_peak = peaks[peaks.size() / 2];

  // RMS rahmonic residue across the swept band. Worst single bins sit at
  // the track ends, where the boat dwells at nearly constant delay.
  const auto k_lo = static_cast<std::size_t>(std::floor(band_lo / step));
  const auto k_hi = static_cast<std::size_t>(std::ceil(band_hi / step));
  double sq = 0.0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double r = mean.values[k] - mean0.values[k];
    sq += r * r;
  }
  const double rahmonic_residue =
      std::sqrt(sq / static_cast<double>(k_hi - k_lo + 1));
  CHECK(rahmonic_residue <= 0.05 * med_peak);
}
