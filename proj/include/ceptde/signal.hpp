#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace ceptde {

// Uniformly sampled real-valued time series.
struct SampledSignal {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;

  double duration_s() const {
    return sample_rate_hz > 0.0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }

  void validate() const {
    if (!(sample_rate_hz > 0.0)) {
      throw std::invalid_argument("SampledSignal: sample_rate_hz must be > 0");
    }
    for (double v : samples) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("SampledSignal: non-finite sample");
      }
    }
  }
};

// Sequence of equal-length analysis frames over a shared sample buffer.
// Frames are complete by construction; trailing partial data is dropped.
class FrameSequence {
 public:
  FrameSequence() = default;

  FrameSequence(std::shared_ptr<const std::vector<double>> samples,
                std::size_t frame_len_samples, std::size_t hop_samples,
                double sample_rate_hz)
      : samples_(std::move(samples)),
        frame_len_(frame_len_samples),
        hop_(hop_samples),
        sample_rate_hz_(sample_rate_hz) {
    if (frame_len_ == 0 || hop_ == 0 || !(sample_rate_hz_ > 0.0)) {
      throw std::invalid_argument("FrameSequence: non-positive layout");
    }
    const std::size_t n = samples_ ? samples_->size() : 0;
    count_ = n >= frame_len_ ? (n - frame_len_) / hop_ + 1 : 0;
  }

  std::size_t frame_count() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t frame_len_samples() const { return frame_len_; }
  std::size_t hop_samples() const { return hop_; }
  double sample_rate_hz() const { return sample_rate_hz_; }

  std::span<const double> frame(std::size_t i) const {
    if (i >= count_) throw std::out_of_range("FrameSequence: frame index");
    return {samples_->data() + i * hop_, frame_len_};
  }

  double start_time_s(std::size_t i) const {
    return static_cast<double>(i * hop_) / sample_rate_hz_;
  }

  std::vector<double> start_times_s() const {
    std::vector<double> t(count_);
    for (std::size_t i = 0; i < count_; ++i) t[i] = start_time_s(i);
    return t;
  }

 private:
  std::shared_ptr<const std::vector<double>> samples_;
  std::size_t frame_len_ = 0;
  std::size_t hop_ = 0;
  std::size_t count_ = 0;
  double sample_rate_hz_ = 0.0;
};

// Splits a signal into complete frames of frame_len_s advanced by hop_s.
// A signal shorter than one frame yields an empty sequence.
inline FrameSequence frame_signal(const SampledSignal& signal,
                                  double frame_len_s, double hop_s) {
  signal.validate();
  if (!(frame_len_s > 0.0) || !(hop_s > 0.0)) {
    throw std::invalid_argument("frame_signal: non-positive frame or hop");
  }
  const auto frame_len = static_cast<std::size_t>(
      std::llround(frame_len_s * signal.sample_rate_hz));
  const auto hop =
      static_cast<std::size_t>(std::llround(hop_s * signal.sample_rate_hz));
  if (frame_len < 2) {
    throw std::invalid_argument("frame_signal: frame shorter than 2 samples");
  }
  if (hop == 0) {
    throw std::invalid_argument("frame_signal: hop shorter than 1 sample");
  }
  auto buf = std::make_shared<const std::vector<double>>(signal.samples);
  return FrameSequence(std::move(buf), frame_len, hop, signal.sample_rate_hz);
}

}  // namespace ceptde
