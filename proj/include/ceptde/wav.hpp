#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceptde/signal.hpp"

namespace ceptde {

enum class WavEncoding { float32, pcm16, pcm24 };

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    static_cast<std::uint16_t>(p[1]) << 8);
}

inline void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xFF));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  b.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
  b.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

inline void put_u16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xFF));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

}  // namespace detail

// Reads a mono WAV file (PCM 16/24-bit or IEEE float 32-bit). Integer
// samples are normalized to [-1, 1]; the sample rate comes from the header.
inline SampledSignal read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + off);
    const std::uint32_t len = detail::read_u32(bytes.data() + off + 4);
    if (off + 8 + len > bytes.size()) {
      throw std::runtime_error("read_wav: truncated chunk in " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw std::runtime_error("read_wav: short fmt chunk");
      const unsigned char* p = bytes.data() + off + 8;
      format = detail::read_u16(p);
      channels = detail::read_u16(p + 2);
      sample_rate = detail::read_u32(p + 4);
      bits = detail::read_u16(p + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + off + 8;
      data_len = len;
    }
    off += 8 + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw std::runtime_error("read_wav: missing fmt or data chunk in " + path);
  }
  if (channels != 1) {
    throw std::runtime_error("read_wav: expected mono, got " +
                             std::to_string(channels) + " channels");
  }

  SampledSignal out;
  out.sample_rate_hz = static_cast<double>(sample_rate);
  if (format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(detail::read_u16(data + 2 * i));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 1 && bits == 24) {
    const std::size_t n = data_len / 3;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* p = data + 3 * i;
      std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      out.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data + 4 * i, 4);
      out.samples[i] = static_cast<double>(v);
    }
  } else {
    throw std::runtime_error("read_wav: unsupported encoding (format tag " +
                             std::to_string(format) + ", " +
                             std::to_string(bits) + " bits) in " + path);
  }
  out.validate();
  return out;
}

// Writes a mono WAV file. float32 is the default for synthetic data;
// pcm16/pcm24 clip to full scale.
inline void write_wav(const std::string& path, const SampledSignal& signal,
                      WavEncoding encoding = WavEncoding::float32) {
  signal.validate();
  const std::size_t n = signal.samples.size();
  const std::uint16_t bits = encoding == WavEncoding::float32  ? 32
                             : encoding == WavEncoding::pcm24 ? 24
                                                               : 16;
  const std::uint16_t bytes_per = bits / 8;
  const std::uint16_t format = encoding == WavEncoding::float32 ? 3 : 1;
  const auto rate = static_cast<std::uint32_t>(
      std::llround(signal.sample_rate_hz));

  std::vector<unsigned char> b;
  b.reserve(60 + n * bytes_per);
  const std::uint32_t data_len = static_cast<std::uint32_t>(n * bytes_per);
  const bool fact = format == 3;
  const std::uint32_t riff_len =
      4 + (8 + 16) + (fact ? 8 + 4 : 0) + (8 + data_len);

  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(b, riff_len);
  b.insert(b.end(), {'W', 'A', 'V', 'E'});
  b.insert(b.end(), {'f', 'm', 't', ' '});
  detail::put_u32(b, 16);
  detail::put_u16(b, format);
  detail::put_u16(b, 1);  // mono
  detail::put_u32(b, rate);
  detail::put_u32(b, rate * bytes_per);
  detail::put_u16(b, bytes_per);
  detail::put_u16(b, bits);
  if (fact) {
    b.insert(b.end(), {'f', 'a', 'c', 't'});
    detail::put_u32(b, 4);
    detail::put_u32(b, static_cast<std::uint32_t>(n));
  }
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(b, data_len);

  for (double v : signal.samples) {
    if (encoding == WavEncoding::float32) {
      const float fv = static_cast<float>(v);
      unsigned char raw[4];
      std::memcpy(raw, &fv, 4);
      b.insert(b.end(), raw, raw + 4);
    } else if (encoding == WavEncoding::pcm16) {
      const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
      const auto q = static_cast<std::int16_t>(std::lround(clipped * 32768.0));
      detail::put_u16(b, static_cast<std::uint16_t>(q));
    } else {
      const double clipped = std::clamp(v, -1.0, 8388607.0 / 8388608.0);
      const auto q = static_cast<std::int32_t>(std::lround(clipped * 8388608.0));
      b.push_back(static_cast<unsigned char>(q & 0xFF));
      b.push_back(static_cast<unsigned char>((q >> 8) & 0xFF));
      b.push_back(static_cast<unsigned char>((q >> 16) & 0xFF));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  f.write(reinterpret_cast<const char*>(b.data()),
          static_cast<std::streamsize>(b.size()));
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

}  // namespace ceptde
