// Copyright 2026 The Murmur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "murmur/dsp/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::dsp {

namespace {

std::uint32_t u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

struct WavLayout {
  int sample_rate = 0;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

// Walks the RIFF chunk list. `bytes` may be a header-only prefix when
// `allow_truncated_data` is set.
WavLayout parse_layout(const std::string& bytes, const std::string& name, bool allow_truncated_data) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + name);
  }
  WavLayout layout;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::uint32_t size = u32le(p + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(p + pos, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > n) throw FormatError("truncated fmt chunk: " + name);
      const std::uint16_t format = u16le(p + body);
      const std::uint16_t channels = u16le(p + body + 2);
      const std::uint32_t rate = u32le(p + body + 4);
      const std::uint16_t bits = u16le(p + body + 14);
      if (format != 1) throw UnsupportedFormatError("only PCM WAV is supported: " + name);
      if (channels != 1) throw UnsupportedFormatError("only mono WAV is supported: " + name);
      if (bits != 16) throw UnsupportedFormatError("only 16-bit WAV is supported: " + name);
      if (rate == 0) throw FormatError("zero sample rate: " + name);
      layout.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(p + pos, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk: " + name);
      if (!allow_truncated_data && body + size > n) throw FormatError("truncated data chunk: " + name);
      if (size % 2 != 0) throw FormatError("odd data chunk size for 16-bit audio: " + name);
      layout.data_offset = body;
      layout.data_bytes = size;
      return layout;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError("missing data chunk: " + name);
}

}  // namespace

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open WAV file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const WavLayout layout = parse_layout(bytes, path.string(), false);

  Waveform w;
  w.sample_rate = layout.sample_rate;
  const std::size_t count = layout.data_bytes / 2;
  w.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + layout.data_offset;
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = static_cast<std::int16_t>(u16le(p + 2 * i));
    w.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return w;
}

double wav_duration(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open WAV file: " + path.string());
  std::string head(4096, '\0');
  is.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(is.gcount()));
  const WavLayout layout = parse_layout(head, path.string(), true);
  return static_cast<double>(layout.data_bytes / 2) / layout.sample_rate;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  if (w.sample_rate <= 0) throw ArgumentError("sample rate must be positive");
  const auto count = static_cast<std::uint32_t>(w.samples.size());
  std::string buf;
  buf.reserve(44 + 2 * count);
  buf += "RIFF";
  put_u32(buf, 36 + 2 * count);
  buf += "WAVEfmt ";
  put_u32(buf, 16);
  put_u16(buf, 1);
  put_u16(buf, 1);
  put_u32(buf, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(buf, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(buf, 2);
  put_u16(buf, 16);
  buf += "data";
  put_u32(buf, 2 * count);
  for (double s : w.samples) {
    const double scaled = std::nearbyint(s * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(buf, static_cast<std::uint16_t>(q));
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw ArgumentError("target sample rate must be positive");
  if (w.sample_rate <= 0) throw ArgumentError("source sample rate must be positive");
  if (target_rate == w.sample_rate) return w;

  constexpr double kZeroCrossings = 16.0;
  constexpr double kBeta = 8.6;
  const double ratio = static_cast<double>(target_rate) / w.sample_rate;
  const double cutoff = std::min(1.0, ratio);
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);
  // Kaiser taper tabulated over |u| / half_width in [0, 1]; linear interpolation between knots.
  constexpr int kTableSize = 8192;
  std::vector<double> taper_table(kTableSize + 2, 0.0);
  for (int i = 0; i <= kTableSize; ++i) {
    const double r = static_cast<double>(i) / kTableSize;
    taper_table[static_cast<std::size_t>(i)] = std::cyl_bessel_i(0.0, kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
  }

  const auto in_len = static_cast<std::int64_t>(w.samples.size());
  const auto out_len = static_cast<std::int64_t>(std::llround(static_cast<double>(in_len) * ratio));
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(out_len), 0.0);

  for (std::int64_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const auto k_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(t - half_width)));
    const auto k_hi = std::min<std::int64_t>(in_len - 1, static_cast<std::int64_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const double u = t - static_cast<double>(k);
      const double x = cutoff * u;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double pos = std::abs(u) / half_width * kTableSize;
      if (pos >= kTableSize) continue;
      const auto idx = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(idx);
      const double taper = taper_table[idx] + frac * (taper_table[idx + 1] - taper_table[idx]);
      acc += w.samples[static_cast<std::size_t>(k)] * cutoff * sinc * taper;
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

Waveform peak_normalize(const Waveform& w, double target_peak) {
  if (!(target_peak > 0.0)) throw ArgumentError("target peak must be positive");
  double peak = 0.0;
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw ArgumentError("non-finite sample");
    peak = std::max(peak, std::abs(s));
  }
  if (peak == 0.0) throw DegenerateInputError("cannot normalize a silent waveform");
  Waveform out = w;
  if (peak == target_peak) return out;
  const double scale = target_peak / peak;
  for (double& s : out.samples) s *= scale;
  return out;
}

}  // namespace murmur::dsp
