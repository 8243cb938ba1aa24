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


#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/dsp/spectral.hpp"
#include "murmur/dsp/waveform.hpp"
#include "support/temp_dir.hpp"

using namespace murmur;
using namespace murmur::dsp;

namespace {

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string wav_bytes(const std::vector<std::int16_t>& pcm, std::uint16_t channels = 1, std::uint16_t bits = 16,
                      std::uint32_t rate = 16000) {
  std::string s = "RIFF";
  put32(s, static_cast<std::uint32_t>(36 + 2 * pcm.size()));
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, channels);
  put32(s, rate);
  put32(s, rate * channels * bits / 8);
  put16(s, static_cast<std::uint16_t>(channels * bits / 8));
  put16(s, bits);
  s += "data";
  put32(s, static_cast<std::uint32_t>(2 * pcm.size()));
  for (auto v : pcm) put16(s, static_cast<std::uint16_t>(v));
  return s;
}

void write_bytes(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Waveform sine(double freq, double seconds, int rate, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

}  // namespace

TEST_CASE("load_wav scales int16 by 1/32768") {
  testing::TempDir dir;
  write_bytes(dir / "a.wav", wav_bytes({16384}));
  auto w = load_wav(dir / "a.wav");
  REQUIRE(w.samples.size() == 1);
  CHECK(w.samples[0] == 0.5);
  CHECK(w.sample_rate == 16000);

  write_bytes(dir / "b.wav", wav_bytes({-32768}));
  CHECK(load_wav(dir / "b.wav").samples[0] == -1.0);
}

TEST_CASE("load_wav rejects malformed and unsupported files") {
  testing::TempDir dir;
  write_bytes(dir / "stereo.wav", wav_bytes({1, 2, 3, 4}, 2));
  CHECK_THROWS_AS(load_wav(dir / "stereo.wav"), UnsupportedFormatError);

  std::string eight_bit = wav_bytes({1, 2}, 1, 8);
  write_bytes(dir / "u8.wav", eight_bit);
  CHECK_THROWS_AS(load_wav(dir / "u8.wav"), UnsupportedFormatError);

  write_bytes(dir / "junk.wav", "RIFFxxxxJUNK");
  CHECK_THROWS_AS(load_wav(dir / "junk.wav"), FormatError);

  std::string truncated = wav_bytes({1, 2, 3, 4});
  truncated.resize(truncated.size() - 3);
  write_bytes(dir / "trunc.wav", truncated);
  CHECK_THROWS_AS(load_wav(dir / "trunc.wav"), FormatError);

  CHECK_THROWS_AS(load_wav(dir / "missing.wav"), IoError);
}

TEST_CASE("write_wav quantizes and clips") {
  testing::TempDir dir;
  write_wav(Waveform{{0.5}, 16000}, dir / "half.wav");
  const std::string half = read_bytes(dir / "half.wav");
  REQUIRE(half.size() == 46);
  CHECK(static_cast<unsigned char>(half[44]) == 0x00);
  CHECK(static_cast<unsigned char>(half[45]) == 0x40);  // 16384

  write_wav(Waveform{{1.5, -3.0}, 16000}, dir / "clip.wav");
  const auto clipped = load_wav(dir / "clip.wav");
  CHECK(clipped.samples[0] == 32767.0 / 32768.0);
  CHECK(clipped.samples[1] == -1.0);

  CHECK_THROWS_AS(write_wav(Waveform{{0.0}, 16000}, dir / "no_such_dir" / "x.wav"), IoError);
}

TEST_CASE("white noise survives a write/load round trip within one quantization step") {
  testing::TempDir dir;
  Rng rng(3);
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(16000);
  for (auto& s : w.samples) s = rng.uniform(-1.0, 1.0);
  write_wav(w, dir / "noise.wav");
  const auto back = load_wav(dir / "noise.wav");
  REQUIRE(back.samples.size() == w.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) worst = std::max(worst, std::abs(back.samples[i] - w.samples[i]));
  CHECK(worst <= 1.0 / 32768.0);
  CHECK(wav_duration(dir / "noise.wav") == doctest::Approx(1.0));
}

TEST_CASE("resample at the source rate is the identity") {
  Rng rng(5);
  Waveform w;
  w.sample_rate = 22050;
  for (int i = 0; i < 500; ++i) w.samples.push_back(rng.uniform(-1, 1));
  const auto out = resample(w, 22050);
  CHECK(out.samples == w.samples);
  CHECK_THROWS_AS(resample(w, 0), ArgumentError);
}

TEST_CASE("resample 48k -> 16k keeps length and the 440 Hz peak") {
  const auto w = sine(440.0, 1.0, 48000);
  const auto out = resample(w, 16000);
  CHECK(out.sample_rate == 16000);
  CHECK(std::abs(static_cast<long>(out.samples.size()) - 16000) <= 1);

  // FFT-peak oracle: dominant bin of the resampled signal.
  const int n = 16000;
  RealFft fft(n);
  std::vector<double> buf(out.samples.begin(), out.samples.begin() + n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  fft.forward(buf, spec);
  int best = 0;
  for (int k = 1; k <= n / 2; ++k) {
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  }
  const double resolution = 16000.0 / n;
  CHECK(std::abs(best * resolution - 440.0) <= resolution);

  // Interior samples track the analytic sine closely.
  double worst = 0.0;
  for (int i = 200; i < n - 200; ++i) {
    worst = std::max(worst, std::abs(out.samples[i] - 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("peak_normalize") {
  auto out = peak_normalize(Waveform{{0.25, -0.5}, 16000}, 1.0);
  CHECK(out.samples == std::vector<double>{0.5, -1.0});

  CHECK(peak_normalize(out, 1.0).samples == out.samples);
  CHECK_THROWS_AS(peak_normalize(Waveform{{0.0, 0.0}, 16000}), DegenerateInputError);

  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Waveform w;
    for (int i = 0; i < 64; ++i) w.samples.push_back(rng.normal());
    const auto argmax = [](const Waveform& x) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < x.samples.size(); ++i) {
        if (std::abs(x.samples[i]) > std::abs(x.samples[best])) best = i;
      }
      return best;
    };
    const auto normalized = peak_normalize(w, 0.9);
    CHECK(argmax(normalized) == argmax(w));
    CHECK(std::abs(normalized.samples[argmax(w)]) == doctest::Approx(0.9));

    // Scale equivariance.
    Waveform scaled = w;
    const double c = rng.uniform(0.1, 10.0);
    for (auto& s : scaled.samples) s *= c;
    const auto renorm = peak_normalize(scaled, 0.9);
    for (std::size_t i = 0; i < w.samples.size(); ++i) CHECK(renorm.samples[i] == doctest::Approx(normalized.samples[i]).epsilon(1e-12));
  }
}
