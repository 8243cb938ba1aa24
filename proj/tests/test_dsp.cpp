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


#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/dsp/analysis.hpp"
#include "murmur/dsp/spectral.hpp"

using namespace murmur;
using namespace murmur::dsp;

namespace {

Waveform sine(double freq, double seconds, int rate = 16000, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * freq * i / rate));
  return w;
}

Waveform silence(double seconds, int rate = 16000) {
  return Waveform{std::vector<double>(static_cast<std::size_t>(seconds * rate), 0.0), rate};
}

Waveform concat(std::initializer_list<Waveform> parts) {
  Waveform out;
  for (const auto& p : parts) {
    out.sample_rate = p.sample_rate;
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
  }
  return out;
}

}  // namespace

TEST_CASE("mel frame count and silence floor") {
  const MelConfig cfg;
  const auto mel = mel_spectrogram(silence(1.0), cfg);
  CHECK(mel.frames() == 1 + (16000 - 400) / 160);
  CHECK(mel.bins() == 80);
  CHECK((mel.values.array() == std::log(1e-10)).all());

  CHECK_THROWS_AS(mel_spectrogram(silence(0.01), cfg), DegenerateInputError);
  StftConfig bad;
  bad.hop_length = 500;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("440 Hz sine peaks in the mel bin centred nearest 440 Hz") {
  const MelConfig cfg;
  const auto mel = mel_spectrogram(sine(440.0, 0.5), cfg);
  const auto centers = mel_center_frequencies(cfg.mel_bins, kFeatureRate);
  int nearest = 0;
  for (int m = 1; m < cfg.mel_bins; ++m) {
    if (std::abs(centers[m] - 440.0) < std::abs(centers[nearest] - 440.0)) nearest = m;
  }
  for (Eigen::Index f = 0; f < mel.frames(); ++f) {
    Eigen::Index best = 0;
    mel.values.row(f).maxCoeff(&best);
    CHECK(best == nearest);
  }
}

TEST_CASE("Parseval: spectrogram energy equals windowed time-domain energy") {
  Rng rng(1);
  Waveform w;
  for (int i = 0; i < 4000; ++i) w.samples.push_back(rng.normal() * 0.1);
  const StftConfig cfg;
  const Matrix power = power_spectrogram(w.samples, cfg);
  const auto window = make_window(cfg.window_kind, cfg.window_length);
  double spectral = 0.0, temporal = 0.0;
  const int half = cfg.fft_size / 2;
  for (Eigen::Index f = 0; f < power.rows(); ++f) {
    spectral += power(f, 0) + power(f, half);
    for (int k = 1; k < half; ++k) spectral += 2.0 * power(f, k);
    for (int n = 0; n < cfg.window_length; ++n) {
      const double v = w.samples[f * cfg.hop_length + n] * window[n];
      temporal += v * v;
    }
  }
  CHECK(std::abs(spectral / cfg.fft_size - temporal) <= 0.01 * temporal);
}

TEST_CASE("istft inverts stft away from the edges") {
  Rng rng(2);
  std::vector<double> x(3000);
  for (auto& v : x) v = rng.normal();
  const StftConfig cfg;
  const auto back = istft(stft(x, cfg), cfg);
  for (std::size_t i = 400; i < back.size() - 400; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("Griffin-Lim reconstructs a pure sine") {
  const StftConfig cfg;
  const auto w = sine(440.0, 0.5);
  const Matrix mag = stft(w.samples, cfg).cwiseAbs();
  const auto one = griffin_lim(mag, cfg, 1);
  const auto many = griffin_lim(mag, cfg, 32);
  const double e1 = spectral_convergence(one.samples, mag, cfg);
  const double e32 = spectral_convergence(many.samples, mag, cfg);
  MESSAGE("spectral convergence after 1 / 32 iterations: " << e1 << " / " << e32);
  CHECK(e32 <= 0.1);
  CHECK(e32 <= e1);
}

TEST_CASE("Griffin-Lim edge cases") {
  const StftConfig cfg;
  const Matrix zero = Matrix::Zero(5, cfg.bins());
  const auto out = griffin_lim(zero, cfg, 4);
  CHECK(std::all_of(out.samples.begin(), out.samples.end(), [](double s) { return s == 0.0; }));
  CHECK(out.samples.size() == 4 * 160 + 400);

  Matrix negative = zero;
  negative(0, 0) = -1.0;
  CHECK_THROWS_AS(griffin_lim(negative, cfg, 4), ArgumentError);
  CHECK_THROWS_AS(griffin_lim(zero, cfg, 0), ArgumentError);
}

TEST_CASE("Griffin-Lim error is non-increasing over iterations on random magnitudes") {
  StftConfig cfg;
  cfg.window_length = 64;
  cfg.hop_length = 16;
  cfg.fft_size = 64;
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix mag(12, cfg.bins());
    for (Eigen::Index i = 0; i < mag.size(); ++i) mag.data()[i] = std::abs(rng.normal());
    for (auto init : {PhaseInit::kPhaseLocked, PhaseInit::kRandom}) {
      double previous = std::numeric_limits<double>::infinity();
      for (int it = 1; it <= 12; ++it) {
        const auto w = griffin_lim(mag, cfg, it, kFeatureRate, static_cast<std::uint64_t>(trial), init);
        const double e = spectral_convergence(w.samples, mag, cfg);
        CHECK(e <= previous + 1e-6);
        previous = e;
      }
    }
  }
}

TEST_CASE("mel inversion roughly preserves the mel envelope") {
  const MelConfig cfg;
  const auto w = concat({sine(300.0, 0.3, 16000, 0.3), sine(1200.0, 0.3, 16000, 0.3)});
  const auto mel = mel_spectrogram(w, cfg);
  const auto rebuilt = invert_mel(mel, cfg, 16);
  const auto mel2 = mel_spectrogram(rebuilt, cfg);
  REQUIRE(mel2.frames() == mel.frames());
  // Compare high-energy cells only; the floor is dominated by epsilon.
  double err = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < mel.values.size(); ++i) {
    if (mel.values.data()[i] > -5.0) {
      err += std::abs(mel.values.data()[i] - mel2.values.data()[i]);
      ++count;
    }
  }
  REQUIRE(count > 0);
  MESSAGE("mean abs log-mel error on loud cells: " << err / count);
  CHECK(err / count < 1.0);
}

TEST_CASE("trim_silence") {
  const auto w = concat({silence(0.5), sine(300.0, 1.0), silence(0.5)});
  const auto trimmed = trim_silence(w, -40.0, 0.1);
  CHECK(std::abs(trimmed.audio.duration_seconds() - 1.0) <= 0.05);

  // Concatenating the kept ranges reproduces the output.
  std::vector<double> rebuilt;
  for (const auto& r : trimmed.kept) rebuilt.insert(rebuilt.end(), w.samples.begin() + r.begin, w.samples.begin() + r.end);
  CHECK(rebuilt == trimmed.audio.samples);

  const auto loud = sine(300.0, 0.5);
  const auto same = trim_silence(loud, -40.0, 0.1);
  CHECK(same.audio.samples == loud.samples);
  REQUIRE(same.kept.size() == 1);
  CHECK(same.kept[0] == SampleRange{0, loud.samples.size()});

  const auto empty = trim_silence(silence(1.0), -40.0, 0.1);
  CHECK(empty.audio.samples.empty());
  CHECK(empty.kept.empty());

  CHECK_THROWS_AS(trim_silence(loud, 0.0, 0.1), ArgumentError);
}

TEST_CASE("trim_silence drops long internal pauses and keeps short ones") {
  const auto w = concat({sine(300.0, 0.3), silence(0.05), sine(300.0, 0.3), silence(0.4), sine(300.0, 0.3)});
  const auto trimmed = trim_silence(w, -40.0, 0.1);
  REQUIRE(trimmed.kept.size() == 2);
  CHECK(std::abs(trimmed.audio.duration_seconds() - 0.95) <= 0.03);

  TrimOptions keep_internal;
  keep_internal.trim_internal = false;
  CHECK(trim_silence(w, keep_internal).kept.size() == 1);
}

TEST_CASE("extract_f0 on known sines") {
  const auto track = extract_f0(sine(220.0, 1.0), 60.0, 400.0, 160);
  REQUIRE(track.frames() > 50);
  CHECK(track.voiced_frames() == track.frames());
  for (double f : track.f0) CHECK(std::abs(f - 220.0) <= 2.0);

  CHECK_THROWS_AS(extract_f0(sine(220.0, 0.2), 400.0, 60.0, 160), ArgumentError);
  CHECK_THROWS_AS(extract_f0(sine(220.0, 0.2), 60.0, 9000.0, 160), ArgumentError);
}

TEST_CASE("extract_f0 median error over the 100-400 Hz range") {
  for (double freq = 100.0; freq <= 400.0; freq += 25.0) {
    const auto track = extract_f0(sine(freq, 0.5), F0Options{});
    std::vector<double> errors;
    for (double f : track.f0) {
      if (f > 0.0) errors.push_back(std::abs(f - freq));
    }
    REQUIRE(!errors.empty());
    std::nth_element(errors.begin(), errors.begin() + errors.size() / 2, errors.end());
    CHECK_MESSAGE(errors[errors.size() / 2] <= 2.0, "freq " << freq);
  }
}

TEST_CASE("extract_f0 marks low-level noise unvoiced") {
  Rng rng(4);
  Waveform w;
  for (int i = 0; i < 16000; ++i) w.samples.push_back(0.01 * rng.normal());
  F0Options opts;
  opts.voicing_threshold = 0.8;
  CHECK(extract_f0(w, opts).voiced_frames() == 0);
}

TEST_CASE("extract_f0 follows a 220 -> 440 Hz step") {
  const auto w = concat({sine(220.0, 0.5), sine(440.0, 0.5)});
  F0Options opts;
  opts.f0_max = 600.0;
  const auto track = extract_f0(w, opts);
  int low = 0, high = 0;
  for (double f : track.f0) {
    if (std::abs(f - 220.0) <= 2.0) ++low;
    if (std::abs(f - 440.0) <= 4.0) ++high;
  }
  CHECK(low > 30);
  CHECK(high > 30);
  CHECK(std::abs(track.f0.front() - 220.0) <= 2.0);
  CHECK(std::abs(track.f0.back() - 440.0) <= 4.0);
}
