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


#include "murmur/synth/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "murmur/common/errors.hpp"
#include "murmur/nn/transformer.hpp"

namespace murmur::synth {

namespace {

constexpr int kHop = 160;

}  // namespace

int PhoneScript::frames() const {
  int n = 0;
  for (int d : durations) n += d;
  return n;
}

std::vector<int> PhoneScript::frame_labels() const {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(frames()));
  for (std::size_t k = 0; k < phones.size(); ++k) labels.insert(labels.end(), static_cast<std::size_t>(durations[k]), phones[k]);
  return labels;
}

PhoneScript random_script(Rng& rng, int phone_count, int frames, int min_dur, int max_dur) {
  if (phone_count < 2 || frames <= 0 || min_dur < 1 || max_dur < min_dur) throw ArgumentError("bad script parameters");
  PhoneScript s;
  int total = 0;
  while (total < frames) {
    int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(phone_count)));
    // Consecutive phones differ so that every phone boundary is visible.
    if (!s.phones.empty() && p == s.phones.back()) p = (p + 1) % phone_count;
    const int d = std::min(min_dur + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dur - min_dur + 1))), frames - total);
    s.phones.push_back(p);
    s.durations.push_back(d);
    total += d;
  }
  return s;
}

PhoneScript warp_script(const PhoneScript& script, Rng& rng, double lo, double hi) {
  PhoneScript out = script;
  for (int& d : out.durations) d = std::max(1, static_cast<int>(std::lround(d * rng.uniform(lo, hi))));
  return out;
}

FeatureWorld::FeatureWorld(FeatureWorldConfig config, std::uint64_t seed) : config_(config) {
  if (config_.feature_dim <= 0 || config_.phones < 2) throw ArgumentError("bad feature world config");
  Rng rng("synth.features", seed);
  const int f = config_.feature_dim;
  prototypes_ = nn::random_normal(rng, config_.phones, f, 1.0);
  const Eigen::HouseholderQR<Matrix> qr(nn::random_normal(rng, f, f, 1.0));
  const Matrix q = qr.householderQ();
  Vector scales(f), inv(f);
  for (int k = 0; k < f; ++k) {
    scales(k) = rng.uniform(0.6, 1.4);
    inv(k) = 1.0 / scales(k);
  }
  warp_ = q * scales.asDiagonal();
  inverse_warp_ = inv.asDiagonal() * q.transpose();
  offset_ = nn::random_normal(rng, 1, f, 0.5).row(0);
}

Matrix FeatureWorld::render(const PhoneScript& script, Rng& rng) const {
  const auto labels = script.frame_labels();
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix x(n, config_.feature_dim);
  for (Eigen::Index t = 0; t < n; ++t) {
    // Two-frame crossfade into the next phone.
    const int cur = labels[static_cast<std::size_t>(t)];
    RowVector frame = prototypes_.row(cur);
    if (t + 1 < n && labels[static_cast<std::size_t>(t + 1)] != cur) {
      frame = 0.7 * frame + 0.3 * prototypes_.row(labels[static_cast<std::size_t>(t + 1)]);
    }
    for (Eigen::Index c = 0; c < frame.size(); ++c) frame(c) += config_.frame_noise * rng.normal();
    x.row(t) = frame;
  }
  return x;
}

Matrix FeatureWorld::whisperize(const Matrix& normal) const {
  Matrix w = normal * warp_;
  w.rowwise() += offset_;
  return w;
}

Matrix FeatureWorld::normalize(const Matrix& whisper) const {
  return (whisper.rowwise() - offset_) * inverse_warp_;
}

TokenMelTask::TokenMelTask(int mel_bins, int vocabulary, std::uint64_t seed, int hidden) : vocabulary_(vocabulary) {
  if (mel_bins <= 0 || vocabulary <= 0 || hidden <= 0) throw ArgumentError("bad token-mel task sizes");
  Rng rng("synth.token_mel", seed);
  embed_ = nn::random_normal(rng, vocabulary, 8, 1.0);
  w1_ = nn::random_normal(rng, 8, hidden, 1.0 / std::sqrt(8.0));
  w2_ = nn::random_normal(rng, hidden, mel_bins, 1.5 / std::sqrt(static_cast<double>(hidden)));
  bias_ = nn::random_normal(rng, 1, mel_bins, 0.5).row(0);
  direction_offset_ = nn::random_normal(rng, 2, mel_bins, 0.5);
}

std::vector<std::int64_t> TokenMelTask::random_tokens(Rng& rng, int frames, int codebook_stride) const {
  std::vector<std::int64_t> tokens;
  tokens.reserve(static_cast<std::size_t>(frames));
  while (static_cast<int>(tokens.size()) < frames) {
    const auto tok = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(vocabulary_))) * codebook_stride;
    const int run = 2 + static_cast<int>(rng.below(5));
    for (int k = 0; k < run && static_cast<int>(tokens.size()) < frames; ++k) tokens.push_back(tok);
  }
  return tokens;
}

Matrix TokenMelTask::mel(const std::vector<std::int64_t>& tokens, int direction, int codebook_stride) const {
  if (direction < 0 || direction > 1) throw ArgumentError("direction must be 0 or 1");
  Matrix e(static_cast<Eigen::Index>(tokens.size()), embed_.cols());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto tok = tokens[t] / codebook_stride;
    if (tokens[t] % codebook_stride != 0 || tok < 0 || tok >= vocabulary_) throw ArgumentError("token outside the task vocabulary");
    e.row(static_cast<Eigen::Index>(t)) = embed_.row(static_cast<Eigen::Index>(tok));
  }
  Matrix m = (e * w1_).array().tanh().matrix() * w2_;
  m.rowwise() += bias_ + direction_offset_.row(direction);
  return m;
}

AudioWorld::AudioWorld(int phones, std::uint64_t seed) {
  if (phones < 2) throw ArgumentError("need at least two phones");
  Rng rng("synth.formants", seed);
  for (int p = 0; p < phones; ++p) {
    formants_.push_back({rng.uniform(300.0, 850.0), rng.uniform(900.0, 2300.0), rng.uniform(2500.0, 3500.0)});
  }
}

dsp::Waveform AudioWorld::render(const PhoneScript& script, const Voice& voice, bool whisper, Rng& rng, int lead,
                                 int tail) const {
  const auto labels = script.frame_labels();
  const int speech = static_cast<int>(labels.size());
  const int total_frames = lead + speech + tail;
  const std::size_t n = static_cast<std::size_t>(total_frames) * kHop;
  const double sr = dsp::kFeatureRate;
  constexpr std::array<double, 3> kBandwidth = {90.0, 110.0, 160.0};
  // Whispered formants are markedly broader than voiced ones.
  const double widen = whisper ? 8.0 : 1.0;

  std::vector<double> out(n, 0.0);
  std::array<double, 3> x1{}, x2{}, y1{}, y2{};
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double frame_pos = static_cast<double>(i) / kHop - lead;
    if (frame_pos < 0.0 || frame_pos >= speech) continue;
    // Formant targets interpolated between frame centres.
    const double c = std::clamp(frame_pos - 0.5, 0.0, static_cast<double>(speech - 1));
    const auto f0i = static_cast<std::size_t>(c);
    const auto f1i = std::min(f0i + 1, static_cast<std::size_t>(speech - 1));
    const double a = c - static_cast<double>(f0i);

    double source;
    if (whisper) {
      source = 0.3 * rng.normal();
    } else {
      const double t = static_cast<double>(i) / sr;
      const double f0 = voice.f0 * (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * 4.0 * t));
      phase += f0 / sr;
      source = 0.0;
      if (phase >= 1.0) {
        phase -= 1.0;
        source = 1.0;
      }
    }
    // Parallel formant bank with a falling spectral tilt.
    constexpr std::array<double, 3> kGain = {1.0, 0.7, 0.4};
    double y = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double f = voice.formant_scale * ((1.0 - a) * formants_[static_cast<std::size_t>(labels[f0i])][k] +
                                              a * formants_[static_cast<std::size_t>(labels[f1i])][k]);
      const double r = std::exp(-std::numbers::pi * widen * kBandwidth[k] / sr);
      const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f / sr);
      const double a2 = -r * r;
      // Band-pass resonator: zeros at DC and Nyquist, unit gain at the peak.
      const double v = 0.5 * (1.0 - r * r) * (source - x2[k]) + a1 * y1[k] + a2 * y2[k];
      x2[k] = x1[k];
      x1[k] = source;
      y2[k] = y1[k];
      y1[k] = v;
      y += kGain[k] * v;
    }
    out[i] = y;
  }
  double peak = 0.0;
  for (double s : out) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (double& s : out) s *= voice.level / peak;
  }
  // Low-level noise floor in the lead and tail.
  for (std::size_t i = 0; i < n; ++i) {
    const double frame_pos = static_cast<double>(i) / kHop - lead;
    if (frame_pos < 0.0 || frame_pos >= speech) out[i] = 1e-4 * rng.normal();
  }
  return {std::move(out), dsp::kFeatureRate};
}

}  // namespace murmur::synth
