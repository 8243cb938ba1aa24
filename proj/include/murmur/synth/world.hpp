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


#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "murmur/common/matrix.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/dsp/waveform.hpp"

namespace murmur::synth {

/// Phone sequence with per-phone frame durations.
struct PhoneScript {
  std::vector<int> phones;
  std::vector<int> durations;

  int frames() const;
  /// Per-frame phone labels.
  std::vector<int> frame_labels() const;
};

/// Random script of roughly `frames` frames; phone durations in [min_dur, max_dur].
PhoneScript random_script(Rng& rng, int phone_count, int frames, int min_dur = 3, int max_dur = 9);

/// Same phones with every duration scaled by an independent factor in
/// [lo, hi] (at least one frame each).
PhoneScript warp_script(const PhoneScript& script, Rng& rng, double lo, double hi);

struct FeatureWorldConfig {
  int feature_dim = 80;
  int phones = 16;
  double frame_noise = 0.3;
};

/// Feature-space stand-in for speech: each phone has a prototype vector,
/// frames interpolate smoothly between neighbouring prototypes and carry
/// Gaussian noise. The whisper mode is a fixed invertible affine warp of
/// the normal mode.
class FeatureWorld {
 public:
  FeatureWorld(FeatureWorldConfig config, std::uint64_t seed);

  const FeatureWorldConfig& config() const { return config_; }

  /// Normal-mode features for a script.
  Matrix render(const PhoneScript& script, Rng& rng) const;
  Matrix whisperize(const Matrix& normal) const;
  Matrix normalize(const Matrix& whisper) const;  // inverse warp

 private:
  FeatureWorldConfig config_;
  Matrix prototypes_;  // phones x feature_dim
  Matrix warp_, inverse_warp_;
  RowVector offset_;
};

/// Deterministic token -> mel map: mel_t = tanh(E[tok_t] W1) W2 + bias,
/// optionally with a per-direction offset, used as a Stage-2 target.
class TokenMelTask {
 public:
  TokenMelTask(int mel_bins, int vocabulary, std::uint64_t seed, int hidden = 16);

  int vocabulary() const { return vocabulary_; }
  /// Token indices are drawn from [0, vocabulary); `codebook_stride` spreads
  /// them over a larger codebook.
  std::vector<std::int64_t> random_tokens(Rng& rng, int frames, int codebook_stride = 1) const;
  Matrix mel(const std::vector<std::int64_t>& tokens, int direction, int codebook_stride = 1) const;

 private:
  int vocabulary_;
  Matrix embed_, w1_, w2_, direction_offset_;
  RowVector bias_;
};

struct Voice {
  double f0 = 140.0;       // Hz
  double formant_scale = 1.0;
  double level = 0.5;
};

/// Vowel-like speech from a phone script: a glottal pulse train (normal) or
/// white noise (whisper) through per-phone formant resonators. `lead` and
/// `tail` frames of near-silence surround the speech. Frames are 10 ms.
class AudioWorld {
 public:
  AudioWorld(int phones, std::uint64_t seed);

  dsp::Waveform render(const PhoneScript& script, const Voice& voice, bool whisper, Rng& rng, int lead = 20,
                       int tail = 20) const;

 private:
  std::vector<std::array<double, 3>> formants_;
};

}  // namespace murmur::synth
