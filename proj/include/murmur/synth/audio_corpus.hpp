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

#include <cstdint>
#include <filesystem>

#include "murmur/corpus/manifest.hpp"

namespace murmur::synth {

struct AudioCorpusSpec {
  int pairs = 10;
  int speakers = 2;
  int phones = 12;
  int min_frames = 100;  // normal-member speech frames, before lead/tail
  int max_frames = 160;
  double warp_lo = 0.7;  // whisper member phone durations scaled by U[lo, hi]
  double warp_hi = 1.4;
  bool whisper_excitation = true;  // false renders the whisper member voiced
  corpus::Language language = corpus::Language::kEN;
  std::string prefix = "u";
};

/// Renders `spec.pairs` whisper/normal twins with AudioWorld into `dir`
/// (`<prefix>NNN.whisper.wav`, `<prefix>NNN.normal.wav`), writes
/// `dir/manifest.tsv` and returns the manifest. Speakers get distinct
/// F0 and formant scales. Transcripts spell the phone sequence.
corpus::Manifest write_audio_corpus(const std::filesystem::path& dir, const AudioCorpusSpec& spec, std::uint64_t seed);

}  // namespace murmur::synth
