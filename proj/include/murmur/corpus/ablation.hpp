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
#include <string>
#include <string_view>
#include <vector>

#include "murmur/corpus/frontend.hpp"
#include "murmur/corpus/manifest.hpp"

namespace murmur::corpus {

enum class AblationMode { kRaw, kDsp, kAligned, kPseudo, kAPlusP };

std::string_view ablation_mode_name(AblationMode m);  // "RAW", "DSP", "ALIGNED", "PSEUDO", "A_PLUS_P"
AblationMode parse_ablation_mode(std::string_view s);  // case-insensitive; ParseError otherwise

/// One (whisper, normal) training item with equal frame counts.
struct TrainingPair {
  std::string id;
  Matrix whisper;  // raw log-mel, frames x bins
  Matrix normal;
  std::string origin;  // "raw", "dsp", "aligned" or "pseudo"
};

struct AblationInputs {
  Manifest real;                         // RAW, DSP: real records (pairs for RAW, normal members for DSP)
  std::filesystem::path aligned_dir;     // ALIGNED, A_PLUS_P: output of build_aligned_corpus
  Manifest pseudo;                       // PSEUDO, A_PLUS_P: records from gen_pseudo_pair
  FrontendOptions frontend;
  std::uint64_t seed = 0;
  int dsp_median_bins = 31;
  int dsp_smooth_bins = 125;
};

/// Training set of the given data configuration. RAW pads the shorter member
/// of every real pair at the end with log(epsilon) silence rows; DSP pairs
/// every real normal record with its dsp_whisperize version; ALIGNED reads
/// the aligned corpus; PSEUDO loads the pseudo pairs untrimmed; A_PLUS_P is
/// ALIGNED followed by PSEUDO. Throws ConfigurationError when the mode's
/// inputs are missing and ValidationError on duplicate ids in A_PLUS_P.
std::vector<TrainingPair> make_ablation_config(AblationMode mode, const AblationInputs& inputs);

/// Excitation replacement: STFT magnitude median-filtered across
/// `median_bins` frequency bins (flattens harmonics), box-smoothed across
/// `smooth_bins` (broadens formants), seeded uniform random phase,
/// overlap-add. Same length as the input.
dsp::Waveform dsp_whisperize(const dsp::Waveform& w, std::uint64_t seed, int median_bins = 31, int smooth_bins = 125,
                             const dsp::StftConfig& cfg = {});

/// Appends rows of `value` until `m` has `frames` rows.
Matrix pad_frames(const Matrix& m, Eigen::Index frames, double value);

}  // namespace murmur::corpus
