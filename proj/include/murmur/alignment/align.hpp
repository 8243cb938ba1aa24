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

#include <iosfwd>
#include <string>
#include <vector>

#include "murmur/alignment/dtw.hpp"
#include "murmur/dsp/spectral.hpp"

namespace murmur::alignment {

struct AlignedPair {
  dsp::MelSpectrogram aligned_source;  // target.frames() rows copied from source
  FrameMapping mapping;
  AlignmentPath path;
};

/// FastDTW between the two spectrograms, then one source frame per target
/// frame. Throws ArgumentError on empty or incompatible inputs.
AlignedPair align_pair(const dsp::MelSpectrogram& source, const dsp::MelSpectrogram& target, int radius = 5,
                       Distance distance = Distance::kEuclidean);

/// Rows of `source` picked by `mapping`.
Matrix apply_mapping(const Matrix& source, const FrameMapping& mapping);

/// One line per aligned pair: pair_id, path_length, cost, comma-separated mapping.
struct AlignmentRecord {
  std::string pair_id;
  std::size_t path_length = 0;
  double cost = 0.0;
  std::vector<Eigen::Index> mapping;
};

std::string format_alignment_record(const AlignmentRecord& record);
/// Throws ParseError on malformed lines.
AlignmentRecord parse_alignment_record(const std::string& line);

}  // namespace murmur::alignment
