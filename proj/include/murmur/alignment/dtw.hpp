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

#include <string_view>
#include <utility>
#include <vector>

#include "murmur/common/matrix.hpp"

namespace murmur::alignment {

enum class Distance { kEuclidean, kSquaredEuclidean, kManhattan, kCosine };

/// "euclidean", "sqeuclidean", "manhattan" or "cosine".
Distance parse_distance(std::string_view name);

double frame_distance(const Eigen::Ref<const RowVector>& x, const Eigen::Ref<const RowVector>& y, Distance d);

struct AlignmentPath {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> steps;
  double cost = 0.0;
};

/// Throws ArgumentError unless `path` runs from (0,0) to (len_a-1, len_b-1)
/// with unit steps in i, j or both.
void validate_path(const AlignmentPath& path, Eigen::Index len_a, Eigen::Index len_b);

/// Globally optimal DTW by full dynamic programming. Ties prefer the
/// diagonal predecessor, then (i-1, j), then (i, j-1).
AlignmentPath dtw_exact(const Matrix& a, const Matrix& b, Distance distance = Distance::kEuclidean);

/// Multi-resolution approximation (coarsen by 2, recurse, project the path,
/// widen by `radius`, refine inside that window). Falls back to dtw_exact once
/// either sequence has at most radius + 2 frames.
AlignmentPath fastdtw(const Matrix& a, const Matrix& b, int radius = 5, Distance distance = Distance::kEuclidean);

enum class MappingTarget { kA, kB };

/// For each frame of the target sequence, exactly one frame of the other one.
struct FrameMapping {
  std::vector<Eigen::Index> target_to_source;
  Eigen::Index source_frames = 0;
};

/// Each target frame takes the lower median of the source frames it is
/// matched with along the path.
FrameMapping path_to_frame_mapping(const AlignmentPath& path, MappingTarget target);

}  // namespace murmur::alignment
