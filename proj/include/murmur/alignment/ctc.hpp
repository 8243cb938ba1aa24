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

#include <filesystem>
#include <string>
#include <vector>

#include "murmur/common/matrix.hpp"

namespace murmur::alignment {

/// Per-frame log-softmax over a vocabulary whose index 0 is conventionally the
/// CTC blank.
struct Posteriorgram {
  Matrix log_probs;  // frames x vocab

  Eigen::Index frames() const { return log_probs.rows(); }
  Eigen::Index vocab() const { return log_probs.cols(); }

  /// Throws ArgumentError unless every row is a log-distribution
  /// (entries <= 0, logsumexp within `tolerance` of 0).
  void validate(double tolerance = 1e-4) const;
};

/// Row-wise log-softmax of arbitrary logits.
Posteriorgram log_softmax(const Matrix& logits);

Posteriorgram read_posteriorgram(const std::filesystem::path& path);
/// One token per line; line 0 is the blank symbol.
std::vector<std::string> read_vocabulary(const std::filesystem::path& path);

struct TokenSegment {
  int token = 0;
  Eigen::Index start_frame = 0;
  Eigen::Index end_frame = 0;  // exclusive

  bool operator==(const TokenSegment&) const = default;
};

/// Collapse repeats, then drop blanks.
std::vector<int> ctc_collapse(const std::vector<int>& frame_labels, int blank);

std::vector<int> ctc_greedy_decode(const Posteriorgram& p, int blank = 0);

struct ForcedAlignment {
  std::vector<int> frame_labels;  // one vocabulary index per frame
  std::vector<TokenSegment> segments;
  double log_prob = 0.0;  // score of the Viterbi path
};

/// Viterbi path through the blank-interleaved transcript graph.
///
/// Feasible iff frames >= |transcript| + (number of adjacent repeats), since
/// a repeated token needs a blank between its copies.
ForcedAlignment ctc_viterbi(const Posteriorgram& p, const std::vector<int>& transcript, int blank = 0);

std::vector<TokenSegment> ctc_forced_align(const Posteriorgram& p, const std::vector<int>& transcript, int blank = 0);

/// Groups consecutive sub-token segments into words. word_lengths must sum to
/// the number of segments; the word token is that of its first child.
std::vector<TokenSegment> merge_words(const std::vector<TokenSegment>& segments, const std::vector<int>& word_lengths);

}  // namespace murmur::alignment
