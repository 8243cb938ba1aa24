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

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "murmur/common/matrix.hpp"
#include "murmur/dsp/analysis.hpp"

namespace murmur::metrics {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;

  std::size_t total() const { return substitutions + insertions + deletions; }
  bool operator==(const EditCounts&) const = default;
};

/// Unit-cost Levenshtein alignment of `hyp` against `ref`. Among minimal
/// alignments the backtrace (from the end) prefers a substitution or match,
/// then a deletion (ref token missing from hyp), then an insertion.
template <class T>
EditCounts edit_distance(std::span<const T> hyp, std::span<const T> ref) {
  const std::size_t n = ref.size(), m = hyp.size();
  // d[i * (m + 1) + j]: cost of turning ref[0, i) into hyp[0, j).
  std::vector<std::size_t> d((n + 1) * (m + 1));
  const auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (!(ref[i - 1] == hyp[j - 1])) ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

EditCounts edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

enum class Unit { kWord, kCharacter };
std::string_view unit_name(Unit u);  // "word" / "character"

/// Word: whitespace split. Character: code points with whitespace removed.
std::vector<std::string> units(std::string_view text, Unit unit);

/// (S + I + D) / |ref|. Throws UndefinedMetricError for an empty reference.
double error_rate(std::string_view hyp, std::string_view ref, Unit unit);

/// Pearson correlation over frames voiced in both tracks after stretching
/// the shorter track onto the longer one's frame axis. Nothing when fewer
/// than `min_frames` frames are co-voiced or either side is constant.
std::optional<double> f0_corr(const dsp::F0Track& converted, const dsp::F0Track& target, std::size_t min_frames = 10);

/// Linear resampling of the frame axis to `frames`. A resampled frame is
/// interpolated when both neighbours are voiced, otherwise it takes the
/// nearer neighbour (so voicing boundaries stay sharp).
dsp::F0Track stretch_track(const dsp::F0Track& track, std::size_t frames);

/// dot(a, b) / (|a| |b|). Throws UndefinedMetricError for a zero vector,
/// ArgumentError for a length mismatch.
double cosine_sim(const RowVector& a, const RowVector& b);

/// Spectral speaker-embedding stand-in: per-bin mean then per-bin standard
/// deviation of the mel frames (2 x bins values).
RowVector proxy_embedding(const Matrix& mel);

}  // namespace murmur::metrics
