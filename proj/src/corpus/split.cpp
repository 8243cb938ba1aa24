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


#include "murmur/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"

namespace murmur::corpus {

SplitResult split_speakers(const Manifest& records, const SplitSpec& spec) {
  double total_ratio = 0.0;
  for (double r : spec.ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ArgumentError("split ratios must be finite and non-negative");
    total_ratio += r;
  }
  if (!(total_ratio > 0.0)) throw ArgumentError("split ratios must sum to a positive value");

  std::map<std::string, std::size_t> counts;  // sorted, so the shuffle input is canonical
  for (const auto& r : records) ++counts[r.speaker];
  if (counts.size() < 3) {
    throw InfeasibleSplitError("speaker-disjoint split needs at least 3 speakers, found " + std::to_string(counts.size()));
  }
  std::vector<std::pair<std::string, std::size_t>> speakers(counts.begin(), counts.end());
  Rng rng("split", spec.seed);
  for (std::size_t i = speakers.size() - 1; i > 0; --i) std::swap(speakers[i], speakers[rng.below(i + 1)]);

  const double total = static_cast<double>(records.size());
  std::array<double, 3> assigned{};
  std::map<std::string, int> bucket_of;
  for (const auto& [speaker, n] : speakers) {
    int best = 0;
    double best_deficit = -1e300;
    for (int b = 0; b < 3; ++b) {
      const double deficit = spec.ratios[static_cast<std::size_t>(b)] / total_ratio * total - assigned[static_cast<std::size_t>(b)];
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = b;
      }
    }
    assigned[static_cast<std::size_t>(best)] += static_cast<double>(n);
    bucket_of[speaker] = best;
  }

  SplitResult out;
  for (const auto& r : records) {
    switch (bucket_of[r.speaker]) {
      case 0: out.train.push_back(r); break;
      case 1: out.val.push_back(r); break;
      default: out.test.push_back(r); break;
    }
  }
  return out;
}

}  // namespace murmur::corpus
