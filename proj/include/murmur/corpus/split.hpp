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

#include "murmur/corpus/manifest.hpp"

namespace murmur::corpus {

struct SplitSpec {
  std::array<double, 3> ratios = {91.0, 6.0, 3.0};  // train, val, test
  std::uint64_t seed = 0;
};

struct SplitResult {
  Manifest train, val, test;
};

/// Speaker-disjoint split. Speakers are shuffled with the seed, then each is
/// given to the bucket furthest below its utterance-count target. Records
/// keep their manifest order inside a bucket. Throws InfeasibleSplitError
/// with fewer than three speakers and ArgumentError on bad ratios.
SplitResult split_speakers(const Manifest& records, const SplitSpec& spec);

}  // namespace murmur::corpus
