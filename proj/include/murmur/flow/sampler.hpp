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
#include <functional>
#include <vector>

#include "murmur/flow/model.hpp"

namespace murmur::flow {

/// Euler integration of the learned velocity from noise at t = 0 to t = 1.
///
/// `prompt_mel` (raw, un-normalized; may have zero rows) occupies the first
/// frames and is never modified; the following `target_frames` start from
/// seeded noise. Tokens cover prompt and target. Returns the raw target
/// region, target_frames x mel_bins.
///
/// `observer`, if set, sees the full normalized state before the first
/// step and after every step.
using StepObserver = std::function<void(int step, const Matrix& state)>;

Matrix euler_sample(const FlowModel& model, const std::vector<std::int64_t>& tokens, Direction direction,
                    const Matrix& prompt_mel, Eigen::Index target_frames, int steps, std::uint64_t seed,
                    const StepObserver& observer = {});

}  // namespace murmur::flow
