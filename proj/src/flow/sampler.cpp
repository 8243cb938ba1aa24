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


#include "murmur/flow/sampler.hpp"

#include <algorithm>
#include <string>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/flow/cfm.hpp"

namespace murmur::flow {

Matrix euler_sample(const FlowModel& model, const std::vector<std::int64_t>& tokens, Direction direction,
                    const Matrix& prompt_mel, Eigen::Index target_frames, int steps, std::uint64_t seed,
                    const StepObserver& observer) {
  const int bins = model.config().mel_bins;
  if (steps < 1) throw ArgumentError("euler_sample needs at least one step");
  if (target_frames < 1) throw ArgumentError("euler_sample needs at least one target frame");
  if (prompt_mel.rows() > 0 && prompt_mel.cols() != bins) throw ArgumentError("prompt mel width differs from mel_bins");
  const Eigen::Index prompt = prompt_mel.rows();
  const Eigen::Index total = prompt + target_frames;
  if (static_cast<Eigen::Index>(tokens.size()) != total) {
    throw ArgumentError("euler_sample: " + std::to_string(tokens.size()) + " tokens for " + std::to_string(prompt) +
                        " prompt + " + std::to_string(target_frames) + " target frames");
  }

  std::vector<char> mask(static_cast<std::size_t>(total), 0);
  std::fill(mask.begin() + prompt, mask.end(), 1);
  Matrix y(total, bins);
  if (prompt > 0) y.topRows(prompt) = model.normalize(prompt_mel);
  Rng rng("flow.sample", seed);
  for (Eigen::Index r = prompt; r < total; ++r) {
    for (Eigen::Index c = 0; c < bins; ++c) y(r, c) = rng.normal();
  }
  const Matrix condition = make_masked_condition(y, mask, derive_seed("flow.sample.condition", seed));

  if (observer) observer(0, y);
  const double dt = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const Matrix v = velocity_forward(model, y, k * dt, tokens, direction, condition);
    y.bottomRows(target_frames) += dt * v.bottomRows(target_frames);
    if (observer) observer(k + 1, y);
  }
  return model.denormalize(y.bottomRows(target_frames));
}

}  // namespace murmur::flow
