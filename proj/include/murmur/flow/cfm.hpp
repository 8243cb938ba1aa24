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
#include <vector>

#include "murmur/common/rng.hpp"
#include "murmur/flow/model.hpp"
#include "murmur/nn/params.hpp"

namespace murmur::flow {

/// (1 - t) y0 + t y1. Throws ArgumentError for t outside [0, 1] or a shape mismatch.
Matrix ot_interpolate(const Matrix& y0, const Matrix& y1, double t);

/// Copies y1 on frames with mask = 0 and draws unit Gaussian noise (seeded)
/// on frames with mask = 1.
Matrix make_masked_condition(const Matrix& y1, const std::vector<char>& mask, std::uint64_t noise_seed);

struct FlowBatch {
  Matrix y0;                          // noise
  Matrix y1;                          // target mel, normalized
  double t = 0.0;
  std::vector<char> mask;             // 1 = generate
  std::vector<std::int64_t> tokens;
  Direction direction = Direction::kW2n;
  Matrix condition;

  /// Throws ArgumentError on inconsistent shapes or t outside [0, 1].
  void validate() const;
  /// Model input: the OT interpolant on masked frames and y1 elsewhere, so
  /// that context frames look the same as at sampling time.
  Matrix y_t() const;
};

/// One training item: a normalized target mel and its tokens.
struct FlowExample {
  std::vector<std::int64_t> tokens;
  Matrix mel;
  Direction direction = Direction::kW2n;
};

struct MaskPolicy {
  double min_fraction = 0.4;
  double max_fraction = 0.9;
};

/// Contiguous masked span covering a uniform fraction of the frames (at least one).
std::vector<char> sample_span_mask(Rng& rng, Eigen::Index frames, const MaskPolicy& policy = {});

/// Draws t ~ U[0, 1], the mask, y0 and the condition noise from `rng`.
FlowBatch make_flow_batch(const FlowExample& example, Rng& rng, const MaskPolicy& policy = {});

/// Mean |(y1 - y0) - nu| over masked frames and all bins. Throws
/// DegenerateInputError when nothing is masked.
nn::Var cfm_loss(nn::Tape& tape, const FlowModel& model, const FlowBatch& batch);
/// The same loss for a given velocity prediction (frames x mel_bins).
nn::Var cfm_loss_given_velocity(nn::Var velocity, const FlowBatch& batch);
double cfm_loss(const FlowModel& model, const FlowBatch& batch);
/// Batch mean of cfm_loss.
double cfm_loss(const FlowModel& model, const std::vector<FlowBatch>& batches);

struct FlowGradResult {
  double loss = 0.0;
  nn::ParamSet grads;
};

/// Exact gradient of the batch-mean loss.
FlowGradResult flow_grad(const FlowModel& model, const std::vector<FlowBatch>& batches);

/// One Adam step; returns the loss before the update.
double flow_train_step(FlowModel& model, nn::Adam& optimizer, const std::vector<FlowBatch>& batches);

}  // namespace murmur::flow
