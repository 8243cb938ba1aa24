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
#include <string_view>
#include <vector>

#include "murmur/nn/autograd.hpp"
#include "murmur/nn/params.hpp"
#include "murmur/nn/transformer.hpp"

namespace murmur::flow {

enum class Direction { kW2n = 0, kN2w = 1 };

std::string_view direction_name(Direction d);
/// "w2n" or "n2w"; throws ArgumentError otherwise.
Direction parse_direction(std::string_view name);

struct FlowConfig {
  int mel_bins = 80;
  std::int64_t codebook_size = 1000;
  int time_dim = 32;  // sinusoidal features before the learned projection
  nn::TrunkConfig trunk;

  void validate() const;
};

/// Conditional velocity model. Every frame's input is the sum of a token
/// embedding, a direction embedding, a time embedding and linear
/// projections of y_t and of the masked condition; a transformer trunk and a
/// linear head produce the velocity.
///
/// The model works on per-bin standardized mels. normalize() / denormalize()
/// convert with the stored statistics; batches and velocities are always in
/// the normalized space.
class FlowModel {
 public:
  FlowModel(FlowConfig config, std::uint64_t seed);

  const FlowConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

  const RowVector& mel_mean() const { return mean_; }
  const RowVector& mel_std() const { return std_; }
  void set_normalization(RowVector mean, RowVector std);
  void fit_normalization(const std::vector<Matrix>& mels);
  Matrix normalize(const Matrix& mel) const;
  Matrix denormalize(const Matrix& mel) const;

 private:
  FlowConfig config_;
  std::uint64_t seed_;
  nn::ParamSet params_;
  RowVector mean_, std_;
};

/// nu_t(y_t | tokens, direction, condition), frames x mel_bins.
/// Throws ArgumentError on a frame-count or width mismatch or a token
/// outside the codebook.
nn::Var velocity_forward(nn::Tape& tape, const FlowModel& model, const Matrix& y_t, double t,
                         const std::vector<std::int64_t>& tokens, Direction direction, const Matrix& condition);
Matrix velocity_forward(const FlowModel& model, const Matrix& y_t, double t, const std::vector<std::int64_t>& tokens,
                        Direction direction, const Matrix& condition);

}  // namespace murmur::flow
