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
#include <string>
#include <string_view>

#include "murmur/nn/autograd.hpp"
#include "murmur/nn/params.hpp"
#include "murmur/nn/transformer.hpp"
#include "murmur/tokenizer/fsq.hpp"

namespace murmur::tokenizer {

enum class Role { kDistilled, kW2n, kN2w };

std::string_view role_name(Role role);
/// "distilled", "w2n" or "n2w"; throws ArgumentError otherwise.
Role parse_role(std::string_view name);

struct SeqModelConfig {
  int feature_dim = 80;
  int embed_dim = 4;  // equals the number of FSQ levels
  nn::TrunkConfig trunk;
  FsqConfig fsq;

  void validate() const;
};

/// Student tokenizer: input projection, transformer trunk, output projection.
/// Inputs are standardized by fixed per-feature mean/std buffers before the
/// input projection.
class SeqModel {
 public:
  SeqModel(SeqModelConfig config, Role role, std::uint64_t seed);

  const SeqModelConfig& config() const { return config_; }
  Role role() const { return role_; }
  std::uint64_t seed() const { return seed_; }

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

  const RowVector& feature_mean() const { return mean_; }
  const RowVector& feature_std() const { return std_; }
  void set_normalization(RowVector mean, RowVector std);
  /// Per-feature mean and std over all rows of `frames`, std floored at 1e-3.
  void fit_normalization(const std::vector<Matrix>& frames);

  /// Same parameters and buffers under another role.
  SeqModel with_role(Role role) const;

  /// Trunk output before the output projection, frames x dim_model.
  nn::Var encode(nn::Tape& tape, const Matrix& features) const;
  nn::Var forward(nn::Tape& tape, const Matrix& features) const;
  /// Continuous embeddings, frames x embed_dim.
  Matrix forward(const Matrix& features) const;

 private:
  SeqModelConfig config_;
  Role role_;
  std::uint64_t seed_;
  nn::ParamSet params_;
  RowVector mean_, std_;
};

/// Frozen distilled tokenizer: forward pass then FSQ. Throws UsageError for
/// any role other than distilled.
SemanticTokens tokenize(const SeqModel& tokenizer, const Matrix& features);

/// Unified tokenizer inference: quantized output of a w2n / n2w model.
SemanticTokens convert_tokens(const SeqModel& model, const Matrix& features);

}  // namespace murmur::tokenizer
