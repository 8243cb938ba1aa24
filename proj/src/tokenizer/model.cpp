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


#include "murmur/tokenizer/model.hpp"

#include <cmath>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"

namespace murmur::tokenizer {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kDistilled: return "distilled";
    case Role::kW2n: return "w2n";
    case Role::kN2w: return "n2w";
  }
  return "?";
}

Role parse_role(std::string_view name) {
  if (name == "distilled") return Role::kDistilled;
  if (name == "w2n") return Role::kW2n;
  if (name == "n2w") return Role::kN2w;
  throw ArgumentError("unknown tokenizer role '" + std::string(name) + "'");
}

void SeqModelConfig::validate() const {
  if (feature_dim <= 0) throw ArgumentError("feature_dim must be positive");
  fsq.validate();
  if (embed_dim != fsq.dims()) throw ArgumentError("embed_dim must equal the number of FSQ levels");
  trunk.validate();
}

SeqModel::SeqModel(SeqModelConfig config, Role role, std::uint64_t seed)
    : config_(std::move(config)), role_(role), seed_(seed) {
  config_.validate();
  Rng rng("tokenizer.init", seed);
  nn::add_linear(params_, "input_proj", config_.feature_dim, config_.trunk.dim_model, rng);
  nn::add_trunk_params(params_, "", config_.trunk, rng);
  nn::add_linear(params_, "output_proj", config_.trunk.dim_model, config_.embed_dim, rng);
  mean_ = RowVector::Zero(config_.feature_dim);
  std_ = RowVector::Ones(config_.feature_dim);
}

void SeqModel::set_normalization(RowVector mean, RowVector std) {
  if (mean.size() != config_.feature_dim || std.size() != config_.feature_dim) {
    throw ArgumentError("normalization buffers must have feature_dim entries");
  }
  if (!(std.array() > 0.0).all() || !mean.allFinite() || !std.allFinite()) {
    throw ArgumentError("normalization std must be positive and finite");
  }
  mean_ = std::move(mean);
  std_ = std::move(std);
}

void SeqModel::fit_normalization(const std::vector<Matrix>& frames) {
  RowVector sum = RowVector::Zero(config_.feature_dim), sq = sum;
  double n = 0.0;
  for (const auto& m : frames) {
    if (m.cols() != config_.feature_dim) throw ArgumentError("feature width differs from feature_dim");
    sum += m.colwise().sum();
    sq += m.array().square().matrix().colwise().sum();
    n += static_cast<double>(m.rows());
  }
  if (n == 0.0) throw DegenerateInputError("no frames to fit normalization on");
  RowVector mean = sum / n;
  RowVector var = (sq / n - mean.cwiseProduct(mean)).cwiseMax(0.0);
  set_normalization(mean, var.cwiseSqrt().cwiseMax(1e-3));
}

SeqModel SeqModel::with_role(Role role) const {
  SeqModel copy = *this;
  copy.role_ = role;
  return copy;
}

nn::Var SeqModel::encode(nn::Tape& tape, const Matrix& features) const {
  if (features.cols() != config_.feature_dim) {
    throw ArgumentError("expected " + std::to_string(config_.feature_dim) + " features per frame, got " +
                        std::to_string(features.cols()));
  }
  if (features.rows() == 0) throw ArgumentError("empty feature sequence");
  Matrix normalized = (features.rowwise() - mean_).array().rowwise() / std_.array();
  nn::Var x = tape.constant(std::move(normalized));
  {
    nn::Tape::Scope scope(tape, "input_proj");
    x = nn::linear(tape, params_, "input_proj", x);
  }
  return nn::trunk_forward(tape, params_, "", config_.trunk, x);
}

nn::Var SeqModel::forward(nn::Tape& tape, const Matrix& features) const {
  const nn::Var h = encode(tape, features);
  nn::Tape::Scope scope(tape, "output_proj");
  return nn::linear(tape, params_, "output_proj", h);
}

Matrix SeqModel::forward(const Matrix& features) const {
  nn::Tape tape(false);
  return forward(tape, features).value();
}

SemanticTokens tokenize(const SeqModel& tokenizer, const Matrix& features) {
  if (tokenizer.role() != Role::kDistilled) {
    throw UsageError("tokenize needs the distilled tokenizer, got role '" + std::string(role_name(tokenizer.role())) +
                     "'");
  }
  return fsq_quantize(tokenizer.forward(features), tokenizer.config().fsq);
}

SemanticTokens convert_tokens(const SeqModel& model, const Matrix& features) {
  return fsq_quantize(model.forward(features), model.config().fsq);
}

}  // namespace murmur::tokenizer
