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


#include "murmur/flow/model.hpp"

#include <string>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/nn/functional.hpp"

namespace murmur::flow {

std::string_view direction_name(Direction d) { return d == Direction::kW2n ? "w2n" : "n2w"; }

Direction parse_direction(std::string_view name) {
  if (name == "w2n") return Direction::kW2n;
  if (name == "n2w") return Direction::kN2w;
  throw ArgumentError("unknown direction '" + std::string(name) + "' (expected w2n or n2w)");
}

void FlowConfig::validate() const {
  if (mel_bins <= 0) throw ArgumentError("mel_bins must be positive");
  if (codebook_size <= 0) throw ArgumentError("codebook_size must be positive");
  if (time_dim <= 0 || time_dim % 2 != 0) throw ArgumentError("time_dim must be positive and even");
  trunk.validate();
}

FlowModel::FlowModel(FlowConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {
  config_.validate();
  Rng rng("flow.init", seed);
  const int d = config_.trunk.dim_model;
  params_.add("token_embed", nn::random_normal(rng, config_.codebook_size, d, 1.0));
  params_.add("direction_embed", nn::random_normal(rng, 2, d, 1.0));
  nn::add_linear(params_, "time_proj", config_.time_dim, d, rng);
  nn::add_linear(params_, "yt_proj", config_.mel_bins, d, rng);
  nn::add_linear(params_, "cond_proj", config_.mel_bins, d, rng);
  nn::add_trunk_params(params_, "", config_.trunk, rng);
  nn::add_linear(params_, "output_head", d, config_.mel_bins, rng);
  mean_ = RowVector::Zero(config_.mel_bins);
  std_ = RowVector::Ones(config_.mel_bins);
}

void FlowModel::set_normalization(RowVector mean, RowVector std) {
  if (mean.size() != config_.mel_bins || std.size() != config_.mel_bins) {
    throw ArgumentError("normalization buffers must have mel_bins entries");
  }
  if (!(std.array() > 0.0).all() || !mean.allFinite() || !std.allFinite()) {
    throw ArgumentError("normalization std must be positive and finite");
  }
  mean_ = std::move(mean);
  std_ = std::move(std);
}

void FlowModel::fit_normalization(const std::vector<Matrix>& mels) {
  RowVector sum = RowVector::Zero(config_.mel_bins), sq = sum;
  double n = 0.0;
  for (const auto& m : mels) {
    if (m.cols() != config_.mel_bins) throw ArgumentError("mel width differs from mel_bins");
    sum += m.colwise().sum();
    sq += m.array().square().matrix().colwise().sum();
    n += static_cast<double>(m.rows());
  }
  if (n == 0.0) throw DegenerateInputError("no frames to fit normalization on");
  RowVector mean = sum / n;
  RowVector var = (sq / n - mean.cwiseProduct(mean)).cwiseMax(0.0);
  set_normalization(mean, var.cwiseSqrt().cwiseMax(1e-3));
}

Matrix FlowModel::normalize(const Matrix& mel) const {
  if (mel.cols() != config_.mel_bins) throw ArgumentError("mel width differs from mel_bins");
  return (mel.rowwise() - mean_).array().rowwise() / std_.array();
}

Matrix FlowModel::denormalize(const Matrix& mel) const {
  if (mel.cols() != config_.mel_bins) throw ArgumentError("mel width differs from mel_bins");
  return (mel.array().rowwise() * std_.array()).matrix().rowwise() + mean_;
}

nn::Var velocity_forward(nn::Tape& tape, const FlowModel& model, const Matrix& y_t, double t,
                         const std::vector<std::int64_t>& tokens, Direction direction, const Matrix& condition) {
  const auto& cfg = model.config();
  const Eigen::Index n = y_t.rows();
  if (n == 0) throw ArgumentError("velocity_forward: no frames");
  if (y_t.cols() != cfg.mel_bins || condition.cols() != cfg.mel_bins) throw ArgumentError("velocity_forward: mel width mismatch");
  if (condition.rows() != n || static_cast<Eigen::Index>(tokens.size()) != n) {
    throw ArgumentError("velocity_forward: y_t has " + std::to_string(n) + " frames, condition " +
                        std::to_string(condition.rows()) + ", tokens " + std::to_string(tokens.size()));
  }
  std::vector<Eigen::Index> token_rows(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k] < 0 || tokens[k] >= cfg.codebook_size) {
      throw ArgumentError("token " + std::to_string(tokens[k]) + " outside the codebook");
    }
    token_rows[k] = static_cast<Eigen::Index>(tokens[k]);
  }
  const std::vector<Eigen::Index> direction_rows(static_cast<std::size_t>(n), static_cast<Eigen::Index>(direction));

  nn::Var h;
  {
    nn::Tape::Scope scope(tape, "flow.input");
    h = nn::gather_rows(tape.param(model.params(), "token_embed"), token_rows);
    h = nn::add(h, nn::gather_rows(tape.param(model.params(), "direction_embed"), direction_rows));
    // Time enters as a 1 x d row broadcast over frames; the 1000 scale
    // spreads t in [0, 1] over the sinusoid frequencies.
    const nn::Var time = nn::linear(tape, model.params(), "time_proj",
                                    tape.constant(nn::sinusoidal_embedding(1000.0 * t, cfg.time_dim)));
    h = nn::add_rowvec(h, time);
    h = nn::add(h, nn::linear(tape, model.params(), "yt_proj", tape.constant(y_t)));
    h = nn::add(h, nn::linear(tape, model.params(), "cond_proj", tape.constant(condition)));
  }
  h = nn::trunk_forward(tape, model.params(), "", cfg.trunk, h);
  nn::Tape::Scope scope(tape, "output_head");
  return nn::linear(tape, model.params(), "output_head", h);
}

Matrix velocity_forward(const FlowModel& model, const Matrix& y_t, double t, const std::vector<std::int64_t>& tokens,
                        Direction direction, const Matrix& condition) {
  nn::Tape tape(false);
  return velocity_forward(tape, model, y_t, t, tokens, direction, condition).value();
}

}  // namespace murmur::flow
