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


#include "murmur/flow/cfm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::flow {

namespace {

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("t = " + std::to_string(t) + " outside [0, 1]");
}

}  // namespace

Matrix ot_interpolate(const Matrix& y0, const Matrix& y1, double t) {
  check_t(t);
  if (y0.rows() != y1.rows() || y0.cols() != y1.cols()) throw ArgumentError("ot_interpolate: shape mismatch");
  return (1.0 - t) * y0 + t * y1;
}

Matrix make_masked_condition(const Matrix& y1, const std::vector<char>& mask, std::uint64_t noise_seed) {
  if (static_cast<Eigen::Index>(mask.size()) != y1.rows()) throw ArgumentError("mask length differs from frame count");
  Rng rng("flow.condition", noise_seed);
  Matrix c = y1;
  for (Eigen::Index t = 0; t < c.rows(); ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    for (Eigen::Index b = 0; b < c.cols(); ++b) c(t, b) = rng.normal();
  }
  return c;
}

void FlowBatch::validate() const {
  check_t(t);
  const Eigen::Index n = y1.rows();
  if (y0.rows() != n || condition.rows() != n || static_cast<Eigen::Index>(mask.size()) != n ||
      static_cast<Eigen::Index>(tokens.size()) != n) {
    throw ArgumentError("flow batch members disagree on the frame count");
  }
  if (y0.cols() != y1.cols() || condition.cols() != y1.cols()) throw ArgumentError("flow batch members disagree on mel width");
}

Matrix FlowBatch::y_t() const {
  Matrix y = ot_interpolate(y0, y1, t);
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    if (!mask[static_cast<std::size_t>(r)]) y.row(r) = y1.row(r);
  }
  return y;
}

std::vector<char> sample_span_mask(Rng& rng, Eigen::Index frames, const MaskPolicy& policy) {
  if (frames <= 0) throw ArgumentError("cannot mask an empty sequence");
  if (!(policy.min_fraction > 0.0 && policy.min_fraction <= policy.max_fraction && policy.max_fraction <= 1.0)) {
    throw ArgumentError("mask fractions must satisfy 0 < min <= max <= 1");
  }
  const double fraction = rng.uniform(policy.min_fraction, policy.max_fraction);
  const auto len = std::clamp<Eigen::Index>(std::lround(fraction * static_cast<double>(frames)), 1, frames);
  const auto start = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(frames - len + 1)));
  std::vector<char> mask(static_cast<std::size_t>(frames), 0);
  std::fill(mask.begin() + start, mask.begin() + start + len, 1);
  return mask;
}

FlowBatch make_flow_batch(const FlowExample& example, Rng& rng, const MaskPolicy& policy) {
  FlowBatch b;
  b.y1 = example.mel;
  b.tokens = example.tokens;
  b.direction = example.direction;
  b.t = rng.uniform();
  b.mask = sample_span_mask(rng, example.mel.rows(), policy);
  b.y0.resize(example.mel.rows(), example.mel.cols());
  for (Eigen::Index r = 0; r < b.y0.rows(); ++r) {
    for (Eigen::Index c = 0; c < b.y0.cols(); ++c) b.y0(r, c) = rng.normal();
  }
  b.condition = make_masked_condition(b.y1, b.mask, rng.next_u64());
  b.validate();
  return b;
}

nn::Var cfm_loss_given_velocity(nn::Var velocity, const FlowBatch& batch) {
  batch.validate();
  if (std::none_of(batch.mask.begin(), batch.mask.end(), [](char m) { return m != 0; })) {
    throw DegenerateInputError("flow batch has no masked frames");
  }
  if (velocity.rows() != batch.y1.rows() || velocity.cols() != batch.y1.cols()) {
    throw ArgumentError("velocity shape differs from the batch");
  }
  return nn::masked_l1(velocity, velocity.tape->constant(batch.y1 - batch.y0), batch.mask);
}

nn::Var cfm_loss(nn::Tape& tape, const FlowModel& model, const FlowBatch& batch) {
  batch.validate();
  if (std::none_of(batch.mask.begin(), batch.mask.end(), [](char m) { return m != 0; })) {
    throw DegenerateInputError("flow batch has no masked frames");
  }
  const nn::Var v = velocity_forward(tape, model, batch.y_t(), batch.t, batch.tokens, batch.direction, batch.condition);
  return cfm_loss_given_velocity(v, batch);
}

double cfm_loss(const FlowModel& model, const FlowBatch& batch) {
  nn::Tape tape(false);
  return cfm_loss(tape, model, batch).value()(0, 0);
}

namespace {

nn::Var batch_loss(nn::Tape& tape, const FlowModel& model, const std::vector<FlowBatch>& batches) {
  if (batches.empty()) throw ArgumentError("empty flow batch list");
  nn::Var total = cfm_loss(tape, model, batches.front());
  for (std::size_t k = 1; k < batches.size(); ++k) total = nn::add(total, cfm_loss(tape, model, batches[k]));
  return nn::scale(total, 1.0 / static_cast<double>(batches.size()));
}

}  // namespace

double cfm_loss(const FlowModel& model, const std::vector<FlowBatch>& batches) {
  nn::Tape tape(false);
  return batch_loss(tape, model, batches).value()(0, 0);
}

FlowGradResult flow_grad(const FlowModel& model, const std::vector<FlowBatch>& batches) {
  nn::Tape tape;
  const nn::Var loss = batch_loss(tape, model, batches);
  tape.backward(loss);
  return {loss.value()(0, 0), tape.gradients(model.params())};
}

double flow_train_step(FlowModel& model, nn::Adam& optimizer, const std::vector<FlowBatch>& batches) {
  FlowGradResult g = flow_grad(model, batches);
  if (!std::isfinite(g.loss)) throw NumericError("non-finite flow loss");
  optimizer.step(model.params(), g.grads);
  return g.loss;
}

}  // namespace murmur::flow
