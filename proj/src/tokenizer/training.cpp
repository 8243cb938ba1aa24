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


#include "murmur/tokenizer/training.hpp"

#include <cmath>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::tokenizer {

double distill_loss(const Matrix& student_out, const Matrix& teacher_out) {
  if (student_out.rows() != teacher_out.rows() || student_out.cols() != teacher_out.cols()) {
    throw ArgumentError("distill_loss: student and teacher shapes differ");
  }
  if (student_out.rows() == 0) throw ArgumentError("distill_loss: no frames");
  return (student_out - teacher_out).squaredNorm() / static_cast<double>(student_out.rows());
}

double UnifiedLossConfig::lambda_for(Role role) const {
  if (lambda_n < 0.0 || lambda_w < 0.0) throw ArgumentError("consistency weights must be non-negative");
  switch (role) {
    case Role::kW2n: return lambda_n;
    case Role::kN2w: return lambda_w;
    default: throw UsageError("the distilled tokenizer has no consistency weight");
  }
}

namespace {

void check_aligned(const Matrix& x_primary, const Matrix& x_consistency, const Matrix& z_target) {
  if (x_primary.rows() != z_target.rows() || x_consistency.rows() != z_target.rows()) {
    throw AlignmentRequiredError("unified loss inputs have " + std::to_string(x_primary.rows()) + "/" +
                                 std::to_string(x_consistency.rows()) + " frames but the target has " +
                                 std::to_string(z_target.rows()) + "; align the pair first");
  }
}

nn::Var unified_term(nn::Tape& tape, const SeqModel& model, const UnifiedExample& ex, double lambda) {
  check_aligned(ex.primary, ex.consistency, ex.target);
  const nn::Var z = tape.constant(ex.target);
  nn::Var loss = nn::mean_sq_dist(model.forward(tape, ex.primary), z);
  if (lambda != 0.0) loss = nn::add(loss, nn::scale(nn::mean_sq_dist(model.forward(tape, ex.consistency), z), lambda));
  return loss;
}

nn::Var batch_mean(const std::vector<nn::Var>& terms) {
  if (terms.empty()) throw ArgumentError("empty batch");
  nn::Var total = terms.front();
  for (std::size_t k = 1; k < terms.size(); ++k) total = nn::add(total, terms[k]);
  return nn::scale(total, 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

double unified_loss(const SeqModel& model, const Matrix& x_primary, const Matrix& x_consistency, const Matrix& z_target,
                    double lambda) {
  if (lambda < 0.0) throw ArgumentError("consistency weight must be non-negative");
  check_aligned(x_primary, x_consistency, z_target);
  double loss = distill_loss(model.forward(x_primary), z_target);
  if (lambda != 0.0) loss += lambda * distill_loss(model.forward(x_consistency), z_target);
  return loss;
}

Objective distill_objective(std::vector<DistillExample> batch) {
  return [batch = std::move(batch)](nn::Tape& tape, const SeqModel& model) {
    std::vector<nn::Var> terms;
    for (const auto& ex : batch) terms.push_back(nn::mean_sq_dist(model.forward(tape, ex.features), tape.constant(ex.teacher)));
    return batch_mean(terms);
  };
}

Objective unified_objective(std::vector<UnifiedExample> batch, double lambda) {
  if (lambda < 0.0) throw ArgumentError("consistency weight must be non-negative");
  return [batch = std::move(batch), lambda](nn::Tape& tape, const SeqModel& model) {
    std::vector<nn::Var> terms;
    for (const auto& ex : batch) terms.push_back(unified_term(tape, model, ex, lambda));
    return batch_mean(terms);
  };
}

GradResult grad(const SeqModel& model, const Objective& objective) {
  nn::Tape tape;
  const nn::Var loss = objective(tape, model);
  tape.backward(loss);
  return {loss.value()(0, 0), tape.gradients(model.params())};
}

double train_step(SeqModel& model, nn::Adam& optimizer, const Objective& objective) {
  GradResult g = grad(model, objective);
  if (!std::isfinite(g.loss)) throw NumericError("non-finite training loss");
  optimizer.step(model.params(), g.grads);
  return g.loss;
}

}  // namespace murmur::tokenizer
