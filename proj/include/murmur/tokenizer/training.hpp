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

#include <functional>
#include <vector>

#include "murmur/nn/params.hpp"
#include "murmur/tokenizer/model.hpp"

namespace murmur::tokenizer {

/// Mean over frames of the squared Euclidean distance.
double distill_loss(const Matrix& student_out, const Matrix& teacher_out);

struct UnifiedLossConfig {
  double lambda_n = 1.0;  // weight of f_w2n(x_n) -> z_n
  double lambda_w = 1.0;  // weight of f_n2w(x_w) -> z_w

  /// Weight applying to a model of the given role; throws UsageError for
  /// the distilled role.
  double lambda_for(Role role) const;
};

/// |f(x_primary) - z|^2 + lambda |f(x_consistency) - z|^2, frame means.
/// Frame counts must agree (AlignmentRequiredError otherwise).
double unified_loss(const SeqModel& model, const Matrix& x_primary, const Matrix& x_consistency, const Matrix& z_target,
                    double lambda);

struct DistillExample {
  Matrix features;
  Matrix teacher;  // frames x embed_dim
};

struct UnifiedExample {
  Matrix primary;      // source-mode features
  Matrix consistency;  // target-mode features of the same utterance, frame aligned
  Matrix target;       // dequantized tokens of the target-mode member
};

/// Builds the scalar loss for one batch on a tape.
using Objective = std::function<nn::Var(nn::Tape&, const SeqModel&)>;

Objective distill_objective(std::vector<DistillExample> batch);
Objective unified_objective(std::vector<UnifiedExample> batch, double lambda);

struct GradResult {
  double loss = 0.0;
  nn::ParamSet grads;
};

/// Exact reverse-mode gradient of the objective w.r.t. every parameter.
GradResult grad(const SeqModel& model, const Objective& objective);

/// One Adam step; returns the loss before the update.
double train_step(SeqModel& model, nn::Adam& optimizer, const Objective& objective);

}  // namespace murmur::tokenizer
