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

#include <string>

#include "murmur/common/rng.hpp"
#include "murmur/nn/autograd.hpp"
#include "murmur/nn/params.hpp"

namespace murmur::nn {

struct TrunkConfig {
  int dim_model = 64;
  int dim_ff = 128;
  int heads = 4;
  int layers = 2;
  int fsmn_left = 3;
  int fsmn_right = 3;
  double rope_base = 10000.0;

  /// Throws ArgumentError on non-positive sizes, heads not dividing
  /// dim_model, or an odd head dimension.
  void validate() const;
};

/// Normal(0, std) matrix.
Matrix random_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols, double std);

/// Registers "<prefix>layers.<i>.*" and "<prefix>final_norm.*".
void add_trunk_params(ParamSet& params, const std::string& prefix, const TrunkConfig& cfg, Rng& rng);

/// Pre-norm blocks, each: x += Attn(LN x) with RoPE; x += FSMN memory of LN x;
/// x += FFN(LN x). Ends with the final layer norm.
Var trunk_forward(Tape& tape, const ParamSet& params, const std::string& prefix, const TrunkConfig& cfg, Var x);

/// Adds "<name>.weight" (in x out) and "<name>.bias" (1 x out).
void add_linear(ParamSet& params, const std::string& name, int in, int out, Rng& rng, double gain = 1.0);
Var linear(Tape& tape, const ParamSet& params, const std::string& name, Var x);

}  // namespace murmur::nn
