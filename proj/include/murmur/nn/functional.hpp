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

#include <vector>

#include "murmur/common/matrix.hpp"

namespace murmur::nn {

/// Rotates each column pair (2i, 2i+1) of row t by positions[t] * base^(-2i/dim).
/// Throws ArgumentError for an odd column count or a position count mismatch.
Matrix rope_rotate(const Matrix& vectors, const std::vector<double>& positions, double base = 10000.0);

/// rope_rotate applied to each of `heads` equal column blocks; `sign` = -1
/// applies the inverse rotation.
Matrix rope_rotate_heads(const Matrix& x, int heads, const std::vector<double>& positions, double base,
                         double sign = 1.0);

/// out_t = hidden_t + sum_{i=-left..right} coeffs_{i+left} (.) hidden_{t+i}.
Matrix fsmn_apply(const Matrix& hidden, const Matrix& coeffs, int left, int right);

/// Sinusoidal features [sin(v w_k), cos(v w_k)] with w_k = 10000^(-k/(dim/2)).
RowVector sinusoidal_embedding(double value, int dim);

}  // namespace murmur::nn
