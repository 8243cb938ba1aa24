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

#include "murmur/common/matrix.hpp"
#include "murmur/nn/autograd.hpp"

namespace murmur::tokenizer {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite scalar quantization grid.
///
/// Dimension k is bounded by b = c_k + h_k tanh(z) with h_k = L_k/2 - delta
/// and c_k = 0 for odd L_k, -1/2 for even L_k, then rounded to one of L_k
/// integer levels. The dequantized value of a level r is its pre-image
/// atanh((r - c_k) / h_k), i.e. the input that bounds exactly onto r; hence
/// quantizing a dequantized frame returns the same codes.
struct FsqConfig {
  std::vector<int> levels{8, 5, 5, 5};
  double delta = 1e-3;

  int dims() const { return static_cast<int>(levels.size()); }
  std::int64_t codebook_size() const;
  /// Throws ArgumentError unless every level is >= 2 and delta in (0, 0.5).
  void validate() const;
};

struct SemanticTokens {
  IntMatrix codes;                    // frames x dims, 0 <= code_k < L_k
  std::vector<std::int64_t> indices;  // sum_k code_k * prod_{j<k} L_j
  Matrix dequantized;                 // frames x dims

  Eigen::Index frames() const { return codes.rows(); }
};

SemanticTokens fsq_quantize(const Matrix& embeddings, const FsqConfig& cfg);

std::vector<std::int64_t> codes_to_indices(const IntMatrix& codes, const FsqConfig& cfg);
IntMatrix indices_to_codes(const std::vector<std::int64_t>& indices, const FsqConfig& cfg);
Matrix dequantize_codes(const IntMatrix& codes, const FsqConfig& cfg);
/// Full token record from flat indices.
SemanticTokens tokens_from_indices(const std::vector<std::int64_t>& indices, const FsqConfig& cfg);

enum class FsqMode {
  kHard,     // rounding; used for training and inference
  kRelaxed,  // rounding replaced by identity; the straight-through surrogate
};

/// Dequantized output with the straight-through gradient. With rounding
/// treated as identity the composition bound^-1(round(bound(z))) has unit
/// derivative, so the incoming gradient passes through unchanged.
nn::Var fsq_ste(nn::Var embeddings, const FsqConfig& cfg, FsqMode mode = FsqMode::kHard);

}  // namespace murmur::tokenizer
