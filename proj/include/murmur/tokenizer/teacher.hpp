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
#include <filesystem>
#include <string>

#include "murmur/common/matrix.hpp"

namespace murmur::tokenizer {

/// Source of Stage-1 target embeddings.
class Teacher {
 public:
  virtual ~Teacher() = default;
  virtual int embed_dim() const = 0;
  /// Embeddings for one utterance, frames x embed_dim.
  virtual Matrix embed(const std::string& utterance_id, const Matrix& features) const = 0;
};

/// Fixed-seed two-layer network tanh(x W1 + b1) W2 over per-frame
/// standardized features. Ignores the utterance id.
class SyntheticTeacher final : public Teacher {
 public:
  SyntheticTeacher(int feature_dim, int embed_dim, std::uint64_t seed, int hidden = 32);

  int embed_dim() const override { return static_cast<int>(w2_.cols()); }
  Matrix embed(const std::string& utterance_id, const Matrix& features) const override;
  Matrix embed(const Matrix& features) const;

 private:
  Matrix w1_, w2_;
  RowVector b1_;
};

/// Reads `<dir>/<utterance_id>.wft` (frames x embed_dim).
class FileTeacher final : public Teacher {
 public:
  FileTeacher(std::filesystem::path dir, int embed_dim);

  int embed_dim() const override { return embed_dim_; }
  Matrix embed(const std::string& utterance_id, const Matrix& features) const override;

 private:
  std::filesystem::path dir_;
  int embed_dim_;
};

}  // namespace murmur::tokenizer
