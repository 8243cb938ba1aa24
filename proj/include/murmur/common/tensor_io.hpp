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
#include <vector>

#include "murmur/common/matrix.hpp"

namespace murmur {

/// Dense float32 tensor as stored on disk.
///
/// File layout: magic "WFT1", u32 LE rank, rank x u64 LE dims, then the
/// row-major payload as IEEE-754 float32 LE. Shared by spectrograms,
/// posteriorgrams, embeddings, frame mappings and checkpoint parameters.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;

  std::uint64_t element_count() const;
};

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

// Rank-2 convenience wrappers (frames x features).
Tensor to_tensor(const Matrix& m);
Matrix to_matrix(const Tensor& t);
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace murmur
