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


#include "murmur/tokenizer/teacher.hpp"

#include <cmath>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/nn/transformer.hpp"

namespace murmur::tokenizer {

SyntheticTeacher::SyntheticTeacher(int feature_dim, int embed_dim, std::uint64_t seed, int hidden) {
  if (feature_dim <= 0 || embed_dim <= 0 || hidden <= 0) throw ArgumentError("teacher sizes must be positive");
  Rng rng("teacher", seed);
  w1_ = nn::random_normal(rng, feature_dim, hidden, 1.0 / std::sqrt(static_cast<double>(feature_dim)));
  b1_ = nn::random_normal(rng, 1, hidden, 0.5).row(0);
  // Unit-ish output scale: tanh activations have variance below one.
  w2_ = nn::random_normal(rng, hidden, embed_dim, 1.5 / std::sqrt(static_cast<double>(hidden)));
}

Matrix SyntheticTeacher::embed(const std::string&, const Matrix& features) const { return embed(features); }

Matrix SyntheticTeacher::embed(const Matrix& features) const {
  if (features.cols() != w1_.rows()) throw ArgumentError("teacher feature width mismatch");
  Matrix x(features.rows(), features.cols());
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    const double mean = features.row(t).mean();
    const double sd = std::sqrt((features.row(t).array() - mean).square().mean());
    x.row(t) = (features.row(t).array() - mean) / std::max(sd, 1e-6);
  }
  Matrix h = x * w1_;
  h.rowwise() += b1_;
  return h.array().tanh().matrix() * w2_;
}

FileTeacher::FileTeacher(std::filesystem::path dir, int embed_dim) : dir_(std::move(dir)), embed_dim_(embed_dim) {
  if (!std::filesystem::is_directory(dir_)) throw DependencyError("teacher embedding directory " + dir_.string() + " not found");
}

Matrix FileTeacher::embed(const std::string& utterance_id, const Matrix& features) const {
  const auto path = dir_ / (utterance_id + ".wft");
  if (!std::filesystem::exists(path)) throw DependencyError("no teacher embeddings for '" + utterance_id + "'");
  Matrix m = read_matrix(path);
  if (m.cols() != embed_dim_) throw FormatError(path.string() + ": embedding width differs from the student's");
  if (m.rows() != features.rows()) throw FormatError(path.string() + ": frame count differs from the features");
  return m;
}

}  // namespace murmur::tokenizer
