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


#include "murmur/nn/functional.hpp"

#include <cmath>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::nn {

Matrix rope_rotate(const Matrix& vectors, const std::vector<double>& positions, double base) {
  return rope_rotate_heads(vectors, 1, positions, base);
}

Matrix rope_rotate_heads(const Matrix& x, int heads, const std::vector<double>& positions, double base, double sign) {
  if (heads <= 0 || x.cols() % heads != 0) throw ArgumentError("column count must split evenly into heads");
  const Eigen::Index dim = x.cols() / heads;
  if (dim % 2 != 0) throw ArgumentError("rotary embedding needs an even head dimension, got " + std::to_string(dim));
  if (static_cast<Eigen::Index>(positions.size()) != x.rows()) throw ArgumentError("one position per row required");

  Matrix out(x.rows(), x.cols());
  std::vector<double> freq(static_cast<std::size_t>(dim / 2));
  for (Eigen::Index i = 0; i < dim / 2; ++i) freq[i] = std::pow(base, -2.0 * static_cast<double>(i) / static_cast<double>(dim));
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    for (Eigen::Index i = 0; i < dim / 2; ++i) {
      const double angle = sign * positions[t] * freq[i];
      const double c = std::cos(angle), s = std::sin(angle);
      for (int h = 0; h < heads; ++h) {
        const Eigen::Index k = h * dim + 2 * i;
        const double a = x(t, k), b = x(t, k + 1);
        out(t, k) = a * c - b * s;
        out(t, k + 1) = a * s + b * c;
      }
    }
  }
  return out;
}

Matrix fsmn_apply(const Matrix& hidden, const Matrix& coeffs, int left, int right) {
  if (left < 0 || right < 0 || coeffs.rows() != left + right + 1 || coeffs.cols() != hidden.cols()) {
    throw ArgumentError("FSMN coefficients must be (left + right + 1) x dim");
  }
  Matrix out = hidden;
  const Eigen::Index n = hidden.rows();
  for (int i = -left; i <= right; ++i) {
    const auto tap = coeffs.row(i + left);
    for (Eigen::Index t = std::max<Eigen::Index>(0, -i); t < std::min<Eigen::Index>(n, n - i); ++t) {
      out.row(t) += tap.cwiseProduct(hidden.row(t + i));
    }
  }
  return out;
}

RowVector sinusoidal_embedding(double value, int dim) {
  if (dim <= 0 || dim % 2 != 0) throw ArgumentError("sinusoidal embedding dimension must be even");
  RowVector e(dim);
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double w = std::pow(10000.0, -static_cast<double>(k) / half);
    e(k) = std::sin(value * w);
    e(half + k) = std::cos(value * w);
  }
  return e;
}

}  // namespace murmur::nn
