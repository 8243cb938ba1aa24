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

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "murmur/nn/params.hpp"

namespace murmur::testing {

/// Central differences of a scalar function of every parameter entry.
inline nn::ParamSet numeric_gradient(nn::ParamSet& params, const std::function<double()>& loss, double h = 1e-4) {
  nn::ParamSet out = params.zeros_like();
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = params.entries()[k].value;
    auto& g = out.entries()[k].value;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + h;
      const double up = loss();
      value.data()[i] = saved - h;
      const double down = loss();
      value.data()[i] = saved;
      g.data()[i] = (up - down) / (2.0 * h);
    }
  }
  return out;
}

/// |a - b| / max(|a|, |b|, floor). The floor keeps entries whose true
/// gradient is numerically zero from dividing truncation noise by ~0.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct GradientMismatch {
  double worst = 0.0;
  std::string where;
};

inline GradientMismatch compare_gradients(const nn::ParamSet& analytic, const nn::ParamSet& numeric, double floor = 1e-6) {
  GradientMismatch m;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const auto& a = analytic.entries()[k].value;
    const auto& n = numeric.entries()[k].value;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double e = relative_error(a.data()[i], n.data()[i], floor);
      if (e > m.worst) {
        m.worst = e;
        m.where = analytic.entries()[k].name + "[" + std::to_string(i) + "] analytic " + std::to_string(a.data()[i]) +
                  " numeric " + std::to_string(n.data()[i]);
      }
    }
  }
  return m;
}

}  // namespace murmur::testing
