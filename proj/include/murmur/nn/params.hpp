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
#include <unordered_map>
#include <vector>

#include "murmur/common/matrix.hpp"

namespace murmur::nn {

/// Ordered, named collection of parameter matrices. Order is insertion order
/// and is what checkpoints and optimizers iterate over.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Matrix value;
  };

  /// Throws ArgumentError on a duplicate name.
  void add(std::string name, Matrix value);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Matrix& get(const std::string& name);
  const Matrix& get(const std::string& name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  Eigen::Index scalar_count() const;

  /// Same names and shapes, all zeros.
  ParamSet zeros_like() const;
  bool all_finite() const;
  /// Name of the first entry containing NaN/Inf, or empty.
  std::string first_non_finite() const;
  /// Throws ArgumentError unless `other` has the same names and shapes.
  void check_compatible(const ParamSet& other) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // global gradient-norm clip; 0 disables
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// One bias-corrected Adam update of `params` in place.
  void step(ParamSet& params, const ParamSet& grads);

  AdamConfig& config() { return config_; }
  long steps_taken() const { return t_; }

 private:
  AdamConfig config_;
  ParamSet m_, v_;
  long t_ = 0;
};

}  // namespace murmur::nn
