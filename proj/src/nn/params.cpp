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


#include "murmur/nn/params.hpp"

#include <cmath>

#include "murmur/common/errors.hpp"

namespace murmur::nn {

void ParamSet::add(std::string name, Matrix value) {
  if (contains(name)) throw ArgumentError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(value)});
}

Matrix& ParamSet::get(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

const Matrix& ParamSet::get(const std::string& name) const { return const_cast<ParamSet*>(this)->get(name); }

Eigen::Index ParamSet::scalar_count() const {
  Eigen::Index n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& e : entries_) out.add(e.name, Matrix::Zero(e.value.rows(), e.value.cols()));
  return out;
}

bool ParamSet::all_finite() const { return first_non_finite().empty(); }

std::string ParamSet::first_non_finite() const {
  for (const auto& e : entries_) {
    if (!e.value.allFinite()) return e.name;
  }
  return {};
}

void ParamSet::check_compatible(const ParamSet& other) const {
  if (other.size() != size()) throw ArgumentError("parameter sets differ in size");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& a = entries_[k];
    const auto& b = other.entries_[k];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      throw ArgumentError("parameter '" + a.name + "' does not match '" + b.name + "'");
    }
  }
}

void Adam::step(ParamSet& params, const ParamSet& grads) {
  params.check_compatible(grads);
  if (const auto bad = grads.first_non_finite(); !bad.empty()) throw NumericError("non-finite gradient for '" + bad + "'");
  if (m_.size() == 0) {
    m_ = params.zeros_like();
    v_ = params.zeros_like();
  }
  ++t_;

  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& g : grads.entries()) sq += g.value.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }

  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params.entries()[k].value;
    const Matrix g = scale * grads.entries()[k].value;
    auto& m = m_.entries()[k].value;
    auto& v = v_.entries()[k].value;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.array() -= config_.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
  }
  if (const auto bad = params.first_non_finite(); !bad.empty()) throw NumericError("parameter '" + bad + "' became non-finite");
}

}  // namespace murmur::nn
