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

#include <functional>
#include <string>
#include <vector>

#include "murmur/common/matrix.hpp"
#include "murmur/nn/params.hpp"

namespace murmur::nn {

class Tape;

/// Handle to a node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

/// Reverse-mode autodiff over dense matrices. Every op appends a node whose
/// backward closure pushes the output gradient into its inputs; backward()
/// replays the closures in reverse order. Non-finite forward values or
/// gradients raise NumericError naming the current scope.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

  /// With record_gradients = false leaves are treated as constants and no
  /// backward closures are kept (inference).
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Trainable leaf; its gradient is reported under `name` by gradients().
  Var leaf(Matrix value, std::string name);
  Var param(const ParamSet& params, const std::string& name) { return leaf(params.get(name), name); }

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  /// Gradient accumulated by backward(); empty if the node received none.
  const Matrix& grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].grad; }
  bool requires_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].requires_grad; }

  /// Seeds d(loss)/d(loss) = 1 for a 1x1 loss and runs all closures.
  void backward(Var loss);
  /// Per-name gradient sums over leaves, shaped like `like` (zeros where unused).
  ParamSet gradients(const ParamSet& like) const;

  /// Labels nodes created while the guard is alive.
  class Scope {
   public:
    Scope(Tape& tape, std::string name) : tape_(tape), saved_(tape.scope_) { tape.scope_ = std::move(name); }
    ~Scope() { tape_.scope_ = saved_; }

   private:
    Tape& tape_;
    std::string saved_;
  };

  // Used by op implementations.
  Var push(Matrix value, const std::vector<Var>& inputs, Backward backward, const char* op);
  void accumulate(Var v, const Matrix& g);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    bool requires_grad = false;
    std::string name;   // leaves only
    std::string scope;  // for error messages
  };

  std::vector<Node> nodes_;
  std::string scope_;
  bool record_ = true;
};

Var matmul(Var a, Var b);
/// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Elementwise product.
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// a (n x d) + row (1 x d) broadcast over rows.
Var add_rowvec(Var a, Var row);
Var gelu(Var a);  // tanh approximation
Var tanh(Var a);
/// Row-wise normalization with learned gain and bias (1 x d each).
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
Var softmax_rows(Var a);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
Var concat_cols(const std::vector<Var>& parts);
/// Rows of `table` selected by `indices` (embedding lookup).
Var gather_rows(Var table, const std::vector<Eigen::Index>& indices);
/// Rotary embedding applied independently inside each of `heads` column
/// blocks; row t is rotated as position `first_position + t`.
Var rope(Var x, int heads, double base = 10000.0, Eigen::Index first_position = 0);
/// out_t = x_t + sum_{i=-left..right} coeffs_{i+left} (.) x_{t+i}, zero padded.
Var fsmn(Var x, Var coeffs, int left, int right);
/// Mean over rows of the squared Euclidean row distance.
Var mean_sq_dist(Var a, Var b);
/// Mean absolute error over cells of rows with mask[t] set.
Var masked_l1(Var pred, Var target, const std::vector<char>& mask);

}  // namespace murmur::nn
