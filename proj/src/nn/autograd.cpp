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


#include "murmur/nn/autograd.hpp"

#include <cmath>
#include <numbers>

#include "murmur/common/errors.hpp"
#include "murmur/nn/functional.hpp"

namespace murmur::nn {

namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                        ")");
  }
}

void require_same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw ArgumentError("variables belong to different tapes");
}

std::vector<double> positions_from(Eigen::Index first, Eigen::Index count) {
  std::vector<double> p(static_cast<std::size_t>(count));
  for (Eigen::Index t = 0; t < count; ++t) p[t] = static_cast<double>(first + t);
  return p;
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

const Matrix& Var::value() const { return tape->value(*this); }

Var Tape::constant(Matrix value) { return push(std::move(value), {}, nullptr, "constant"); }

Var Tape::leaf(Matrix value, std::string name) {
  Var v = push(std::move(value), {}, nullptr, "leaf");
  auto& node = nodes_.back();
  node.requires_grad = record_;
  node.name = std::move(name);
  return v;
}

Var Tape::push(Matrix value, const std::vector<Var>& inputs, Backward backward, const char* op) {
  if (!value.allFinite()) {
    throw NumericError("non-finite values produced by " + std::string(op) + (scope_.empty() ? "" : " in " + scope_));
  }
  Node node;
  node.value = std::move(value);
  node.scope = scope_;
  for (Var in : inputs) {
    if (in.tape != this) throw ArgumentError("variables belong to different tapes");
    node.requires_grad = node.requires_grad || nodes_[static_cast<std::size_t>(in.id)].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

void Tape::accumulate(Var v, const Matrix& g) {
  auto& node = nodes_[static_cast<std::size_t>(v.id)];
  if (!node.requires_grad) return;
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw ArgumentError("loss belongs to a different tape");
  if (loss.rows() != 1 || loss.cols() != 1) throw ArgumentError("backward needs a 1x1 loss");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[static_cast<std::size_t>(loss.id)].grad = Matrix::Ones(1, 1);
  for (int id = loss.id; id >= 0; --id) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.backward || node.grad.size() == 0) continue;
    if (!node.grad.allFinite()) {
      throw NumericError("non-finite gradient" + (node.scope.empty() ? std::string() : " in " + node.scope));
    }
    // Closures only accumulate into earlier nodes, so node.grad stays put.
    node.backward(*this, node.grad);
  }
}

ParamSet Tape::gradients(const ParamSet& like) const {
  ParamSet out = like.zeros_like();
  for (const auto& n : nodes_) {
    if (n.name.empty() || n.grad.size() == 0 || !out.contains(n.name)) continue;
    if (!n.grad.allFinite()) throw NumericError("non-finite gradient for parameter '" + n.name + "'");
    out.get(n.name) += n.grad;
  }
  return out;
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows()) throw ArgumentError("matmul: inner dimensions differ");
  return a.tape->push(a.value() * b.value(), {a, b},
                      [a, b](Tape& t, const Matrix& g) {
                        if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
                        if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
                      },
                      "matmul");
}

Var matmul_nt(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.cols()) throw ArgumentError("matmul_nt: column counts differ");
  return a.tape->push(a.value() * b.value().transpose(), {a, b},
                      [a, b](Tape& t, const Matrix& g) {
                        if (t.requires_grad(a)) t.accumulate(a, g * b.value());
                        if (t.requires_grad(b)) t.accumulate(b, g.transpose() * a.value());
                      },
                      "matmul_nt");
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "add");
  return a.tape->push(a.value() + b.value(), {a, b},
                      [a, b](Tape& t, const Matrix& g) {
                        t.accumulate(a, g);
                        t.accumulate(b, g);
                      },
                      "add");
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "sub");
  return a.tape->push(a.value() - b.value(), {a, b},
                      [a, b](Tape& t, const Matrix& g) {
                        t.accumulate(a, g);
                        if (t.requires_grad(b)) t.accumulate(b, -g);
                      },
                      "sub");
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "mul");
  return a.tape->push(a.value().cwiseProduct(b.value()), {a, b},
                      [a, b](Tape& t, const Matrix& g) {
                        if (t.requires_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
                        if (t.requires_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
                      },
                      "mul");
}

Var scale(Var a, double s) {
  return a.tape->push(s * a.value(), {a}, [a, s](Tape& t, const Matrix& g) { t.accumulate(a, s * g); }, "scale");
}

Var add_rowvec(Var a, Var row) {
  require_same_tape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) throw ArgumentError("add_rowvec: row must be 1 x cols");
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return a.tape->push(std::move(out), {a, row},
                      [a, row](Tape& t, const Matrix& g) {
                        t.accumulate(a, g);
                        if (t.requires_grad(row)) t.accumulate(row, g.colwise().sum());
                      },
                      "add_rowvec");
}

Var gelu(Var a) {
  const Matrix& x = a.value();
  const Matrix th = (kGeluC * (x.array() + kGeluA * x.array().cube())).tanh().matrix();
  Matrix out = (0.5 * x.array() * (1.0 + th.array())).matrix();
  return a.tape->push(std::move(out), {a},
                      [a, th](Tape& t, const Matrix& g) {
                        const auto x = a.value().array();
                        const auto d = 0.5 * (1.0 + th.array()) +
                                       0.5 * x * (1.0 - th.array().square()) * kGeluC * (1.0 + 3.0 * kGeluA * x.square());
                        t.accumulate(a, (g.array() * d).matrix());
                      },
                      "gelu");
}

Var tanh(Var a) {
  Matrix out = a.value().array().tanh().matrix();
  const Var placeholder{a.tape, static_cast<int>(a.tape->size())};  // id of the node being created
  return a.tape->push(std::move(out), {a},
                      [a, placeholder](Tape& t, const Matrix& g) {
                        const auto y = t.value(placeholder).array();
                        t.accumulate(a, (g.array() * (1.0 - y.square())).matrix());
                      },
                      "tanh");
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  require_same_tape(x, gamma);
  require_same_tape(x, beta);
  const Eigen::Index d = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != d || beta.rows() != 1 || beta.cols() != d) {
    throw ArgumentError("layer_norm: gain and bias must be 1 x dim");
  }
  const Matrix& v = x.value();
  Matrix xhat(v.rows(), d);
  Vector inv_std(v.rows());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double mean = v.row(r).mean();
    const double var = (v.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = xhat.array().rowwise() * gamma.value().row(0).array();
  out.rowwise() += beta.value().row(0);
  return x.tape->push(std::move(out), {x, gamma, beta},
                      [x, gamma, beta, xhat, inv_std](Tape& t, const Matrix& g) {
                        if (t.requires_grad(gamma)) t.accumulate(gamma, g.cwiseProduct(xhat).colwise().sum());
                        if (t.requires_grad(beta)) t.accumulate(beta, g.colwise().sum());
                        if (!t.requires_grad(x)) return;
                        const Matrix dxhat = g.array().rowwise() * gamma.value().row(0).array();
                        Matrix dx(dxhat.rows(), dxhat.cols());
                        for (Eigen::Index r = 0; r < dx.rows(); ++r) {
                          const double m1 = dxhat.row(r).mean();
                          const double m2 = dxhat.row(r).dot(xhat.row(r)) / static_cast<double>(dx.cols());
                          dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
                        }
                        t.accumulate(x, dx);
                      },
                      "layer_norm");
}

Var softmax_rows(Var a) {
  const Matrix& v = a.value();
  Matrix out(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double peak = v.row(r).maxCoeff();
    out.row(r) = (v.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  const Var self{a.tape, static_cast<int>(a.tape->size())};
  return a.tape->push(std::move(out), {a},
                      [a, self](Tape& t, const Matrix& g) {
                        const Matrix& y = t.value(self);
                        const Vector dots = g.cwiseProduct(y).rowwise().sum();
                        t.accumulate(a, y.cwiseProduct(g - dots.replicate(1, g.cols())));
                      },
                      "softmax");
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw ArgumentError("slice_cols out of range");
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape->push(a.value().middleCols(start, count), {a},
                      [a, start, count, rows, cols](Tape& t, const Matrix& g) {
                        Matrix full = Matrix::Zero(rows, cols);
                        full.middleCols(start, count) = g;
                        t.accumulate(a, full);
                      },
                      "slice_cols");
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("concat_cols needs at least one input");
  Tape* tape = parts.front().tape;
  Eigen::Index cols = 0;
  for (Var p : parts) {
    require_same_tape(parts.front(), p);
    if (p.rows() != parts.front().rows()) throw ArgumentError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(parts.front().rows(), cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return tape->push(std::move(out), parts,
                    [parts](Tape& t, const Matrix& g) {
                      Eigen::Index offset = 0;
                      for (Var p : parts) {
                        if (t.requires_grad(p)) t.accumulate(p, g.middleCols(offset, p.cols()));
                        offset += p.cols();
                      }
                    },
                    "concat_cols");
}

Var gather_rows(Var table, const std::vector<Eigen::Index>& indices) {
  const Matrix& v = table.value();
  Matrix out(static_cast<Eigen::Index>(indices.size()), v.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= v.rows()) throw ArgumentError("gather_rows index out of range");
    out.row(static_cast<Eigen::Index>(k)) = v.row(indices[k]);
  }
  return table.tape->push(std::move(out), {table},
                          [table, indices](Tape& t, const Matrix& g) {
                            Matrix full = Matrix::Zero(table.rows(), table.cols());
                            for (std::size_t k = 0; k < indices.size(); ++k) full.row(indices[k]) += g.row(static_cast<Eigen::Index>(k));
                            t.accumulate(table, full);
                          },
                          "gather_rows");
}

Var rope(Var x, int heads, double base, Eigen::Index first_position) {
  auto positions = positions_from(first_position, x.rows());
  Matrix out = rope_rotate_heads(x.value(), heads, positions, base);
  return x.tape->push(std::move(out), {x},
                      [x, heads, base, positions](Tape& t, const Matrix& g) {
                        t.accumulate(x, rope_rotate_heads(g, heads, positions, base, -1.0));
                      },
                      "rope");
}

Var fsmn(Var x, Var coeffs, int left, int right) {
  require_same_tape(x, coeffs);
  Matrix out = fsmn_apply(x.value(), coeffs.value(), left, right);
  return x.tape->push(std::move(out), {x, coeffs},
                      [x, coeffs, left, right](Tape& t, const Matrix& g) {
                        const Matrix& h = x.value();
                        const Matrix& a = coeffs.value();
                        const Eigen::Index n = h.rows();
                        if (t.requires_grad(x)) {
                          Matrix dx = g;
                          for (int i = -left; i <= right; ++i) {
                            for (Eigen::Index s = std::max<Eigen::Index>(0, -i); s < std::min<Eigen::Index>(n, n - i); ++s) {
                              dx.row(s + i) += a.row(i + left).cwiseProduct(g.row(s));
                            }
                          }
                          t.accumulate(x, dx);
                        }
                        if (t.requires_grad(coeffs)) {
                          Matrix da = Matrix::Zero(a.rows(), a.cols());
                          for (int i = -left; i <= right; ++i) {
                            for (Eigen::Index s = std::max<Eigen::Index>(0, -i); s < std::min<Eigen::Index>(n, n - i); ++s) {
                              da.row(i + left) += g.row(s).cwiseProduct(h.row(s + i));
                            }
                          }
                          t.accumulate(coeffs, da);
                        }
                      },
                      "fsmn");
}

Var mean_sq_dist(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "mean_sq_dist");
  if (a.rows() == 0) throw ArgumentError("mean_sq_dist of zero rows");
  const double n = static_cast<double>(a.rows());
  Matrix out(1, 1);
  out(0, 0) = (a.value() - b.value()).squaredNorm() / n;
  return a.tape->push(std::move(out), {a, b},
                      [a, b, n](Tape& t, const Matrix& g) {
                        const Matrix d = (2.0 * g(0, 0) / n) * (a.value() - b.value());
                        if (t.requires_grad(a)) t.accumulate(a, d);
                        if (t.requires_grad(b)) t.accumulate(b, -d);
                      },
                      "mean_sq_dist");
}

Var masked_l1(Var pred, Var target, const std::vector<char>& mask) {
  require_same_tape(pred, target);
  require_same_shape(pred, target, "masked_l1");
  if (static_cast<Eigen::Index>(mask.size()) != pred.rows()) throw ArgumentError("masked_l1: one mask flag per row");
  Eigen::Index masked = 0;
  for (char m : mask) masked += m ? 1 : 0;
  if (masked == 0) throw DegenerateInputError("masked_l1: mask selects no frames");
  const double denom = static_cast<double>(masked * pred.cols());
  double sum = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if (mask[r]) sum += (pred.value().row(r) - target.value().row(r)).cwiseAbs().sum();
  }
  Matrix out(1, 1);
  out(0, 0) = sum / denom;
  return pred.tape->push(std::move(out), {pred, target},
                         [pred, target, mask, denom](Tape& t, const Matrix& g) {
                           Matrix d = Matrix::Zero(pred.rows(), pred.cols());
                           for (Eigen::Index r = 0; r < d.rows(); ++r) {
                             if (!mask[r]) continue;
                             d.row(r) = (pred.value().row(r) - target.value().row(r)).array().sign() * (g(0, 0) / denom);
                           }
                           if (t.requires_grad(pred)) t.accumulate(pred, d);
                           if (t.requires_grad(target)) t.accumulate(target, -d);
                         },
                         "masked_l1");
}

}  // namespace murmur::nn
