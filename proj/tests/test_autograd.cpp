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


#include <cmath>
#include <functional>

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/nn/autograd.hpp"
#include "murmur/nn/functional.hpp"
#include "murmur/nn/transformer.hpp"
#include "support/finite_difference.hpp"

using namespace murmur;
using namespace murmur::nn;

namespace {

Matrix randn(Rng& rng, Eigen::Index r, Eigen::Index c, double s = 1.0) { return random_normal(rng, r, c, s); }

using Builder = std::function<Var(Tape&, const ParamSet&)>;

// Reduces the op output to a scalar against a fixed random target, then
// compares tape gradients with central differences.
double check_op(ParamSet inputs, const Builder& build, std::uint64_t seed = 1) {
  Rng rng(seed);
  Matrix target;
  {
    Tape probe(false);
    const Var out = build(probe, inputs);
    target = randn(rng, out.rows(), out.cols());
  }
  const auto loss_of = [&](Tape& tape) { return mean_sq_dist(build(tape, inputs), tape.constant(target)); };
  Tape tape;
  const Var loss = loss_of(tape);
  tape.backward(loss);
  const ParamSet analytic = tape.gradients(inputs);
  const ParamSet numeric = testing::numeric_gradient(inputs, [&] {
    Tape t(false);
    return loss_of(t).value()(0, 0);
  });
  const auto mismatch = testing::compare_gradients(analytic, numeric);
  INFO(mismatch.where);
  return mismatch.worst;
}

}  // namespace

TEST_CASE("elementary ops match finite differences") {
  Rng rng(10);
  ParamSet p;
  p.add("a", randn(rng, 3, 4));
  p.add("b", randn(rng, 4, 5));
  p.add("c", randn(rng, 3, 4));
  p.add("r", randn(rng, 1, 4));

  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return matmul(t.param(s, "a"), t.param(s, "b")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return matmul_nt(t.param(s, "a"), t.param(s, "c")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return add(t.param(s, "a"), t.param(s, "c")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return sub(t.param(s, "a"), t.param(s, "c")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return mul(t.param(s, "a"), t.param(s, "c")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return scale(t.param(s, "a"), -2.5); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return add_rowvec(t.param(s, "a"), t.param(s, "r")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return gelu(t.param(s, "a")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return tanh(t.param(s, "a")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return softmax_rows(t.param(s, "a")); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return slice_cols(t.param(s, "b"), 1, 3); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) {
          return concat_cols({t.param(s, "a"), t.constant(Matrix::Ones(3, 2)), t.param(s, "c")});
        }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return gather_rows(t.param(s, "b"), {3, 0, 3, 1}); }) <= 1e-4);
  // The same variable used twice accumulates both contributions.
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) {
          const Var a = t.param(s, "a");
          return mul(a, a);
        }) <= 1e-4);
}

TEST_CASE("layer_norm, rope, fsmn and masked L1 match finite differences") {
  Rng rng(11);
  ParamSet p;
  p.add("x", randn(rng, 4, 8));
  p.add("gamma", randn(rng, 1, 8));
  p.add("beta", randn(rng, 1, 8));
  p.add("coeffs", randn(rng, 5, 8, 0.5));

  CHECK(check_op(p, [](Tape& t, const ParamSet& s) {
          return layer_norm(t.param(s, "x"), t.param(s, "gamma"), t.param(s, "beta"));
        }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return rope(t.param(s, "x"), 2, 10000.0, 3); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) { return fsmn(t.param(s, "x"), t.param(s, "coeffs"), 2, 2); }) <= 1e-4);
  CHECK(check_op(p, [](Tape& t, const ParamSet& s) {
          const Var x = t.param(s, "x");
          return masked_l1(x, t.constant(Matrix::Zero(4, 8)), {1, 0, 1, 0});
        }) <= 1e-4);
}

TEST_CASE("transformer trunk gradients match finite differences") {
  Rng rng(12);
  TrunkConfig cfg;
  cfg.dim_model = 8;
  cfg.dim_ff = 12;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.fsmn_left = 1;
  cfg.fsmn_right = 2;
  ParamSet p;
  add_trunk_params(p, "", cfg, rng);
  // Perturb the norms away from their identity initialization.
  for (auto& e : p.entries()) e.value += randn(rng, e.value.rows(), e.value.cols(), 0.1);
  const Matrix x = randn(rng, 4, 8);
  CHECK(check_op(p, [&](Tape& t, const ParamSet& s) { return trunk_forward(t, s, "", cfg, t.constant(x)); }) <= 1e-4);
}

TEST_CASE("tape bookkeeping") {
  Tape tape;
  const Var a = tape.leaf(Matrix::Constant(2, 2, 1.0), "a");
  const Var c = tape.constant(Matrix::Constant(2, 2, 3.0));
  const Var loss = mean_sq_dist(a, c);
  tape.backward(loss);
  CHECK(tape.grad(c).size() == 0);
  CHECK(tape.grad(a).isApprox(Matrix::Constant(2, 2, -2.0)));

  CHECK_THROWS_AS(tape.backward(a), ArgumentError);
  CHECK_THROWS_AS(matmul(a, tape.constant(Matrix::Zero(3, 1))), ArgumentError);

  Tape other;
  CHECK_THROWS_AS(add(a, other.constant(Matrix::Zero(2, 2))), ArgumentError);

  Tape named;
  const Var big = named.leaf(Matrix::Constant(1, 1, 1e308), "big");
  {
    Tape::Scope scope(named, "layers.3.ffn");
    try {
      (void)scale(big, 1e10);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("layers.3.ffn") != std::string::npos);
    }
  }

  Tape inference(false);
  const Var leaf = inference.leaf(Matrix::Ones(1, 1), "w");
  CHECK_FALSE(inference.requires_grad(leaf));
}

TEST_CASE("rope_rotate") {
  Rng rng(13);
  const Matrix v = randn(rng, 5, 8);
  CHECK(rope_rotate(v, {0, 0, 0, 0, 0}).isApprox(v));
  CHECK_THROWS_AS(rope_rotate(randn(rng, 2, 3), {0, 1}), ArgumentError);

  const Matrix r = rope_rotate(v, {0, 1, 2, 3, 4});
  for (Eigen::Index t = 0; t < 5; ++t) {
    for (Eigen::Index i = 0; i < 4; ++i) {
      CHECK(std::hypot(r(t, 2 * i), r(t, 2 * i + 1)) == doctest::Approx(std::hypot(v(t, 2 * i), v(t, 2 * i + 1))).epsilon(1e-9));
    }
  }

  // Relative-position property: dot(R_m q, R_n k) depends only on m - n.
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix q = randn(rng, 1, 8), k = randn(rng, 1, 8);
    const double m = static_cast<double>(rng.below(50)), n = static_cast<double>(rng.below(50));
    const double s = static_cast<double>(rng.below(100));
    const double d1 = rope_rotate(q, {m}).row(0).dot(rope_rotate(k, {n}).row(0));
    const double d2 = rope_rotate(q, {m + s}).row(0).dot(rope_rotate(k, {n + s}).row(0));
    CHECK(std::abs(d1 - d2) <= 1e-5);
  }
}

TEST_CASE("fsmn_apply") {
  Rng rng(14);
  const Matrix h = randn(rng, 6, 3);
  CHECK(fsmn_apply(h, Matrix::Zero(3, 3), 1, 1) == h);

  const Matrix one = randn(rng, 1, 3);
  Matrix center = Matrix::Zero(3, 3);
  center.row(1).setConstant(0.7);
  CHECK(fsmn_apply(one, center, 1, 1).isApprox(one * 1.7));

  const Matrix a = randn(rng, 4, 3);  // l = 1, r = 2
  const Matrix out = fsmn_apply(h, a, 1, 2);
  for (int t = 0; t < 6; ++t) {
    for (int c = 0; c < 3; ++c) {
      double expect = h(t, c);
      for (int i = -1; i <= 2; ++i) {
        if (t + i >= 0 && t + i < 6) expect += a(i + 1, c) * h(t + i, c);
      }
      CHECK(out(t, c) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(fsmn_apply(h, a, 1, 1), ArgumentError);
}

TEST_CASE("Adam") {
  ParamSet p;
  p.add("theta", Matrix::Constant(1, 1, 5.0));
  Adam zero(AdamConfig{0.0});
  ParamSet g = p.zeros_like();
  g.get("theta")(0, 0) = 3.0;
  zero.step(p, g);
  CHECK(p.get("theta")(0, 0) == 5.0);

  // Quadratic (theta - 2)^2.
  Adam adam(AdamConfig{0.05});
  for (int step = 0; step < 200; ++step) {
    g.get("theta")(0, 0) = 2.0 * (p.get("theta")(0, 0) - 2.0);
    adam.step(p, g);
  }
  CHECK(std::abs(p.get("theta")(0, 0) - 2.0) <= 1e-2);

  g.get("theta")(0, 0) = std::nan("");
  CHECK_THROWS_AS(adam.step(p, g), NumericError);
  CHECK_THROWS_AS(p.add("theta", Matrix::Zero(1, 1)), ArgumentError);
}
