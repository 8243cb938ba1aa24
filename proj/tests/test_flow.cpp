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

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/flow/cfm.hpp"
#include "murmur/flow/checkpoint.hpp"
#include "murmur/flow/sampler.hpp"
#include "murmur/synth/world.hpp"
#include "support/finite_difference.hpp"
#include "support/temp_dir.hpp"

using namespace murmur;
using namespace murmur::flow;

namespace {

Matrix randn(Rng& rng, Eigen::Index r, Eigen::Index c, double s = 1.0) { return nn::random_normal(rng, r, c, s); }

FlowConfig tiny_config() {
  FlowConfig c;
  c.mel_bins = 6;
  c.codebook_size = 10;
  c.time_dim = 4;
  c.trunk.dim_model = 8;
  c.trunk.dim_ff = 12;
  c.trunk.heads = 2;
  c.trunk.layers = 1;
  c.trunk.fsmn_left = 1;
  c.trunk.fsmn_right = 1;
  return c;
}

FlowBatch tiny_batch(Rng& rng, Eigen::Index frames, std::vector<char> mask, Direction d = Direction::kW2n) {
  FlowBatch b;
  b.y0 = randn(rng, frames, 6);
  b.y1 = randn(rng, frames, 6);
  b.t = rng.uniform();
  b.mask = std::move(mask);
  for (Eigen::Index k = 0; k < frames; ++k) b.tokens.push_back(static_cast<std::int64_t>(rng.below(10)));
  b.direction = d;
  b.condition = make_masked_condition(b.y1, b.mask, rng.next_u64());
  return b;
}

}  // namespace

TEST_CASE("ot_interpolate") {
  Rng rng(1);
  const Matrix y0 = randn(rng, 5, 3), y1 = randn(rng, 5, 3);
  CHECK(ot_interpolate(y0, y1, 0.0) == y0);
  CHECK(ot_interpolate(y0, y1, 1.0) == y1);
  CHECK(ot_interpolate(Matrix::Zero(5, 3), y1, 0.5).isApprox(0.5 * y1));
  for (int k = 0; k < 20; ++k) {
    const double t = rng.uniform();
    CHECK((ot_interpolate(y0, y1, t) + ot_interpolate(y0, y1, 1.0 - t) - (y0 + y1)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(ot_interpolate(y0, y1, 1.5), ArgumentError);
  CHECK_THROWS_AS(ot_interpolate(y0, y1, -0.1), ArgumentError);
  CHECK_THROWS_AS(ot_interpolate(y0, randn(rng, 4, 3), 0.5), ArgumentError);
}

TEST_CASE("make_masked_condition") {
  Rng rng(2);
  const Matrix y1 = randn(rng, 200, 80);
  CHECK(make_masked_condition(y1, std::vector<char>(200, 0), 5) == y1);

  const Matrix noise = make_masked_condition(y1, std::vector<char>(200, 1), 5);
  const double mean = noise.mean();
  const double var = (noise.array() - mean).square().mean();
  CHECK(std::abs(mean) <= 0.1);
  CHECK(std::abs(var - 1.0) <= 0.1);
  CHECK(make_masked_condition(y1, std::vector<char>(200, 1), 5) == noise);
  CHECK(make_masked_condition(y1, std::vector<char>(200, 1), 6) != noise);

  std::vector<char> half(200, 0);
  std::fill(half.begin() + 50, half.begin() + 120, 1);
  const Matrix mixed = make_masked_condition(y1, half, 5);
  CHECK(mixed.topRows(50) == y1.topRows(50));
  CHECK(mixed.bottomRows(80) == y1.bottomRows(80));
  CHECK_THROWS_AS(make_masked_condition(y1, std::vector<char>(3, 0), 1), ArgumentError);
}

TEST_CASE("span masks cover the requested fraction contiguously") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto frames = 1 + static_cast<Eigen::Index>(rng.below(120));
    const auto mask = sample_span_mask(rng, frames);
    int count = 0, runs = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
      count += mask[k];
      if (mask[k] && (k == 0 || !mask[k - 1])) ++runs;
    }
    CHECK(runs == 1);
    CHECK(count >= 1);
    if (frames >= 20) {
      CHECK(count >= std::floor(0.4 * static_cast<double>(frames)));
      CHECK(count <= std::ceil(0.9 * static_cast<double>(frames)));
    }
  }
}

TEST_CASE("velocity_forward contracts") {
  Rng rng(4);
  FlowModel model(tiny_config(), 5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(30));
    std::vector<std::int64_t> tokens(static_cast<std::size_t>(n), 3);
    CHECK(velocity_forward(model, randn(rng, n, 6), 0.3, tokens, Direction::kN2w, randn(rng, n, 6)).rows() == n);
  }
  const Matrix y = randn(rng, 4, 6), c = randn(rng, 4, 6);
  const std::vector<std::int64_t> tokens{1, 2, 3, 4};
  CHECK(velocity_forward(model, y, 0.5, tokens, Direction::kW2n, c) ==
        velocity_forward(model, y, 0.5, tokens, Direction::kW2n, c));
  CHECK_THROWS_AS(velocity_forward(model, y, 0.5, {1, 2, 3}, Direction::kW2n, c), ArgumentError);
  CHECK_THROWS_AS(velocity_forward(model, y, 0.5, tokens, Direction::kW2n, randn(rng, 3, 6)), ArgumentError);
  CHECK_THROWS_AS(velocity_forward(model, y, 0.5, {1, 2, 3, 10}, Direction::kW2n, c), ArgumentError);

  FlowModel zero_head = model;
  zero_head.params().get("output_head.weight").setZero();
  zero_head.params().get("output_head.bias").setZero();
  CHECK(velocity_forward(zero_head, y, 0.5, tokens, Direction::kW2n, c).isZero(0.0));

  // After a step on a batch holding both directions, the direction still matters.
  nn::Adam adam(nn::AdamConfig{1e-3});
  flow_train_step(model, adam, {tiny_batch(rng, 4, {0, 1, 1, 0}, Direction::kW2n), tiny_batch(rng, 4, {1, 1, 0, 0}, Direction::kN2w)});
  const Matrix w2n = velocity_forward(model, y, 0.5, tokens, Direction::kW2n, c);
  const Matrix n2w = velocity_forward(model, y, 0.5, tokens, Direction::kN2w, c);
  CHECK((w2n - n2w).cwiseAbs().maxCoeff() > 1e-6);

  CHECK(parse_direction("n2w") == Direction::kN2w);
  CHECK(direction_name(Direction::kW2n) == "w2n");
  CHECK_THROWS_AS(parse_direction("both"), ArgumentError);
}

TEST_CASE("cfm_loss arithmetic") {
  Rng rng(6);
  FlowModel model(tiny_config(), 7);
  model.params().get("output_head.weight").setZero();
  model.params().get("output_head.bias").setZero();

  // Zero velocity and y1 = y0 make the target velocity exactly zero.
  FlowBatch b = tiny_batch(rng, 4, {0, 1, 1, 0});
  b.y1 = b.y0;
  CHECK(cfm_loss(model, b) == 0.0);

  // One masked frame whose target is all +-1 against zero velocity.
  FlowBatch one = tiny_batch(rng, 3, {0, 1, 0});
  one.y1 = one.y0;
  for (Eigen::Index c = 0; c < 6; ++c) one.y1(1, c) += (c % 2 == 0) ? 1.0 : -1.0;
  one.y1.row(0).array() += 5.0;  // unmasked frames do not count
  CHECK(cfm_loss(model, one) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(cfm_loss(model, tiny_batch(rng, 3, {0, 0, 0})), DegenerateInputError);
  FlowBatch bad = tiny_batch(rng, 3, {1, 0, 0});
  bad.t = 1.2;
  CHECK_THROWS_AS(cfm_loss(model, bad), ArgumentError);
}

TEST_CASE("loss gradient w.r.t. velocity vanishes on unmasked frames") {
  Rng rng(8);
  const FlowBatch b = tiny_batch(rng, 4, {0, 1, 1, 0});
  const Matrix velocity = randn(rng, 4, 6);
  const auto loss_at = [&](const Matrix& v) {
    nn::Tape t(false);
    return cfm_loss_given_velocity(t.constant(v), b).value()(0, 0);
  };
  nn::Tape tape;
  const nn::Var v = tape.leaf(velocity, "v");
  tape.backward(cfm_loss_given_velocity(v, b));
  const Matrix& g = tape.grad(v);
  const Matrix target = b.y1 - b.y0;
  const double h = 1e-4;
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 6; ++c) {
      Matrix plus = velocity, minus = velocity;
      plus(r, c) += h;
      minus(r, c) -= h;
      const double fd = (loss_at(plus) - loss_at(minus)) / (2 * h);
      if (!b.mask[static_cast<std::size_t>(r)]) {
        CHECK(fd == 0.0);
        CHECK(g(r, c) == 0.0);
      } else {
        const double expected = (velocity(r, c) > target(r, c) ? 1.0 : -1.0) / 12.0;
        CHECK(g(r, c) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("flow gradients match finite differences") {
  Rng rng(9);
  FlowModel model(tiny_config(), 10);
  for (auto& e : model.params().entries()) e.value += randn(rng, e.value.rows(), e.value.cols(), 0.1);
  const std::vector<FlowBatch> batches{tiny_batch(rng, 4, {0, 1, 1, 1}, Direction::kW2n),
                                       tiny_batch(rng, 3, {1, 1, 0}, Direction::kN2w)};
  const FlowGradResult analytic = flow_grad(model, batches);
  const auto numeric = testing::numeric_gradient(model.params(), [&] { return cfm_loss(model, batches); });
  const auto m = testing::compare_gradients(analytic.grads, numeric);
  INFO(m.where);
  CHECK(m.worst <= 1e-4);

  // Rows of unused tokens get no gradient.
  const Matrix& gt = analytic.grads.get("token_embed");
  for (Eigen::Index r = 0; r < gt.rows(); ++r) {
    bool used = false;
    for (const auto& b : batches) used = used || std::find(b.tokens.begin(), b.tokens.end(), r) != b.tokens.end();
    if (!used) CHECK(gt.row(r).isZero(0.0));
  }
}

TEST_CASE("flow_train_step") {
  Rng rng(11);
  FlowModel model(tiny_config(), 12);
  const auto before = model.params();
  nn::Adam frozen(nn::AdamConfig{0.0});
  const std::vector<FlowBatch> batches{tiny_batch(rng, 4, {0, 1, 1, 1})};
  CHECK(flow_train_step(model, frozen, batches) > 0.0);
  for (std::size_t k = 0; k < before.size(); ++k) CHECK(model.params().entries()[k].value == before.entries()[k].value);

  nn::Adam adam(nn::AdamConfig{1e-2});
  const double first = flow_train_step(model, adam, batches);
  double last = first;
  for (int i = 0; i < 100; ++i) last = flow_train_step(model, adam, batches);
  CHECK(last < 0.5 * first);
}

TEST_CASE("short training on the token-to-mel task lowers the validation loss") {
  const synth::TokenMelTask task(6, 8, 1);
  FlowModel model(tiny_config(), 13);
  Rng rng(14);
  const auto example = [&](int d) {
    auto tok = task.random_tokens(rng, 12);
    return FlowExample{tok, task.mel(tok, d), d ? Direction::kN2w : Direction::kW2n};
  };
  std::vector<FlowExample> train, val;
  for (int k = 0; k < 16; ++k) train.push_back(example(k % 2));
  for (int k = 0; k < 8; ++k) val.push_back(example(k % 2));
  Rng vr(15);
  std::vector<FlowBatch> vb;
  for (const auto& e : val) vb.push_back(make_flow_batch(e, vr));
  const double v0 = cfm_loss(model, vb);
  nn::Adam adam(nn::AdamConfig{3e-3});
  for (int s = 0; s < 300; ++s) flow_train_step(model, adam, {make_flow_batch(train[rng.below(train.size())], rng)});
  CHECK(cfm_loss(model, vb) < 0.8 * v0);
}

TEST_CASE("euler_sample") {
  Rng rng(16);
  FlowModel model(tiny_config(), 17);
  const Matrix prompt = randn(rng, 3, 6);
  std::vector<std::int64_t> tokens{1, 2, 3, 4, 5, 6, 7};

  SUBCASE("one step is a single velocity evaluation from the initial noise") {
    Matrix initial;
    const Matrix out = euler_sample(model, tokens, Direction::kN2w, prompt, 4, 1, 21, [&](int step, const Matrix& y) {
      if (step == 0) initial = y;
    });
    std::vector<char> mask{0, 0, 0, 1, 1, 1, 1};
    const Matrix condition = make_masked_condition(initial, mask, derive_seed("flow.sample.condition", 21));
    const Matrix v = velocity_forward(model, initial, 0.0, tokens, Direction::kN2w, condition);
    CHECK((out - (initial.bottomRows(4) + v.bottomRows(4))).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("prompt frames are never modified") {
    int calls = 0;
    euler_sample(model, tokens, Direction::kW2n, prompt, 4, 10, 22, [&](int, const Matrix& y) {
      ++calls;
      CHECK(y.topRows(3) == prompt);  // identity normalization
    });
    CHECK(calls == 11);

    FlowModel scaled = model;
    scaled.fit_normalization({randn(rng, 20, 6, 3.0)});
    const Matrix normalized_prompt = scaled.normalize(prompt);
    euler_sample(scaled, tokens, Direction::kW2n, prompt, 4, 5, 22,
                 [&](int, const Matrix& y) { CHECK(y.topRows(3) == normalized_prompt); });
  }

  SUBCASE("seeded determinism and contract errors") {
    const Matrix a = euler_sample(model, tokens, Direction::kW2n, prompt, 4, 5, 30);
    CHECK(a.rows() == 4);
    CHECK(a == euler_sample(model, tokens, Direction::kW2n, prompt, 4, 5, 30));
    CHECK(a != euler_sample(model, tokens, Direction::kW2n, prompt, 4, 5, 31));
    CHECK(euler_sample(model, {1, 2}, Direction::kW2n, Matrix(0, 6), 2, 3, 1).rows() == 2);
    CHECK_THROWS_AS(euler_sample(model, tokens, Direction::kW2n, prompt, 5, 5, 30), ArgumentError);
    CHECK_THROWS_AS(euler_sample(model, tokens, Direction::kW2n, prompt, 4, 0, 30), ArgumentError);
  }
}

TEST_CASE("flow checkpoint round trip") {
  testing::TempDir dir;
  Rng rng(18);
  FlowModel model(tiny_config(), 19);
  model.fit_normalization({randn(rng, 10, 6)});
  save_flow_model(dir.path() / "flow", model);
  const FlowModel back = load_flow_model(dir.path() / "flow");
  CHECK(back.seed() == 19);
  CHECK(back.config().codebook_size == 10);
  const Matrix y = randn(rng, 4, 6), c = randn(rng, 4, 6);
  const Matrix a = velocity_forward(model, y, 0.2, {1, 1, 2, 2}, Direction::kN2w, c);
  const Matrix b = velocity_forward(back, y, 0.2, {1, 1, 2, 2}, Direction::kN2w, c);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-4);
  CHECK_THROWS_AS(load_flow_model(dir.path() / "nothing"), DependencyError);
}
