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


#include "murmur/nn/transformer.hpp"

#include <cmath>

#include "murmur/common/errors.hpp"

namespace murmur::nn {

void TrunkConfig::validate() const {
  if (dim_model <= 0 || dim_ff <= 0 || heads <= 0 || layers < 0 || fsmn_left < 0 || fsmn_right < 0) {
    throw ArgumentError("transformer sizes must be positive");
  }
  if (dim_model % heads != 0 || (dim_model / heads) % 2 != 0) {
    throw ArgumentError("dim_model must split into heads of even size");
  }
}

Matrix random_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols, double std) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std * rng.normal();
  return m;
}

void add_linear(ParamSet& params, const std::string& name, int in, int out, Rng& rng, double gain) {
  params.add(name + ".weight", random_normal(rng, in, out, gain / std::sqrt(static_cast<double>(in))));
  params.add(name + ".bias", Matrix::Zero(1, out));
}

Var linear(Tape& tape, const ParamSet& params, const std::string& name, Var x) {
  return add_rowvec(matmul(x, tape.param(params, name + ".weight")), tape.param(params, name + ".bias"));
}

namespace {

void add_norm(ParamSet& params, const std::string& name, int dim) {
  params.add(name + ".gamma", Matrix::Ones(1, dim));
  params.add(name + ".beta", Matrix::Zero(1, dim));
}

Var norm(Tape& tape, const ParamSet& params, const std::string& name, Var x) {
  return layer_norm(x, tape.param(params, name + ".gamma"), tape.param(params, name + ".beta"));
}

}  // namespace

void add_trunk_params(ParamSet& params, const std::string& prefix, const TrunkConfig& cfg, Rng& rng) {
  cfg.validate();
  const int d = cfg.dim_model;
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < cfg.layers; ++i) {
    const std::string p = prefix + "layers." + std::to_string(i) + ".";
    add_norm(params, p + "attn_norm", d);
    for (const char* w : {"wq", "wk", "wv", "wo"}) params.add(p + "attn." + w, random_normal(rng, d, d, s));
    add_norm(params, p + "fsmn_norm", d);
    params.add(p + "fsmn.coeffs", random_normal(rng, cfg.fsmn_left + cfg.fsmn_right + 1, d, 0.1));
    add_norm(params, p + "ffn_norm", d);
    add_linear(params, p + "ffn.1", d, cfg.dim_ff, rng);
    add_linear(params, p + "ffn.2", cfg.dim_ff, d, rng);
  }
  add_norm(params, prefix + "final_norm", d);
}

Var trunk_forward(Tape& tape, const ParamSet& params, const std::string& prefix, const TrunkConfig& cfg, Var x) {
  if (x.cols() != cfg.dim_model) throw ArgumentError("trunk input width differs from dim_model");
  const Eigen::Index head_dim = cfg.dim_model / cfg.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));

  for (int i = 0; i < cfg.layers; ++i) {
    const std::string p = prefix + "layers." + std::to_string(i) + ".";
    {
      Tape::Scope scope(tape, p + "attn");
      const Var a = norm(tape, params, p + "attn_norm", x);
      const Var q = rope(matmul(a, tape.param(params, p + "attn.wq")), cfg.heads, cfg.rope_base);
      const Var k = rope(matmul(a, tape.param(params, p + "attn.wk")), cfg.heads, cfg.rope_base);
      const Var v = matmul(a, tape.param(params, p + "attn.wv"));
      std::vector<Var> heads;
      for (int h = 0; h < cfg.heads; ++h) {
        const Var qh = slice_cols(q, h * head_dim, head_dim);
        const Var kh = slice_cols(k, h * head_dim, head_dim);
        const Var vh = slice_cols(v, h * head_dim, head_dim);
        heads.push_back(matmul(softmax_rows(scale(matmul_nt(qh, kh), inv_sqrt)), vh));
      }
      x = add(x, matmul(concat_cols(heads), tape.param(params, p + "attn.wo")));
    }
    {
      Tape::Scope scope(tape, p + "fsmn");
      const Var n = norm(tape, params, p + "fsmn_norm", x);
      x = add(x, sub(fsmn(n, tape.param(params, p + "fsmn.coeffs"), cfg.fsmn_left, cfg.fsmn_right), n));
    }
    {
      Tape::Scope scope(tape, p + "ffn");
      const Var n = norm(tape, params, p + "ffn_norm", x);
      x = add(x, linear(tape, params, p + "ffn.2", gelu(linear(tape, params, p + "ffn.1", n))));
    }
  }
  Tape::Scope scope(tape, prefix + "final_norm");
  return norm(tape, params, prefix + "final_norm", x);
}

}  // namespace murmur::nn
