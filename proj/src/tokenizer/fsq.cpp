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


#include "murmur/tokenizer/fsq.hpp"

#include <cmath>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::tokenizer {

namespace {

double center(int level) { return level % 2 == 0 ? -0.5 : 0.0; }
double half_width(int level, double delta) { return level / 2.0 - delta; }

// Integer grid value of code 0.
int grid_offset(int level) { return level / 2; }

void check_dims(Eigen::Index cols, const FsqConfig& cfg) {
  cfg.validate();
  if (cols != cfg.dims()) {
    throw ArgumentError("FSQ expects " + std::to_string(cfg.dims()) + " dimensions, got " + std::to_string(cols));
  }
}

double preimage(int code, int level, double delta) {
  const double r = code - grid_offset(level);
  return std::atanh((r - center(level)) / half_width(level, delta));
}

}  // namespace

std::int64_t FsqConfig::codebook_size() const {
  std::int64_t n = 1;
  for (int l : levels) n *= l;
  return n;
}

void FsqConfig::validate() const {
  if (levels.empty()) throw ArgumentError("FSQ needs at least one level");
  for (int l : levels) {
    if (l < 2) throw ArgumentError("FSQ levels must be >= 2");
  }
  if (!(delta > 0.0 && delta < 0.5)) throw ArgumentError("FSQ delta must lie in (0, 0.5)");
}

SemanticTokens fsq_quantize(const Matrix& embeddings, const FsqConfig& cfg) {
  check_dims(embeddings.cols(), cfg);
  if (!embeddings.allFinite()) throw NumericError("non-finite embeddings passed to FSQ");
  SemanticTokens out;
  out.codes.resize(embeddings.rows(), cfg.dims());
  for (Eigen::Index t = 0; t < embeddings.rows(); ++t) {
    for (int k = 0; k < cfg.dims(); ++k) {
      const int level = cfg.levels[k];
      const double bounded = center(level) + half_width(level, cfg.delta) * std::tanh(embeddings(t, k));
      const int code = static_cast<int>(std::nearbyint(bounded)) + grid_offset(level);
      out.codes(t, k) = std::clamp(code, 0, level - 1);
    }
  }
  out.indices = codes_to_indices(out.codes, cfg);
  out.dequantized = dequantize_codes(out.codes, cfg);
  return out;
}

std::vector<std::int64_t> codes_to_indices(const IntMatrix& codes, const FsqConfig& cfg) {
  check_dims(codes.cols(), cfg);
  std::vector<std::int64_t> indices(static_cast<std::size_t>(codes.rows()));
  for (Eigen::Index t = 0; t < codes.rows(); ++t) {
    std::int64_t index = 0, stride = 1;
    for (int k = 0; k < cfg.dims(); ++k) {
      if (codes(t, k) < 0 || codes(t, k) >= cfg.levels[k]) throw ArgumentError("FSQ code out of range");
      index += codes(t, k) * stride;
      stride *= cfg.levels[k];
    }
    indices[t] = index;
  }
  return indices;
}

IntMatrix indices_to_codes(const std::vector<std::int64_t>& indices, const FsqConfig& cfg) {
  cfg.validate();
  const std::int64_t size = cfg.codebook_size();
  IntMatrix codes(static_cast<Eigen::Index>(indices.size()), cfg.dims());
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] < 0 || indices[t] >= size) throw ArgumentError("token index outside the codebook");
    std::int64_t rest = indices[t];
    for (int k = 0; k < cfg.dims(); ++k) {
      codes(static_cast<Eigen::Index>(t), k) = static_cast<int>(rest % cfg.levels[k]);
      rest /= cfg.levels[k];
    }
  }
  return codes;
}

Matrix dequantize_codes(const IntMatrix& codes, const FsqConfig& cfg) {
  check_dims(codes.cols(), cfg);
  Matrix out(codes.rows(), codes.cols());
  for (Eigen::Index t = 0; t < codes.rows(); ++t) {
    for (int k = 0; k < cfg.dims(); ++k) out(t, k) = preimage(codes(t, k), cfg.levels[k], cfg.delta);
  }
  return out;
}

SemanticTokens tokens_from_indices(const std::vector<std::int64_t>& indices, const FsqConfig& cfg) {
  SemanticTokens out;
  out.codes = indices_to_codes(indices, cfg);
  out.indices = indices;
  out.dequantized = dequantize_codes(out.codes, cfg);
  return out;
}

nn::Var fsq_ste(nn::Var embeddings, const FsqConfig& cfg, FsqMode mode) {
  check_dims(embeddings.cols(), cfg);
  Matrix out;
  if (mode == FsqMode::kHard) {
    out = fsq_quantize(embeddings.value(), cfg).dequantized;
  } else {
    const Matrix& z = embeddings.value();
    out.resize(z.rows(), z.cols());
    for (Eigen::Index t = 0; t < z.rows(); ++t) {
      for (int k = 0; k < cfg.dims(); ++k) {
        const int level = cfg.levels[k];
        const double h = half_width(level, cfg.delta);
        const double bounded = center(level) + h * std::tanh(z(t, k));
        out(t, k) = std::atanh((bounded - center(level)) / h);
      }
    }
  }
  return embeddings.tape->push(std::move(out), {embeddings},
                               [embeddings](nn::Tape& t, const Matrix& g) { t.accumulate(embeddings, g); }, "fsq");
}

}  // namespace murmur::tokenizer
