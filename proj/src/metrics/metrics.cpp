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


#include "murmur/metrics/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "murmur/common/errors.hpp"
#include "murmur/common/text.hpp"

namespace murmur::metrics {

EditCounts edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  return edit_distance(std::span<const std::string>(hyp), std::span<const std::string>(ref));
}

std::string_view unit_name(Unit u) { return u == Unit::kWord ? "word" : "character"; }

std::vector<std::string> units(std::string_view text, Unit unit) {
  if (unit == Unit::kWord) return split_whitespace(text);
  std::vector<std::string> out;
  for (auto& cp : utf8_code_points(text)) {
    if (cp.size() == 1 && std::isspace(static_cast<unsigned char>(cp[0]))) continue;
    out.push_back(std::move(cp));
  }
  return out;
}

double error_rate(std::string_view hyp, std::string_view ref, Unit unit) {
  const auto r = units(ref, unit);
  if (r.empty()) throw UndefinedMetricError("error rate against an empty reference");
  return static_cast<double>(edit_distance(units(hyp, unit), r).total()) / static_cast<double>(r.size());
}

dsp::F0Track stretch_track(const dsp::F0Track& track, std::size_t frames) {
  dsp::F0Track out = track;
  const std::size_t n = track.f0.size();
  if (n == frames || n == 0) return out;
  out.f0.assign(frames, 0.0);
  for (std::size_t k = 0; k < frames; ++k) {
    const double pos = frames == 1 ? 0.0 : static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(frames - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    const double a = track.f0[lo], b = track.f0[hi];
    if (a > 0.0 && b > 0.0) {
      out.f0[k] = a + frac * (b - a);
    } else {
      out.f0[k] = frac < 0.5 ? a : b;
    }
  }
  return out;
}

std::optional<double> f0_corr(const dsp::F0Track& converted, const dsp::F0Track& target, std::size_t min_frames) {
  if (converted.f0.empty() || target.f0.empty()) return std::nullopt;
  const std::size_t frames = std::max(converted.f0.size(), target.f0.size());
  const auto a = stretch_track(converted, frames), b = stretch_track(target, frames);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < frames; ++k) {
    if (a.f0[k] > 0.0 && b.f0[k] > 0.0) {
      x.push_back(a.f0[k]);
      y.push_back(b.f0[k]);
    }
  }
  if (x.size() < min_frames) return std::nullopt;
  const auto count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double cosine_sim(const RowVector& a, const RowVector& b) {
  if (a.size() != b.size()) throw ArgumentError("cosine_sim: vectors of different length");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw UndefinedMetricError("cosine similarity with a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

RowVector proxy_embedding(const Matrix& mel) {
  if (mel.rows() == 0) throw DegenerateInputError("embedding of an empty mel");
  const RowVector mean = mel.colwise().mean();
  const RowVector sd = ((mel.rowwise() - mean).array().square().colwise().mean()).sqrt().matrix();
  RowVector out(2 * mel.cols());
  out << mean, sd;
  return out;
}

}  // namespace murmur::metrics
