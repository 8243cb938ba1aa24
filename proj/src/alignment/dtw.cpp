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


#include "murmur/alignment/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur::alignment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Index = Eigen::Index;

// Allowed column interval [lo, hi] per row of the cost matrix.
struct Window {
  std::vector<Index> lo, hi;
};

void check_inputs(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ArgumentError("DTW inputs must be non-empty");
  if (a.cols() != b.cols()) {
    throw ArgumentError("DTW inputs differ in dimension (" + std::to_string(a.cols()) + " vs " +
                        std::to_string(b.cols()) + ")");
  }
}

AlignmentPath windowed_dtw(const Matrix& a, const Matrix& b, const Window& w, Distance distance) {
  const Index n = a.rows();
  std::vector<std::size_t> offset(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i) offset[i + 1] = offset[i] + static_cast<std::size_t>(w.hi[i] - w.lo[i] + 1);
  std::vector<double> cost(offset.back(), kInf);
  std::vector<signed char> move(offset.back(), -1);  // 0 diagonal, 1 from (i-1,j), 2 from (i,j-1)

  const auto at = [&](Index i, Index j) -> double {
    if (i < 0 || j < w.lo[i] || j > w.hi[i]) return kInf;
    return cost[offset[i] + static_cast<std::size_t>(j - w.lo[i])];
  };

  for (Index i = 0; i < n; ++i) {
    for (Index j = w.lo[i]; j <= w.hi[i]; ++j) {
      const std::size_t k = offset[i] + static_cast<std::size_t>(j - w.lo[i]);
      const double d = frame_distance(a.row(i), b.row(j), distance);
      if (i == 0 && j == 0) {
        cost[k] = d;
        continue;
      }
      double best = at(i - 1, j - 1);
      signed char step = 0;
      if (const double up = at(i - 1, j); up < best) {
        best = up;
        step = 1;
      }
      if (const double left = j > 0 ? at(i, j - 1) : kInf; left < best) {
        best = left;
        step = 2;
      }
      if (best == kInf) continue;
      cost[k] = best + d;
      move[k] = step;
    }
  }

  const Index m = b.rows();
  if (m - 1 < w.lo[n - 1] || m - 1 > w.hi[n - 1] || at(n - 1, m - 1) == kInf) {
    throw NumericError("DTW window does not connect the endpoints");
  }

  AlignmentPath path;
  path.cost = at(n - 1, m - 1);
  Index i = n - 1, j = m - 1;
  while (true) {
    path.steps.emplace_back(i, j);
    if (i == 0 && j == 0) break;
    switch (move[offset[i] + static_cast<std::size_t>(j - w.lo[i])]) {
      case 0: --i, --j; break;
      case 1: --i; break;
      default: --j; break;
    }
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

Matrix coarsen(const Matrix& x) {
  const Index n = (x.rows() + 1) / 2;
  Matrix out(n, x.cols());
  for (Index i = 0; i < n; ++i) {
    if (2 * i + 1 < x.rows()) {
      out.row(i) = 0.5 * (x.row(2 * i) + x.row(2 * i + 1));
    } else {
      out.row(i) = x.row(2 * i);
    }
  }
  return out;
}

// Each coarse cell covers a 2x2 block at the finer level; the block union is
// then dilated by `radius` cells in every direction.
Window project(const AlignmentPath& coarse, Index n, Index m, int radius) {
  std::vector<Index> lo(static_cast<std::size_t>(n), m), hi(static_cast<std::size_t>(n), -1);
  for (const auto& [ci, cj] : coarse.steps) {
    for (Index i = 2 * ci; i <= std::min(n - 1, 2 * ci + 1); ++i) {
      lo[i] = std::min(lo[i], 2 * cj);
      hi[i] = std::max(hi[i], std::min(m - 1, 2 * cj + 1));
    }
  }
  Window w{std::vector<Index>(static_cast<std::size_t>(n)), std::vector<Index>(static_cast<std::size_t>(n))};
  for (Index i = 0; i < n; ++i) {
    Index l = m, h = -1;
    for (Index k = std::max<Index>(0, i - radius); k <= std::min(n - 1, i + radius); ++k) {
      if (hi[k] < 0) continue;
      l = std::min(l, lo[k]);
      h = std::max(h, hi[k]);
    }
    w.lo[i] = std::max<Index>(0, l - radius);
    w.hi[i] = std::min(m - 1, h + radius);
  }
  return w;
}

}  // namespace

Distance parse_distance(std::string_view name) {
  if (name == "euclidean") return Distance::kEuclidean;
  if (name == "sqeuclidean") return Distance::kSquaredEuclidean;
  if (name == "manhattan") return Distance::kManhattan;
  if (name == "cosine") return Distance::kCosine;
  throw ArgumentError("unknown distance '" + std::string(name) + "'");
}

double frame_distance(const Eigen::Ref<const RowVector>& x, const Eigen::Ref<const RowVector>& y, Distance d) {
  switch (d) {
    case Distance::kEuclidean: return (x - y).norm();
    case Distance::kSquaredEuclidean: return (x - y).squaredNorm();
    case Distance::kManhattan: return (x - y).cwiseAbs().sum();
    case Distance::kCosine: {
      const double denom = x.norm() * y.norm();
      if (denom == 0.0) return x.norm() == y.norm() ? 0.0 : 1.0;
      return std::max(0.0, 1.0 - x.dot(y) / denom);
    }
  }
  return 0.0;
}

void validate_path(const AlignmentPath& path, Index len_a, Index len_b) {
  const auto& s = path.steps;
  if (s.empty() || s.front() != std::pair<Index, Index>{0, 0} || s.back() != std::pair<Index, Index>{len_a - 1, len_b - 1}) {
    throw ArgumentError("alignment path is not anchored at both corners");
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    const Index di = s[k].first - s[k - 1].first;
    const Index dj = s[k].second - s[k - 1].second;
    if (di < 0 || dj < 0 || di > 1 || dj > 1 || di + dj == 0) {
      throw ArgumentError("alignment path step " + std::to_string(k) + " is not a unit monotone step");
    }
  }
  if (!(path.cost >= 0.0)) throw ArgumentError("alignment path cost must be non-negative");
}

AlignmentPath dtw_exact(const Matrix& a, const Matrix& b, Distance distance) {
  check_inputs(a, b);
  Window w{std::vector<Index>(static_cast<std::size_t>(a.rows()), 0),
           std::vector<Index>(static_cast<std::size_t>(a.rows()), b.rows() - 1)};
  return windowed_dtw(a, b, w, distance);
}

AlignmentPath fastdtw(const Matrix& a, const Matrix& b, int radius, Distance distance) {
  if (radius < 0) throw ArgumentError("FastDTW radius must be non-negative");
  check_inputs(a, b);
  const Index min_size = radius + 2;
  if (a.rows() <= min_size || b.rows() <= min_size) return dtw_exact(a, b, distance);
  const AlignmentPath coarse = fastdtw(coarsen(a), coarsen(b), radius, distance);
  return windowed_dtw(a, b, project(coarse, a.rows(), b.rows(), radius), distance);
}

FrameMapping path_to_frame_mapping(const AlignmentPath& path, MappingTarget target) {
  if (path.steps.empty()) throw ArgumentError("empty alignment path");
  const auto [last_a, last_b] = path.steps.back();
  validate_path(path, last_a + 1, last_b + 1);

  const bool target_is_a = target == MappingTarget::kA;
  FrameMapping mapping;
  mapping.source_frames = (target_is_a ? last_b : last_a) + 1;
  std::vector<Index> span;
  Index current = 0;
  const auto flush = [&] {
    mapping.target_to_source.push_back(span[(span.size() - 1) / 2]);
    span.clear();
  };
  for (const auto& [i, j] : path.steps) {
    const Index t = target_is_a ? i : j;
    const Index s = target_is_a ? j : i;
    if (t != current) {
      flush();
      current = t;
    }
    span.push_back(s);
  }
  flush();
  return mapping;
}

}  // namespace murmur::alignment
