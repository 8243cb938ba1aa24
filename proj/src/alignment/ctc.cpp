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


#include "murmur/alignment/ctc.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"

namespace murmur::alignment {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double row_logsumexp(const Matrix& m, Eigen::Index r) {
  const double peak = m.row(r).maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((m.row(r).array() - peak).exp().sum());
}

void check_blank(const Posteriorgram& p, int blank) {
  if (blank < 0 || blank >= p.vocab()) throw ArgumentError("blank index outside the vocabulary");
}

}  // namespace

void Posteriorgram::validate(double tolerance) const {
  for (Eigen::Index t = 0; t < frames(); ++t) {
    if ((log_probs.row(t).array() > 0.0).any() || log_probs.row(t).array().isNaN().any()) {
      throw ArgumentError("posteriorgram frame " + std::to_string(t) + " has positive or NaN log-probabilities");
    }
    if (std::abs(row_logsumexp(log_probs, t)) > tolerance) {
      throw ArgumentError("posteriorgram frame " + std::to_string(t) + " is not log-normalized");
    }
  }
}

Posteriorgram log_softmax(const Matrix& logits) {
  Posteriorgram p{logits};
  for (Eigen::Index t = 0; t < logits.rows(); ++t) p.log_probs.row(t).array() -= row_logsumexp(logits, t);
  return p;
}

Posteriorgram read_posteriorgram(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  if (t.dims.size() != 2) throw FormatError(path.string() + ": posteriorgram must be rank 2");
  Posteriorgram p{to_matrix(t)};
  p.validate();
  return p;
}

std::vector<std::string> read_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  if (vocab.empty()) throw FormatError(path.string() + ": empty vocabulary");
  return vocab;
}

std::vector<int> ctc_collapse(const std::vector<int>& frame_labels, int blank) {
  std::vector<int> out;
  int previous = -1;
  for (int label : frame_labels) {
    if (label != previous && label != blank) out.push_back(label);
    previous = label;
  }
  return out;
}

std::vector<int> ctc_greedy_decode(const Posteriorgram& p, int blank) {
  check_blank(p, blank);
  std::vector<int> labels(static_cast<std::size_t>(p.frames()));
  for (Eigen::Index t = 0; t < p.frames(); ++t) {
    Eigen::Index best = 0;
    p.log_probs.row(t).maxCoeff(&best);
    labels[static_cast<std::size_t>(t)] = static_cast<int>(best);
  }
  return ctc_collapse(labels, blank);
}

ForcedAlignment ctc_viterbi(const Posteriorgram& p, const std::vector<int>& transcript, int blank) {
  check_blank(p, blank);
  if (transcript.empty()) throw ArgumentError("forced alignment needs a non-empty transcript");
  for (int token : transcript) {
    if (token < 0 || token >= p.vocab()) throw ArgumentError("transcript token outside the vocabulary");
    if (token == blank) throw ArgumentError("transcript must not contain the blank token");
  }

  const auto n = static_cast<Eigen::Index>(transcript.size());
  Eigen::Index repeats = 0;
  for (Eigen::Index k = 1; k < n; ++k) repeats += transcript[k] == transcript[k - 1];
  const Eigen::Index frames = p.frames();
  if (frames < n + repeats) {
    throw InfeasibleAlignmentError("transcript of " + std::to_string(n) + " tokens does not fit in " +
                                   std::to_string(frames) + " frames");
  }

  // Extended states: even = blank, odd s = transcript[s / 2].
  const Eigen::Index states = 2 * n + 1;
  const auto label = [&](Eigen::Index s) { return s % 2 == 0 ? blank : transcript[static_cast<std::size_t>(s / 2)]; };

  std::vector<double> prev(static_cast<std::size_t>(states), kNegInf), cur(prev.size());
  std::vector<signed char> back(static_cast<std::size_t>(frames * states), -1);
  prev[0] = p.log_probs(0, blank);
  prev[1] = p.log_probs(0, label(1));

  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      double best = prev[static_cast<std::size_t>(s)];
      signed char step = 0;
      if (s >= 1 && prev[static_cast<std::size_t>(s - 1)] > best) {
        best = prev[static_cast<std::size_t>(s - 1)];
        step = 1;
      }
      if (s >= 2 && s % 2 == 1 && label(s) != label(s - 2) && prev[static_cast<std::size_t>(s - 2)] > best) {
        best = prev[static_cast<std::size_t>(s - 2)];
        step = 2;
      }
      cur[static_cast<std::size_t>(s)] = best == kNegInf ? kNegInf : best + p.log_probs(t, label(s));
      back[static_cast<std::size_t>(t * states + s)] = step;
    }
    std::swap(prev, cur);
  }

  Eigen::Index s = prev[static_cast<std::size_t>(states - 1)] >= prev[static_cast<std::size_t>(states - 2)] ? states - 1
                                                                                                            : states - 2;
  ForcedAlignment result;
  result.log_prob = prev[static_cast<std::size_t>(s)];
  if (result.log_prob == kNegInf) throw InfeasibleAlignmentError("no CTC path with non-zero probability");

  std::vector<Eigen::Index> path(static_cast<std::size_t>(frames));
  for (Eigen::Index t = frames - 1; t >= 0; --t) {
    path[static_cast<std::size_t>(t)] = s;
    if (t > 0) s -= back[static_cast<std::size_t>(t * states + s)];
  }

  result.frame_labels.resize(static_cast<std::size_t>(frames));
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index state = path[static_cast<std::size_t>(t)];
    result.frame_labels[static_cast<std::size_t>(t)] = label(state);
    if (state % 2 == 0) continue;
    if (t > 0 && path[static_cast<std::size_t>(t - 1)] == state) {
      result.segments.back().end_frame = t + 1;
    } else {
      result.segments.push_back({label(state), t, t + 1});
    }
  }
  return result;
}

std::vector<TokenSegment> ctc_forced_align(const Posteriorgram& p, const std::vector<int>& transcript, int blank) {
  return ctc_viterbi(p, transcript, blank).segments;
}

std::vector<TokenSegment> merge_words(const std::vector<TokenSegment>& segments, const std::vector<int>& word_lengths) {
  std::size_t total = 0;
  for (int len : word_lengths) {
    if (len <= 0) throw ArgumentError("word lengths must be positive");
    total += static_cast<std::size_t>(len);
  }
  if (total != segments.size()) throw ArgumentError("word lengths do not sum to the number of segments");

  std::vector<TokenSegment> words;
  std::size_t k = 0;
  for (int len : word_lengths) {
    const auto& first = segments[k];
    const auto& last = segments[k + static_cast<std::size_t>(len) - 1];
    words.push_back({first.token, first.start_frame, last.end_frame});
    k += static_cast<std::size_t>(len);
  }
  return words;
}

}  // namespace murmur::alignment
