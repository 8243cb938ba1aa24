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


#include "murmur/dsp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "murmur/common/errors.hpp"

namespace murmur::dsp {

TrimResult trim_silence(const Waveform& w, const TrimOptions& options) {
  if (!(options.threshold_db < 0.0)) throw ArgumentError("silence threshold must be below 0 dBFS");
  if (w.sample_rate <= 0) throw ArgumentError("sample rate must be positive");

  const auto frame_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(options.frame_seconds * w.sample_rate)));
  const std::size_t n = w.samples.size();
  const std::size_t frames = (n + frame_len - 1) / frame_len;
  const double gate = std::pow(10.0, options.threshold_db / 20.0);

  std::vector<char> loud(frames, 0);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t b = f * frame_len;
    const std::size_t e = std::min(n, b + frame_len);
    double energy = 0.0;
    for (std::size_t i = b; i < e; ++i) energy += w.samples[i] * w.samples[i];
    loud[f] = std::sqrt(energy / static_cast<double>(e - b)) >= gate;
  }

  TrimResult result;
  result.audio.sample_rate = w.sample_rate;
  const auto first = std::find(loud.begin(), loud.end(), 1);
  if (first == loud.end()) return result;
  const std::size_t lo = static_cast<std::size_t>(first - loud.begin());
  const std::size_t hi = frames - static_cast<std::size_t>(std::find(loud.rbegin(), loud.rend(), 1) - loud.rbegin());

  std::vector<char> keep(frames, 0);
  for (std::size_t f = lo; f < hi; ++f) keep[f] = 1;
  if (options.trim_internal) {
    const double min_frames = options.min_silence * w.sample_rate / static_cast<double>(frame_len);
    std::size_t f = lo;
    while (f < hi) {
      if (loud[f]) {
        ++f;
        continue;
      }
      std::size_t g = f;
      while (g < hi && !loud[g]) ++g;
      if (static_cast<double>(g - f) >= min_frames) std::fill(keep.begin() + f, keep.begin() + g, 0);
      f = g;
    }
  }

  for (std::size_t f = lo; f < hi;) {
    if (!keep[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < hi && keep[g]) ++g;
    const SampleRange range{f * frame_len, std::min(n, g * frame_len)};
    result.kept.push_back(range);
    result.audio.samples.insert(result.audio.samples.end(), w.samples.begin() + range.begin,
                                w.samples.begin() + range.end);
    f = g;
  }
  return result;
}

TrimResult trim_silence(const Waveform& w, double threshold_db, double min_silence) {
  TrimOptions options;
  options.threshold_db = threshold_db;
  options.min_silence = min_silence;
  return trim_silence(w, options);
}

std::size_t F0Track::voiced_frames() const {
  return static_cast<std::size_t>(std::count_if(f0.begin(), f0.end(), [](double v) { return v > 0.0; }));
}

F0Track extract_f0(const Waveform& w, const F0Options& options) {
  if (w.sample_rate <= 0) throw ArgumentError("sample rate must be positive");
  if (!(options.f0_min > 0.0) || !(options.f0_min < options.f0_max) || !(options.f0_max < w.sample_rate / 2.0)) {
    throw ArgumentError("invalid F0 search band");
  }
  if (options.hop <= 0) throw ArgumentError("F0 hop must be positive");

  const double sr = w.sample_rate;
  const int lag_min = std::max(2, static_cast<int>(std::floor(sr / options.f0_max)));
  const int lag_max = static_cast<int>(std::ceil(sr / options.f0_min));
  const int window = lag_max;
  const std::size_t span = static_cast<std::size_t>(window + lag_max + 1);

  F0Track track;
  track.hop_length = options.hop;
  track.sample_rate = w.sample_rate;
  if (w.samples.size() < span) return track;
  const std::size_t frames = 1 + (w.samples.size() - span) / static_cast<std::size_t>(options.hop);
  track.f0.assign(frames, 0.0);

  std::vector<double> corr(static_cast<std::size_t>(lag_max + 2), 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = w.samples.data() + f * static_cast<std::size_t>(options.hop);
    double e0 = 0.0;
    for (int i = 0; i < window; ++i) e0 += x[i] * x[i];
    if (e0 <= 1e-12) continue;

    // Normalized cross-correlation between the frame and its lagged copy.
    for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      double cross = 0.0, e1 = 0.0;
      for (int i = 0; i < window; ++i) {
        cross += x[i] * x[i + lag];
        e1 += x[i + lag] * x[i + lag];
      }
      corr[static_cast<std::size_t>(lag)] = e1 > 1e-12 ? cross / std::sqrt(e0 * e1) : 0.0;
    }

    double best = -1.0;
    for (int lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, corr[static_cast<std::size_t>(lag)]);
    if (best < options.voicing_threshold) continue;

    int chosen = -1;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      const double c = corr[static_cast<std::size_t>(lag)];
      const bool peak = c >= corr[static_cast<std::size_t>(lag - 1)] && c >= corr[static_cast<std::size_t>(lag + 1)];
      if (peak && c >= 0.9 * best) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;

    const double a = corr[static_cast<std::size_t>(chosen - 1)];
    const double b = corr[static_cast<std::size_t>(chosen)];
    const double c = corr[static_cast<std::size_t>(chosen + 1)];
    const double denom = a - 2.0 * b + c;
    const double offset = std::abs(denom) > 1e-12 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
    const double f0 = sr / (chosen + offset);
    if (f0 >= options.f0_min && f0 <= options.f0_max) track.f0[f] = f0;
  }
  return track;
}

F0Track extract_f0(const Waveform& w, double f0_min, double f0_max, int hop) {
  F0Options options;
  options.f0_min = f0_min;
  options.f0_max = f0_max;
  options.hop = hop;
  return extract_f0(w, options);
}

}  // namespace murmur::dsp
