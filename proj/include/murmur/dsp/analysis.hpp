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

#include <cstddef>
#include <utility>
#include <vector>

#include "murmur/dsp/waveform.hpp"

namespace murmur::dsp {

/// Half-open sample range [begin, end) into the original waveform.
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const SampleRange&) const = default;
};

struct TrimOptions {
  double threshold_db = -40.0;  // frame RMS gate, dBFS
  double min_silence = 0.1;     // seconds; shorter internal pauses are kept
  bool trim_internal = true;
  double frame_seconds = 0.01;
};

struct TrimResult {
  Waveform audio;
  std::vector<SampleRange> kept;
};

/// Removes leading/trailing (and, optionally, long internal) regions whose
/// frame RMS falls below the gate. Concatenating original[kept] yields the output.
/// An entirely silent input produces an empty waveform, not an error.
TrimResult trim_silence(const Waveform& w, const TrimOptions& options = {});
TrimResult trim_silence(const Waveform& w, double threshold_db, double min_silence);

struct F0Options {
  double f0_min = 60.0;
  double f0_max = 400.0;
  int hop = 160;
  double voicing_threshold = 0.3;
};

/// Per-frame fundamental frequency in Hz; 0 marks an unvoiced frame.
struct F0Track {
  std::vector<double> f0;
  int hop_length = 160;
  int sample_rate = kFeatureRate;

  std::size_t frames() const { return f0.size(); }
  std::size_t voiced_frames() const;
};

/// Normalized-autocorrelation pitch tracker. Frame n analyses
/// samples [n*hop, n*hop + 2*max_lag); lags are searched in
/// [sr/f0_max, sr/f0_min] and the earliest peak within 90% of the best is taken.
F0Track extract_f0(const Waveform& w, const F0Options& options = {});
F0Track extract_f0(const Waveform& w, double f0_min, double f0_max, int hop);

}  // namespace murmur::dsp
