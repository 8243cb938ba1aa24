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

#include <filesystem>

#include "murmur/dsp/analysis.hpp"
#include "murmur/dsp/spectral.hpp"
#include "murmur/dsp/waveform.hpp"

namespace murmur::corpus {

struct FrontendOptions {
  dsp::MelConfig mel;
  bool trim = true;
  dsp::TrimOptions trim_options;
  double peak = 0.95;
};

/// Resample to the feature rate, peak-normalize, optionally trim silence.
dsp::Waveform prepare_audio(const dsp::Waveform& w, const FrontendOptions& options);

/// load_wav + prepare_audio + mel_spectrogram.
dsp::MelSpectrogram load_features(const std::filesystem::path& path, const FrontendOptions& options);

/// Per-utterance mean and variance normalization of every bin over time
/// (std floored at 1e-3).
Matrix cmvn(const Matrix& features);

}  // namespace murmur::corpus
