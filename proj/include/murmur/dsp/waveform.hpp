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
#include <vector>

namespace murmur::dsp {

/// Analysis rate used throughout the pipeline; audio is resampled on ingest.
inline constexpr int kFeatureRate = 16000;

/// Mono audio. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kFeatureRate;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Reads a RIFF/WAVE file holding 16-bit PCM mono. Samples are scaled by 1/32768.
/// Throws FormatError on a malformed container, UnsupportedFormatError for
/// anything other than 16-bit PCM mono.
Waveform load_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono; samples are clipped to the int16 range first.
void write_wav(const Waveform& w, const std::filesystem::path& path);

/// Reads only the header and returns the duration in seconds.
double wav_duration(const std::filesystem::path& path);

/// Windowed-sinc (Kaiser) band-limited resampling. Identity when the rate is unchanged.
Waveform resample(const Waveform& w, int target_rate);

/// Scales so that max |sample| equals target_peak. Throws DegenerateInputError on silence.
Waveform peak_normalize(const Waveform& w, double target_peak = 1.0);

}  // namespace murmur::dsp
