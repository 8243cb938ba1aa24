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


#include "murmur/corpus/frontend.hpp"

#include "murmur/common/errors.hpp"

namespace murmur::corpus {

dsp::Waveform prepare_audio(const dsp::Waveform& w, const FrontendOptions& options) {
  dsp::Waveform out = dsp::peak_normalize(dsp::resample(w, dsp::kFeatureRate), options.peak);
  if (options.trim) out = dsp::trim_silence(out, options.trim_options).audio;
  if (out.samples.size() < static_cast<std::size_t>(options.mel.stft.window_length)) {
    throw DegenerateInputError("audio shorter than one analysis window after trimming");
  }
  return out;
}

dsp::MelSpectrogram load_features(const std::filesystem::path& path, const FrontendOptions& options) {
  if (!std::filesystem::exists(path)) throw IoError("audio file " + path.string() + " not found");
  return dsp::mel_spectrogram(prepare_audio(dsp::load_wav(path), options), options.mel);
}

Matrix cmvn(const Matrix& features) {
  if (features.rows() == 0) throw DegenerateInputError("cmvn of an empty sequence");
  const RowVector mean = features.colwise().mean();
  const Matrix centered = features.rowwise() - mean;
  const RowVector sd = (centered.array().square().colwise().mean()).sqrt().max(1e-3).matrix();
  return centered.array().rowwise() / sd.array();
}

}  // namespace murmur::corpus
