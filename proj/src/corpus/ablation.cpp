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


#include "murmur/corpus/ablation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/corpus/aligned.hpp"

namespace murmur::corpus {

namespace fs = std::filesystem;

std::string_view ablation_mode_name(AblationMode m) {
  switch (m) {
    case AblationMode::kRaw: return "RAW";
    case AblationMode::kDsp: return "DSP";
    case AblationMode::kAligned: return "ALIGNED";
    case AblationMode::kPseudo: return "PSEUDO";
    case AblationMode::kAPlusP: return "A_PLUS_P";
  }
  return "?";
}

AblationMode parse_ablation_mode(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "A+P") up = "A_PLUS_P";
  for (auto m : {AblationMode::kRaw, AblationMode::kDsp, AblationMode::kAligned, AblationMode::kPseudo,
                 AblationMode::kAPlusP}) {
    if (up == ablation_mode_name(m)) return m;
  }
  throw ParseError("unknown data mode '" + std::string(s) + "' (RAW, DSP, ALIGNED, PSEUDO, A_PLUS_P)");
}

Matrix pad_frames(const Matrix& m, Eigen::Index frames, double value) {
  if (m.rows() >= frames) return m;
  Matrix out = Matrix::Constant(frames, m.cols(), value);
  out.topRows(m.rows()) = m;
  return out;
}

dsp::Waveform dsp_whisperize(const dsp::Waveform& w, std::uint64_t seed, int median_bins, int smooth_bins,
                             const dsp::StftConfig& cfg) {
  cfg.validate();
  if (median_bins < 1 || median_bins % 2 == 0 || smooth_bins < 1 || smooth_bins % 2 == 0) {
    throw ArgumentError("median_bins and smooth_bins must be positive odd counts");
  }
  if (dsp::frame_count(w.samples.size(), cfg) == 0) throw DegenerateInputError("audio shorter than one window");

  const dsp::ComplexMatrix spec = dsp::stft(w.samples, cfg);
  const Eigen::Index bins = spec.cols();
  const int half = median_bins / 2;
  const int reach = smooth_bins / 2;
  Rng rng("dsp.whisperize", seed);
  dsp::ComplexMatrix out(spec.rows(), bins);
  std::vector<double> mag(static_cast<std::size_t>(bins)), env(mag.size()), window;
  for (Eigen::Index f = 0; f < spec.rows(); ++f) {
    for (Eigen::Index k = 0; k < bins; ++k) mag[static_cast<std::size_t>(k)] = std::abs(spec(f, k));
    for (Eigen::Index k = 0; k < bins; ++k) {
      const auto lo = static_cast<std::size_t>(std::max<Eigen::Index>(0, k - half));
      const auto hi = static_cast<std::size_t>(std::min<Eigen::Index>(bins, k + half + 1));
      window.assign(mag.begin() + static_cast<std::ptrdiff_t>(lo), mag.begin() + static_cast<std::ptrdiff_t>(hi));
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      env[static_cast<std::size_t>(k)] = *mid;
    }
    // Box smoothing widens the formant peaks, as whispering does; without it
    // the narrow-band noise under each formant still reads as voiced.
    for (Eigen::Index k = 0; k < bins; ++k) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, k - reach), hi = std::min<Eigen::Index>(bins, k + reach + 1);
      double sum = 0.0;
      for (Eigen::Index j = lo; j < hi; ++j) sum += env[static_cast<std::size_t>(j)];
      const double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
      out(f, k) = std::polar(sum / static_cast<double>(hi - lo), phase);
    }
  }
  std::vector<double> samples = dsp::istft(out, cfg);
  samples.resize(w.samples.size(), 0.0);
  return {std::move(samples), w.sample_rate};
}

namespace {

std::vector<TrainingPair> raw_pairs(const AblationInputs& in) {
  const double silence = std::log(in.frontend.mel.epsilon);
  std::vector<TrainingPair> out;
  for (const auto& p : resolve_pairs(in.real)) {
    Matrix w = load_features(p.whisper.audio_path, in.frontend).values;
    Matrix n = load_features(p.normal.audio_path, in.frontend).values;
    const Eigen::Index frames = std::max(w.rows(), n.rows());
    out.push_back({p.pair_id, pad_frames(w, frames, silence), pad_frames(n, frames, silence), "raw"});
  }
  return out;
}

std::vector<TrainingPair> dsp_pairs(const AblationInputs& in) {
  std::vector<TrainingPair> out;
  for (const auto& r : in.real) {
    if (r.mode != Mode::kNormal) continue;
    if (!fs::exists(r.audio_path)) throw IoError("audio file " + r.audio_path.string() + " not found");
    const dsp::Waveform normal = prepare_audio(dsp::load_wav(r.audio_path), in.frontend);
    const dsp::Waveform whisper =
        dsp::peak_normalize(dsp_whisperize(normal, derive_seed("dsp:" + r.id, in.seed), in.dsp_median_bins,
                                           in.dsp_smooth_bins, in.frontend.mel.stft),
                            in.frontend.peak);
    out.push_back({r.id, dsp::mel_spectrogram(whisper, in.frontend.mel).values,
                   dsp::mel_spectrogram(normal, in.frontend.mel).values, "dsp"});
  }
  return out;
}

std::vector<TrainingPair> aligned_pairs(const AblationInputs& in) {
  std::vector<TrainingPair> out;
  for (const auto& e : load_aligned_corpus(in.aligned_dir)) {
    TrainingPair p{e.pair_id, read_matrix(e.whisper_mel), read_matrix(e.normal_mel), "aligned"};
    if (p.whisper.rows() != p.normal.rows()) {
      throw ValidationError("aligned pair " + e.pair_id + " has unequal frame counts");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<TrainingPair> pseudo_pairs(const AblationInputs& in) {
  FrontendOptions fo = in.frontend;
  fo.trim = false;  // pseudo whispers are frame-synchronous with their untrimmed source
  std::vector<TrainingPair> out;
  for (const auto& p : resolve_pairs(in.pseudo)) {
    Matrix w = load_features(p.whisper.audio_path, fo).values;
    Matrix n = load_features(p.normal.audio_path, fo).values;
    // Griffin-Lim output can differ from the source by a partial hop.
    const Eigen::Index frames = std::min(w.rows(), n.rows());
    out.push_back({p.pair_id, w.topRows(frames), n.topRows(frames), "pseudo"});
  }
  return out;
}

}  // namespace

std::vector<TrainingPair> make_ablation_config(AblationMode mode, const AblationInputs& inputs) {
  const auto need_real = [&] {
    if (inputs.real.empty()) {
      throw ConfigurationError(std::string(ablation_mode_name(mode)) + " mode needs a real manifest");
    }
  };
  const auto need_aligned = [&] {
    if (inputs.aligned_dir.empty() || !fs::exists(inputs.aligned_dir / "alignments.tsv")) {
      throw ConfigurationError(std::string(ablation_mode_name(mode)) +
                               " mode needs an aligned corpus directory (alignments.tsv not found)");
    }
  };
  const auto need_pseudo = [&] {
    if (inputs.pseudo.empty()) {
      throw ConfigurationError(std::string(ablation_mode_name(mode)) + " mode needs a pseudo manifest");
    }
  };

  switch (mode) {
    case AblationMode::kRaw: need_real(); return raw_pairs(inputs);
    case AblationMode::kDsp: need_real(); return dsp_pairs(inputs);
    case AblationMode::kAligned: need_aligned(); return aligned_pairs(inputs);
    case AblationMode::kPseudo: need_pseudo(); return pseudo_pairs(inputs);
    case AblationMode::kAPlusP: {
      need_aligned();
      need_pseudo();
      auto out = aligned_pairs(inputs);
      auto p = pseudo_pairs(inputs);
      std::set<std::string> seen;
      for (const auto& e : out) seen.insert(e.id);
      for (auto& e : p) {
        if (!seen.insert(e.id).second) throw ValidationError("pair id " + e.id + " appears in both aligned and pseudo data");
        out.push_back(std::move(e));
      }
      return out;
    }
  }
  throw ArgumentError("unknown data mode");
}

}  // namespace murmur::corpus
