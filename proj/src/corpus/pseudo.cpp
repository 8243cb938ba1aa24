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


#include "murmur/corpus/pseudo.hpp"

#include <algorithm>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/flow/sampler.hpp"

namespace murmur::corpus {

namespace fs = std::filesystem;

std::map<std::string, UtteranceRecord> longest_normal_prompts(const Manifest& manifest,
                                                              const std::function<double(const fs::path&)>& duration) {
  std::map<std::string, UtteranceRecord> best;
  std::map<std::string, double> best_len;
  for (const auto& r : manifest) {
    if (r.mode != Mode::kNormal) continue;
    const double d = duration(r.audio_path);
    const auto it = best_len.find(r.speaker);
    if (it == best_len.end() || d > it->second) {
      best_len[r.speaker] = d;
      best[r.speaker] = r;
    }
  }
  return best;
}

PseudoPair gen_pseudo_pair(const UtteranceRecord& normal, const tokenizer::SeqModel& n2w,
                           const tokenizer::SeqModel& distilled, const flow::FlowModel& flow,
                           const UtteranceRecord* prompt, const fs::path& out_dir, const PseudoOptions& options) {
  if (normal.mode != Mode::kNormal) throw UsageError("pseudo pairs are generated from normal-mode speech; " + normal.id + " is whispered");
  if (n2w.role() != tokenizer::Role::kN2w) {
    throw UsageError("pseudo generation needs the n2w tokenizer, got role '" + std::string(tokenizer::role_name(n2w.role())) + "'");
  }
  if (flow.config().codebook_size < n2w.config().fsq.codebook_size()) {
    throw ArgumentError("flow codebook is smaller than the tokenizer codebook");
  }
  if (flow.config().mel_bins != options.frontend.mel.mel_bins) throw ArgumentError("flow mel_bins differs from the frontend");

  const auto source = load_features(normal.audio_path, options.frontend);
  const auto target_tokens = tokenizer::convert_tokens(n2w, source.values).indices;

  Matrix prompt_mel(0, flow.config().mel_bins);
  std::vector<std::int64_t> tokens;
  if (prompt != nullptr) {
    const auto p = load_features(prompt->audio_path, options.frontend);
    prompt_mel = p.values.topRows(std::min<Eigen::Index>(p.frames(), options.prompt_frames));
    tokens = tokenizer::tokenize(distilled, prompt_mel).indices;
  }
  tokens.insert(tokens.end(), target_tokens.begin(), target_tokens.end());

  const std::uint64_t seed = derive_seed("pseudo:" + normal.id, options.seed);
  PseudoPair out;
  out.tokens = target_tokens;
  out.whisper_mel = flow::euler_sample(flow, tokens, flow::Direction::kN2w, prompt_mel, source.frames(),
                                       options.sampler_steps, seed);
  dsp::MelSpectrogram mel = source;
  mel.values = out.whisper_mel;
  out.whisper = dsp::peak_normalize(dsp::invert_mel(mel, options.frontend.mel, options.griffin_lim_iterations, seed),
                                    options.frontend.peak);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto wav = out_dir / (normal.id + ".pw.wav");
  dsp::write_wav(out.whisper, wav);

  const std::string pair_id = "pseudo_" + normal.id;
  out.pseudo_whisper = UtteranceRecord{normal.id + ".pw", normal.speaker, Mode::kWhisper, normal.language, wav,
                                       pair_id, Provenance::kPseudo, normal.transcript};
  out.pseudo_normal = UtteranceRecord{normal.id + ".pn", normal.speaker, Mode::kNormal, normal.language,
                                      normal.audio_path, pair_id, Provenance::kPseudo, normal.transcript};
  return out;
}

}  // namespace murmur::corpus
