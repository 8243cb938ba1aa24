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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "murmur/corpus/frontend.hpp"
#include "murmur/corpus/manifest.hpp"
#include "murmur/flow/model.hpp"
#include "murmur/tokenizer/model.hpp"

namespace murmur::corpus {

/// Longest normal-mode clip of every speaker, by `duration` (seconds).
/// Ties go to the earlier record.
std::map<std::string, UtteranceRecord> longest_normal_prompts(
    const Manifest& manifest, const std::function<double(const std::filesystem::path&)>& duration);

struct PseudoOptions {
  FrontendOptions frontend = [] {
    FrontendOptions f;
    f.trim = false;
    return f;
  }();
  int sampler_steps = 10;
  int prompt_frames = 100;  // prompt clips are cut to at most this many frames
  int griffin_lim_iterations = 32;
  std::uint64_t seed = 0;
};

struct PseudoPair {
  dsp::Waveform whisper;
  Matrix whisper_mel;                // generated, frames equal to the source
  std::vector<std::int64_t> tokens;  // n2w tokens of the source
  UtteranceRecord pseudo_whisper;    // id "<id>.pw", audio under out_dir
  UtteranceRecord pseudo_normal;     // id "<id>.pn", the source audio
};

/// Pseudo whisper for one real normal record: n2w tokens of its mel, flow
/// sampling in the n2w direction behind a timbre prompt (tokenized by the
/// distilled tokenizer), mel inversion. Writes `<out_dir>/<id>.pw.wav`.
/// Throws UsageError for models with the wrong role or a normal-mode check
/// failure, ArgumentError for a flow codebook smaller than the tokenizer's.
PseudoPair gen_pseudo_pair(const UtteranceRecord& normal, const tokenizer::SeqModel& n2w,
                           const tokenizer::SeqModel& distilled, const flow::FlowModel& flow,
                           const UtteranceRecord* prompt, const std::filesystem::path& out_dir,
                           const PseudoOptions& options);

}  // namespace murmur::corpus
