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


#include "murmur/synth/audio_corpus.hpp"

#include <cstdio>
#include <string>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/synth/world.hpp"

namespace murmur::synth {

namespace fs = std::filesystem;

namespace {

std::string spell(const PhoneScript& s) {
  std::string text;
  for (std::size_t k = 0; k < s.phones.size(); ++k) {
    if (k > 0 && k % 3 == 0) text += ' ';
    text += static_cast<char>('a' + s.phones[k] % 26);
  }
  return text;
}

}  // namespace

corpus::Manifest write_audio_corpus(const fs::path& dir, const AudioCorpusSpec& spec, std::uint64_t seed) {
  if (spec.pairs < 0 || spec.speakers < 1) throw ArgumentError("audio corpus needs a non-negative pair count and a speaker");
  if (spec.min_frames < 1 || spec.max_frames < spec.min_frames) throw ArgumentError("bad frame range");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const AudioWorld world(spec.phones, derive_seed("audio_corpus.world", seed));
  Rng rng("audio_corpus", seed);
  std::vector<Voice> voices;
  for (int s = 0; s < spec.speakers; ++s) {
    Voice v;
    v.f0 = rng.uniform(100.0, 220.0);
    v.formant_scale = rng.uniform(0.9, 1.15);
    voices.push_back(v);
  }

  corpus::Manifest manifest;
  for (int i = 0; i < spec.pairs; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%s%03d", spec.prefix.c_str(), i);
    const std::string id = name;
    const int frames = spec.min_frames + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_frames - spec.min_frames + 1)));
    const PhoneScript script = random_script(rng, spec.phones, frames);
    const PhoneScript warped = warp_script(script, rng, spec.warp_lo, spec.warp_hi);
    const int speaker = i % spec.speakers;
    const Voice& voice = voices[static_cast<std::size_t>(speaker)];
    const auto normal = world.render(script, voice, false, rng);
    const auto whisper = world.render(warped, voice, spec.whisper_excitation, rng);
    const fs::path wn = dir / (id + ".normal.wav"), ww = dir / (id + ".whisper.wav");
    dsp::write_wav(normal, wn);
    dsp::write_wav(whisper, ww);
    const std::string spk = "spk" + std::to_string(speaker);
    const std::string text = spell(script);
    manifest.push_back({id + "_w", spk, corpus::Mode::kWhisper, spec.language, ww, id, corpus::Provenance::kReal, text});
    manifest.push_back({id + "_n", spk, corpus::Mode::kNormal, spec.language, wn, id, corpus::Provenance::kReal, text});
  }
  corpus::write_manifest(dir / "manifest.tsv", manifest);
  return manifest;
}

}  // namespace murmur::synth
