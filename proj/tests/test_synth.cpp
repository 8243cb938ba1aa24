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


#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/dsp/analysis.hpp"
#include "murmur/dsp/spectral.hpp"
#include "murmur/synth/world.hpp"

using namespace murmur;
using namespace murmur::synth;

TEST_CASE("phone scripts") {
  Rng rng(1);
  const PhoneScript s = random_script(rng, 8, 100);
  CHECK(s.frames() == 100);
  CHECK(s.frame_labels().size() == 100);
  for (std::size_t k = 1; k < s.phones.size(); ++k) CHECK(s.phones[k] != s.phones[k - 1]);
  const PhoneScript w = warp_script(s, rng, 1.5, 1.5);
  CHECK(w.phones == s.phones);
  CHECK(w.frames() >= 140);
  CHECK_THROWS_AS(random_script(rng, 1, 10), ArgumentError);
}

TEST_CASE("feature world whisper warp is invertible") {
  FeatureWorld world({12, 6, 0.3}, 2);
  Rng rng(3);
  const Matrix x = world.render(random_script(rng, 6, 40), rng);
  CHECK(x.rows() == 40);
  const Matrix w = world.whisperize(x);
  CHECK((w - x).norm() > 1.0);
  CHECK((world.normalize(w) - x).cwiseAbs().maxCoeff() < 1e-9);

  Rng a(5), b(5);
  const PhoneScript s = random_script(a, 6, 30);
  random_script(b, 6, 30);
  CHECK(world.render(s, a) == world.render(s, b));
}

TEST_CASE("token-mel task is deterministic and direction dependent") {
  const TokenMelTask task(10, 4, 7);
  Rng rng(8);
  const auto tokens = task.random_tokens(rng, 25, 3);
  CHECK(tokens.size() == 25);
  for (auto t : tokens) CHECK(t % 3 == 0);
  CHECK(task.mel(tokens, 0, 3) == task.mel(tokens, 0, 3));
  CHECK(task.mel(tokens, 0, 3) != task.mel(tokens, 1, 3));
  CHECK_THROWS_AS(task.mel({1}, 0, 3), ArgumentError);
}

TEST_CASE("rendered audio: voiced normal mode, unvoiced whisper mode") {
  const AudioWorld world(8, 9);
  Rng rng(10);
  const PhoneScript s = random_script(rng, 8, 120);
  Voice voice;
  voice.f0 = 150.0;
  const auto normal = world.render(s, voice, false, rng);
  const auto whisper = world.render(s, voice, true, rng);
  CHECK(normal.samples.size() == static_cast<std::size_t>(160 * 160));
  const auto f0n = dsp::extract_f0(normal);
  const auto f0w = dsp::extract_f0(whisper);
  CHECK(static_cast<double>(f0n.voiced_frames()) / static_cast<double>(f0n.frames()) >= 0.5);
  CHECK(static_cast<double>(f0w.voiced_frames()) / static_cast<double>(f0w.frames()) <= 0.1);
  double mean_f0 = 0.0;
  int voiced = 0;
  for (double f : f0n.f0) {
    if (f > 0.0) {
      mean_f0 += f;
      ++voiced;
    }
  }
  CHECK(mean_f0 / voiced == doctest::Approx(150.0).epsilon(0.05));

  const auto trimmed = dsp::trim_silence(normal);
  CHECK(trimmed.audio.duration_seconds() == doctest::Approx(1.2).epsilon(0.1));
}
