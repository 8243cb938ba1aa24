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


#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/corpus/ablation.hpp"
#include "murmur/corpus/aligned.hpp"
#include "murmur/corpus/manifest.hpp"
#include "murmur/corpus/pseudo.hpp"
#include "murmur/corpus/split.hpp"
#include "murmur/corpus/stats.hpp"
#include "murmur/dsp/analysis.hpp"
#include "murmur/synth/audio_corpus.hpp"
#include "murmur/synth/world.hpp"
#include "support/temp_dir.hpp"

using namespace murmur;
using namespace murmur::corpus;
using murmur::testing::TempDir;

namespace {

Manifest parse(const std::string& text, const std::filesystem::path& base = "/data") {
  std::istringstream in(text);
  return parse_manifest(in, base, "fixture");
}

UtteranceRecord rec(std::string id, std::string speaker, Mode mode, std::string pair = "") {
  return {std::move(id), std::move(speaker), mode, Language::kEN, "/x/" + speaker + ".wav", std::move(pair),
          Provenance::kReal, "t"};
}

std::set<std::string> speakers_of(const Manifest& m) {
  std::set<std::string> s;
  for (const auto& r : m) s.insert(r.speaker);
  return s;
}

// Mean per-frame L2 distance between two equal-length mels.
double frame_error(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  double sum = 0.0;
  for (Eigen::Index t = 0; t < a.rows(); ++t) sum += (a.row(t) - b.row(t)).norm();
  return sum / static_cast<double>(a.rows());
}

Manifest pair_manifest(const std::filesystem::path& whisper, const std::filesystem::path& normal, const std::string& id) {
  return {{id + "_w", "s", Mode::kWhisper, Language::kEN, whisper, id, Provenance::kReal, "a b"},
          {id + "_n", "s", Mode::kNormal, Language::kEN, normal, id, Provenance::kReal, "a b"}};
}

}  // namespace

TEST_CASE("manifest parsing") {
  CHECK(parse("").empty());
  CHECK(parse("# id\tspeaker\n\n").empty());

  const Manifest m = parse(
      "# header\n"
      "a_w\tspk1\twhisper\tEN\ta_w.wav\tpa\treal\thello world\n"
      "a_n\tspk1\tnormal\tEN\t/abs/a_n.wav\tpa\treal\thello world\n"
      "b\tspk2\tnormal\tCN\tb.wav\t\treal\tni\thao\n"
      "c\tspk2\twhisper\tCN\tc.wav\t\tpseudo\t\n");
  REQUIRE(m.size() == 4);
  CHECK(m[0].audio_path == std::filesystem::path("/data/a_w.wav"));
  CHECK(m[1].audio_path == std::filesystem::path("/abs/a_n.wav"));
  CHECK(m[2].transcript == "ni\thao");
  CHECK(m[2].language == Language::kCN);
  CHECK(m[3].provenance == Provenance::kPseudo);
  const auto pairs = resolve_pairs(m);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].pair_id == "pa");
  CHECK(pairs[0].whisper.id == "a_w");
  CHECK(pairs[0].normal.id == "a_n");

  std::ostringstream out;
  format_manifest(out, m, "/data");
  CHECK(parse(out.str()) == m);
}

TEST_CASE("manifest errors") {
  CHECK_THROWS_AS(parse("a\ts\tnormal\tEN\tx.wav\t\treal\tt\na\ts\tnormal\tEN\ty.wav\t\treal\tt\n"), ValidationError);
  CHECK_THROWS_AS(parse("a\ts\tnormal\tEN\tx.wav\tp\treal\tt\n"), ValidationError);
  CHECK_THROWS_AS(parse("a\ts\tnormal\tEN\tx.wav\tp\treal\tt\nb\ts\tnormal\tEN\ty.wav\tp\treal\tt\n"), ValidationError);
  try {
    parse("# h\na\ts\tnormal\tEN\tx.wav\t\treal\tt\nb\ts\tshouting\tEN\ty.wav\t\treal\tt\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("fixture:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("a\ts\tnormal\tEN\n"), ParseError);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.tsv"), IoError);
}

TEST_CASE("speaker split reproduces 91/6/3 on 100 single-utterance speakers") {
  Manifest m;
  for (int s = 0; s < 100; ++s) m.push_back(rec("u" + std::to_string(s), "s" + std::to_string(s), Mode::kNormal));
  const SplitResult r = split_speakers(m, {{91, 6, 3}, 4});
  CHECK(r.train.size() == 91);
  CHECK(r.val.size() == 6);
  CHECK(r.test.size() == 3);

  const SplitResult again = split_speakers(m, {{91, 6, 3}, 4});
  CHECK(again.train == r.train);
  CHECK(again.val == r.val);
  CHECK(again.test == r.test);

  CHECK_THROWS_AS(split_speakers({rec("a", "x", Mode::kNormal), rec("b", "y", Mode::kNormal)}, {}), InfeasibleSplitError);
  CHECK_THROWS_AS(split_speakers(m, {{0, 0, 0}, 1}), ArgumentError);
  CHECK_THROWS_AS(split_speakers(m, {{1, -1, 1}, 1}), ArgumentError);
}

TEST_CASE("speaker split is disjoint and complete over 50 seeds") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed + 1000);
    Manifest m;
    const int speakers = 3 + static_cast<int>(rng.below(30));
    const int records = speakers + static_cast<int>(rng.below(100));
    for (int k = 0; k < records; ++k) {
      const auto spk = k < speakers ? k : static_cast<int>(rng.below(static_cast<std::uint64_t>(speakers)));
      m.push_back(rec("u" + std::to_string(k), "s" + std::to_string(spk), Mode::kNormal));
    }
    const SplitResult r = split_speakers(m, {{91, 6, 3}, seed});
    const auto a = speakers_of(r.train), b = speakers_of(r.val), c = speakers_of(r.test);
    std::set<std::string> all = a;
    for (const auto& s : b) CHECK(all.insert(s).second);
    for (const auto& s : c) CHECK(all.insert(s).second);
    CHECK(all == speakers_of(m));
    CHECK(r.train.size() + r.val.size() + r.test.size() == m.size());
  }
}

TEST_CASE("aligned corpus: identical audio aligns exactly") {
  TempDir dir;
  synth::AudioWorld world(8, 1);
  Rng rng(2);
  const auto audio = world.render(synth::random_script(rng, 8, 80), {}, false, rng);
  dsp::write_wav(audio, dir / "same.wav");
  const auto report = build_aligned_corpus(pair_manifest(dir / "same.wav", dir / "same.wav", "p"), dir / "out");
  REQUIRE(report.aligned.size() == 1);
  CHECK(report.failures.empty());
  const Matrix w = read_matrix(dir / "out/p.whisper.mel");
  const Matrix n = read_matrix(dir / "out/p.normal.mel");
  CHECK(w == n);
  const Matrix mapping = read_matrix(dir / "out/p.mapping");
  for (Eigen::Index t = 0; t < mapping.rows(); ++t) CHECK(mapping(t, 0) == static_cast<double>(t));
}

TEST_CASE("aligned corpus: 1.5x stretch beats padded comparison") {
  TempDir dir;
  synth::AudioWorld world(12, 3);
  Rng rng(4);
  const auto script = synth::random_script(rng, 12, 120);
  const auto stretched = synth::warp_script(script, rng, 1.5, 1.5);
  dsp::write_wav(world.render(script, {}, false, rng), dir / "n.wav");
  dsp::write_wav(world.render(stretched, {}, false, rng), dir / "w.wav");
  const auto report = build_aligned_corpus(pair_manifest(dir / "w.wav", dir / "n.wav", "p"), dir / "out");
  REQUIRE(report.aligned.size() == 1);

  const Matrix aligned = read_matrix(dir / "out/p.whisper.mel");
  const Matrix normal = read_matrix(dir / "out/p.normal.mel");
  const Matrix raw = load_features(dir / "w.wav", {}).values;
  CHECK(raw.rows() > normal.rows() * 4 / 3);
  const double silence = std::log(1e-10);
  const Eigen::Index frames = std::max(raw.rows(), normal.rows());
  const double padded = frame_error(pad_frames(raw, frames, silence), pad_frames(normal, frames, silence));
  CHECK(frame_error(aligned, normal) <= 0.6 * padded);
}

TEST_CASE("aligned corpus: ten pairs, failures and reruns") {
  TempDir dir;
  synth::AudioCorpusSpec spec;
  spec.pairs = 10;
  spec.min_frames = 60;
  spec.max_frames = 90;
  Manifest m = synth::write_audio_corpus(dir / "audio", spec, 5);
  CHECK_THROWS_AS(load_aligned_corpus(dir / "out"), DependencyError);

  const auto report = build_aligned_corpus(m, dir / "out");
  CHECK(report.aligned.size() == 10);
  CHECK(report.failures.empty());
  const auto entries = load_aligned_corpus(dir / "out");
  REQUIRE(entries.size() == 10);
  for (const auto& e : entries) {
    const Matrix w = read_matrix(e.whisper_mel), n = read_matrix(e.normal_mel);
    CHECK(w.rows() == n.rows());
    CHECK(w.rows() == e.frames);
    CHECK(read_matrix(e.mapping).rows() == e.frames);
  }

  const auto rerun = build_aligned_corpus(m, dir / "out");
  CHECK(rerun.skipped == 10);
  CHECK(rerun.aligned.size() == 10);
  AlignOptions force;
  force.force = true;
  CHECK(build_aligned_corpus(m, dir / "out", force).skipped == 0);

  m[0].audio_path = dir / "missing.wav";
  const auto broken = build_aligned_corpus(m, dir / "out2");
  CHECK(broken.aligned.size() == 9);
  REQUIRE(broken.failures.size() == 1);
  CHECK(broken.failures[0].pair_id == m[0].pair_id);
  CHECK(broken.failures[0].stage == "load");
}

TEST_CASE("aligned corpus writes word segments from posteriorgrams") {
  TempDir dir;
  synth::AudioWorld world(6, 7);
  Rng rng(8);
  dsp::write_wav(world.render(synth::random_script(rng, 6, 60), {}, false, rng), dir / "n.wav");
  dsp::write_wav(world.render(synth::random_script(rng, 6, 70), {}, true, rng), dir / "w.wav");
  // Two words "a b" over a vocabulary {blank, a, b}: first half a, second half b.
  const PosteriorSource source = [](const UtteranceRecord&, Eigen::Index frames) -> std::optional<TranscriptPosteriors> {
    TranscriptPosteriors tp;
    tp.posteriors.log_probs = Matrix::Constant(frames, 3, std::log(0.01));
    for (Eigen::Index t = 0; t < frames; ++t) tp.posteriors.log_probs(t, t < frames / 2 ? 1 : 2) = std::log(0.98);
    tp.tokens = {1, 2};
    tp.word_lengths = {1, 1};
    return tp;
  };
  const auto report = build_aligned_corpus(pair_manifest(dir / "w.wav", dir / "n.wav", "p"), dir / "out", {}, source);
  CHECK(report.failures.empty());
  CHECK(std::filesystem::exists(dir / "out/p.whisper.words"));
  CHECK(std::filesystem::exists(dir / "out/p.normal.words"));
}

namespace {

struct TinyModels {
  tokenizer::SeqModel distilled;
  tokenizer::SeqModel n2w;
  flow::FlowModel flow;
};

TinyModels tiny_models() {
  tokenizer::SeqModelConfig sc;
  sc.trunk.dim_model = 16;
  sc.trunk.dim_ff = 32;
  sc.trunk.heads = 2;
  sc.trunk.layers = 1;
  tokenizer::SeqModel distilled(sc, tokenizer::Role::kDistilled, 1);
  flow::FlowConfig fc;
  fc.trunk = sc.trunk;
  return {distilled, distilled.with_role(tokenizer::Role::kN2w), flow::FlowModel(fc, 2)};
}

}  // namespace

TEST_CASE("pseudo pairs") {
  TempDir dir;
  synth::AudioCorpusSpec spec;
  spec.pairs = 2;
  spec.min_frames = 50;
  spec.max_frames = 70;
  const Manifest m = synth::write_audio_corpus(dir / "audio", spec, 9);
  const auto models = tiny_models();
  const UtteranceRecord& normal = m[1];
  const UtteranceRecord& prompt = m[3];
  REQUIRE(normal.mode == Mode::kNormal);

  PseudoOptions opts;
  opts.seed = 3;
  opts.prompt_frames = 30;
  const PseudoPair a = gen_pseudo_pair(normal, models.n2w, models.distilled, models.flow, &prompt, dir / "p1", opts);
  CHECK(a.pseudo_whisper.mode == Mode::kWhisper);
  CHECK(a.pseudo_normal.mode == Mode::kNormal);
  CHECK(a.pseudo_whisper.transcript == normal.transcript);
  CHECK(a.pseudo_normal.transcript == normal.transcript);
  CHECK(a.pseudo_whisper.pair_id == a.pseudo_normal.pair_id);
  CHECK(a.pseudo_whisper.provenance == Provenance::kPseudo);
  CHECK(a.pseudo_normal.audio_path == normal.audio_path);
  CHECK_NOTHROW(validate_manifest({a.pseudo_whisper, a.pseudo_normal}));

  const auto source = load_features(normal.audio_path, opts.frontend);
  CHECK(a.whisper_mel.rows() == source.frames());
  CHECK(static_cast<Eigen::Index>(a.tokens.size()) == source.frames());
  const double src = dsp::wav_duration(normal.audio_path);
  const double out = dsp::wav_duration(a.pseudo_whisper.audio_path);
  CHECK(std::abs(out - src) <= 0.2 * src);

  const PseudoPair b = gen_pseudo_pair(normal, models.n2w, models.distilled, models.flow, &prompt, dir / "p2", opts);
  CHECK(b.whisper.samples == a.whisper.samples);
  CHECK(dsp::load_wav(b.pseudo_whisper.audio_path).samples == dsp::load_wav(a.pseudo_whisper.audio_path).samples);

  const PseudoPair unprompted = gen_pseudo_pair(normal, models.n2w, models.distilled, models.flow, nullptr, dir / "p3", opts);
  CHECK(unprompted.whisper_mel.rows() == source.frames());

  CHECK_THROWS_AS(gen_pseudo_pair(normal, models.distilled, models.distilled, models.flow, &prompt, dir / "x", opts),
                  UsageError);
  CHECK_THROWS_AS(gen_pseudo_pair(m[0], models.n2w, models.distilled, models.flow, &prompt, dir / "x", opts),
                  UsageError);
}

TEST_CASE("longest normal clip per speaker") {
  Manifest m = {rec("a", "s1", Mode::kNormal), rec("b", "s1", Mode::kNormal), rec("c", "s1", Mode::kWhisper),
                rec("d", "s2", Mode::kNormal)};
  m[0].audio_path = "1";
  m[1].audio_path = "3";
  m[2].audio_path = "9";
  m[3].audio_path = "2";
  const auto prompts = longest_normal_prompts(m, [](const std::filesystem::path& p) { return std::stod(p.string()); });
  REQUIRE(prompts.size() == 2);
  CHECK(prompts.at("s1").id == "b");
  CHECK(prompts.at("s2").id == "d");
}

TEST_CASE("ablation modes") {
  TempDir dir;
  synth::AudioCorpusSpec spec;
  spec.pairs = 2;
  spec.min_frames = 50;
  spec.max_frames = 70;
  const Manifest real = synth::write_audio_corpus(dir / "audio", spec, 11);
  AblationInputs in;

  CHECK(parse_ablation_mode("a_plus_p") == AblationMode::kAPlusP);
  CHECK(parse_ablation_mode("A+P") == AblationMode::kAPlusP);
  CHECK(ablation_mode_name(AblationMode::kRaw) == "RAW");
  CHECK_THROWS_AS(parse_ablation_mode("mixed"), ParseError);
  for (auto mode : {AblationMode::kRaw, AblationMode::kDsp, AblationMode::kAligned, AblationMode::kPseudo,
                    AblationMode::kAPlusP}) {
    CHECK_THROWS_AS(make_ablation_config(mode, in), ConfigurationError);
  }

  in.real = real;
  const auto raw = make_ablation_config(AblationMode::kRaw, in);
  REQUIRE(raw.size() == 2);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto pair = resolve_pairs(real)[k];
    const Matrix w = load_features(pair.whisper.audio_path, in.frontend).values;
    const Matrix n = load_features(pair.normal.audio_path, in.frontend).values;
    CHECK(raw[k].whisper.rows() == raw[k].normal.rows());
    CHECK(raw[k].whisper.rows() == std::max(w.rows(), n.rows()));
    CHECK(raw[k].whisper.topRows(w.rows()) == w);
    CHECK(raw[k].normal.topRows(n.rows()) == n);
    CHECK(raw[k].origin == "raw");
  }

  const auto dsp_set = make_ablation_config(AblationMode::kDsp, in);
  REQUIRE(dsp_set.size() == 2);
  for (const auto& p : dsp_set) CHECK(p.whisper.rows() == p.normal.rows());

  build_aligned_corpus(real, dir / "aligned");
  in.aligned_dir = dir / "aligned";
  const auto aligned = make_ablation_config(AblationMode::kAligned, in);
  CHECK(aligned.size() == 2);

  const auto models = tiny_models();
  PseudoOptions po;
  po.griffin_lim_iterations = 4;
  for (const auto& r : real) {
    if (r.mode != Mode::kNormal) continue;
    const auto p = gen_pseudo_pair(r, models.n2w, models.distilled, models.flow, nullptr, dir / "pseudo", po);
    in.pseudo.push_back(p.pseudo_whisper);
    in.pseudo.push_back(p.pseudo_normal);
  }
  const auto pseudo = make_ablation_config(AblationMode::kPseudo, in);
  REQUIRE(pseudo.size() == 2);
  for (const auto& p : pseudo) CHECK(p.whisper.rows() == p.normal.rows());

  const auto both = make_ablation_config(AblationMode::kAPlusP, in);
  REQUIRE(both.size() == aligned.size() + pseudo.size());
  for (std::size_t k = 0; k < aligned.size(); ++k) CHECK(both[k].id == aligned[k].id);
  for (std::size_t k = 0; k < pseudo.size(); ++k) CHECK(both[aligned.size() + k].id == pseudo[k].id);
  std::set<std::string> ids;
  for (const auto& p : both) CHECK(ids.insert(p.id).second);
}

TEST_CASE("dsp whisperization removes voicing") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    synth::AudioWorld world(8, seed);
    Rng rng(seed + 50);
    synth::Voice voice;
    voice.f0 = 120.0 + 30.0 * static_cast<double>(seed);
    const auto normal = world.render(synth::random_script(rng, 8, 120), voice, false, rng);
    const auto before = dsp::extract_f0(normal);
    const auto whisper = dsp_whisperize(normal, seed);
    CHECK(whisper.samples.size() == normal.samples.size());
    const auto after = dsp::extract_f0(whisper);
    REQUIRE(static_cast<double>(before.voiced_frames()) >= 0.5 * static_cast<double>(before.frames()));
    CHECK(static_cast<double>(after.voiced_frames()) <= 0.1 * static_cast<double>(after.frames()));
    CHECK(dsp_whisperize(normal, seed).samples == whisper.samples);
  }
}

TEST_CASE("corpus stats") {
  CHECK(corpus_stats({}, [](const std::filesystem::path&) { return 1.0; }).rows.empty());
  CHECK(corpus_stats({}).total() == StatsRow{});

  // 146 speakers, 4000 pairs, 8000 clips of 8.1 s = 18 h.
  Manifest m;
  for (int p = 0; p < 4000; ++p) {
    const std::string spk = "spk" + std::to_string(p % 146), pid = "p" + std::to_string(p);
    for (Mode mode : {Mode::kWhisper, Mode::kNormal}) {
      m.push_back({pid + (mode == Mode::kWhisper ? "w" : "n"), spk, mode, Language::kCN, "clip.wav", pid,
                   Provenance::kReal, ""});
    }
  }
  const auto stats = corpus_stats(m, [](const std::filesystem::path&) { return 8.1; });
  REQUIRE(stats.rows.size() == 1);
  const auto& row = stats.rows.at({Language::kCN, Provenance::kReal});
  CHECK(format_stats_row(Language::kCN, row) == "CN 18 4k 146");
  CHECK(format_stats_table(stats).find("real CN 18 4k 146\n") != std::string::npos);

  StatsRow r;
  r.seconds = 3600 * 2.5;
  for (int k = 0; k < 1300; ++k) r.pairs.insert(std::to_string(k));
  r.speakers = {"a"};
  CHECK(format_stats_row(Language::kEN, r) == "EN 2.5 1.3k 1");

  int calls = 0;
  const auto warned = corpus_stats({rec("a", "s", Mode::kNormal), rec("b", "s", Mode::kNormal)},
                                   [&](const std::filesystem::path&) -> double {
                                     if (calls++ == 0) throw IoError("unreadable");
                                     return 2.0;
                                   });
  CHECK(warned.warnings.size() == 1);
  CHECK(warned.total().seconds == 2.0);
  CHECK(warned.total().speakers.size() == 1);
}

TEST_CASE("corpus stats are additive over disjoint manifests") {
  const auto duration = [](const std::filesystem::path& p) { return static_cast<double>(p.string().size()); };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Manifest all, a, b;
    for (int k = 0; k < 60; ++k) {
      UtteranceRecord r = rec("u" + std::to_string(k), "s" + std::to_string(rng.below(7)),
                              rng.below(2) ? Mode::kNormal : Mode::kWhisper);
      r.language = rng.below(2) ? Language::kEN : Language::kCN;
      r.provenance = rng.below(2) ? Provenance::kReal : Provenance::kPseudo;
      r.pair_id = "q" + std::to_string(k);
      r.audio_path = std::string(1 + rng.below(9), 'x');
      all.push_back(r);
      (rng.below(2) ? a : b).push_back(r);
    }
    const auto whole = corpus_stats(all, duration);
    const auto sum = corpus_stats(a, duration) + corpus_stats(b, duration);
    REQUIRE(whole.rows.size() == sum.rows.size());
    for (const auto& [key, row] : whole.rows) {
      const auto& other = sum.rows.at(key);
      CHECK(row.seconds == doctest::Approx(other.seconds));
      CHECK(row.pairs == other.pairs);
      CHECK(row.speakers == other.speakers);
    }
  }
}
