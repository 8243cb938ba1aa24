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


#include "commands.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "murmur/alignment/ctc.hpp"
#include "murmur/alignment/dtw.hpp"
#include "murmur/cli/app.hpp"
#include "murmur/common/errors.hpp"
#include "murmur/corpus/ablation.hpp"
#include "murmur/corpus/aligned.hpp"
#include "murmur/corpus/frontend.hpp"
#include "murmur/corpus/manifest.hpp"
#include "murmur/corpus/pseudo.hpp"
#include "murmur/corpus/stats.hpp"
#include "murmur/dsp/waveform.hpp"
#include "murmur/flow/checkpoint.hpp"
#include "murmur/metrics/evaluate.hpp"
#include "murmur/pipeline/stages.hpp"
#include "murmur/tokenizer/checkpoint.hpp"
#include "murmur/tokenizer/teacher.hpp"

namespace murmur::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using tokenizer::Role;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

bool has_checkpoint(const fs::path& dir) { return fs::exists(dir / "model.json"); }

tokenizer::SeqModel load_stage1(const fs::path& dir) {
  if (!has_checkpoint(dir)) {
    throw DependencyError("stage-1 tokenizer not found in " + dir.string() + "; run train-stage1 first");
  }
  auto model = tokenizer::load_seq_model(dir);
  if (model.role() != Role::kDistilled) {
    throw UsageError(dir.string() + " holds a " + std::string(tokenizer::role_name(model.role())) +
                     " tokenizer, not the stage-1 one");
  }
  return model;
}

flow::FlowModel load_stage2(const fs::path& dir) {
  if (!has_checkpoint(dir)) {
    throw DependencyError("stage-2 flow model not found in " + dir.string() + "; run train-stage2 first");
  }
  return flow::load_flow_model(dir);
}

tokenizer::SeqModel load_n2w(const fs::path& dir) {
  if (!has_checkpoint(dir)) {
    throw DependencyError("n2w tokenizer not found in " + dir.string() + "; run train-stage3 --direction n2w first");
  }
  auto model = tokenizer::load_seq_model(dir);
  if (model.role() != Role::kN2w) {
    throw UsageError(dir.string() + " holds a " + std::string(tokenizer::role_name(model.role())) +
                     " tokenizer, expected n2w");
  }
  return model;
}

void apply_dims(nn::TrunkConfig& trunk, const Settings& s) {
  trunk.dim_model = static_cast<int>(s.integer("dim"));
  trunk.dim_ff = static_cast<int>(s.integer("ff"));
  trunk.layers = static_cast<int>(s.integer("layers"));
  trunk.heads = static_cast<int>(s.integer("heads"));
}

int codebook_size(const tokenizer::SeqModel& model) {
  const auto& levels = model.config().fsq.levels;
  return std::accumulate(levels.begin(), levels.end(), 1, std::multiplies<int>());
}

std::uint64_t seed_of(const Settings& s) { return static_cast<std::uint64_t>(s.integer("seed")); }

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

}  // namespace

int cmd_align(const Context& ctx) {
  const auto& s = ctx.settings;
  corpus::AlignOptions options;
  options.radius = static_cast<int>(s.integer("radius"));
  options.distance = alignment::parse_distance(s.text("distance"));
  options.force = s.flag("force");
  corpus::PosteriorSource posteriors;
  if (s.has("posteriors")) {
    if (!s.has("vocab")) throw UsageError("align: --posteriors needs --vocab");
    posteriors = corpus::posteriorgram_files(s.path("posteriors"), alignment::read_vocabulary(s.path("vocab")));
  }
  const auto manifest = corpus::load_manifest(s.path("manifest"));
  const auto report = corpus::build_aligned_corpus(manifest, s.path("out-dir"), options, posteriors);
  ctx.out << "pairs aligned: " << report.aligned.size() << " (reused " << report.skipped
          << "), failures: " << report.failures.size() << '\n';
  if (report.skipped > 0) ctx.out << "skipped " << report.skipped << " existing pairs (use --force to recompute)\n";
  for (const auto& f : report.failures) {
    ctx.out << "failed " << f.pair_id << " at " << f.stage << ": " << f.message << '\n';
  }
  return !report.failures.empty() && s.flag("strict") ? kExitPartial : kExitOk;
}

int cmd_train_stage1(const Context& ctx) {
  const auto& s = ctx.settings;
  pipeline::Stage1Options options;
  apply_dims(options.model.trunk, s);
  options.model.fsq.levels = s.int_list("fsq-levels");
  options.model.embed_dim = static_cast<int>(options.model.fsq.levels.size());
  options.steps = static_cast<int>(s.integer("steps"));
  options.lr = s.real("lr");
  options.seed = seed_of(s);
  options.model.validate();

  std::vector<tokenizer::DistillExample> data;
  if (s.has("manifest")) {
    if (!s.has("teacher-dir")) throw UsageError("train-stage1: --manifest needs --teacher-dir");
    const tokenizer::FileTeacher teacher(s.path("teacher-dir"), options.model.embed_dim);
    for (const auto& r : corpus::load_manifest(s.path("manifest"))) {
      Matrix features = corpus::load_features(r.audio_path, {}).values;
      Matrix z = teacher.embed(r.id, features);
      data.push_back({std::move(features), std::move(z)});
    }
  } else {
    pipeline::SyntheticStage1Spec spec;
    spec.frames = static_cast<int>(s.integer("frames"));
    spec.utterances = static_cast<int>(s.integer("utterances"));
    spec.world_seed = static_cast<std::uint64_t>(s.integer("world-seed"));
    spec.teacher_seed = static_cast<std::uint64_t>(s.integer("teacher-seed"));
    data = pipeline::synthetic_stage1_data(spec, options.model.feature_dim, options.model.embed_dim, options.seed);
  }

  const auto result = pipeline::train_stage1(data, options, ctx.progress);
  const fs::path out = s.path("out-dir");
  tokenizer::save_seq_model(out, result.model);
  result.log.write_tsv(out / "loss.tsv");
  write_json(out / "summary.json", {{"stage", 1},
                                    {"steps", options.steps},
                                    {"initial_loss", result.log.initial},
                                    {"final_loss", result.log.final},
                                    {"ratio", result.log.final / result.log.initial}});
  ctx.out << "stage 1: loss " << result.log.initial << " -> " << result.log.final << " (ratio "
          << result.log.final / result.log.initial << ")\n";
  return kExitOk;
}

int cmd_train_stage2(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto distilled = load_stage1(s.path("stage1"));
  pipeline::Stage2Options options;
  apply_dims(options.model.trunk, s);
  options.model.codebook_size = codebook_size(distilled);
  options.model.mel_bins = distilled.config().feature_dim;
  options.steps = static_cast<int>(s.integer("steps"));
  options.lr = s.real("lr");
  options.batch = static_cast<int>(s.integer("batch"));
  options.mask = {s.real("mask-min"), s.real("mask-max")};
  options.seed = seed_of(s);

  std::vector<flow::FlowExample> train, val;
  if (s.has("manifest")) {
    const auto records = corpus::load_manifest(s.path("manifest"));
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& r = records[k];
      Matrix mel = corpus::load_features(r.audio_path, {}).values;
      auto tokens = tokenizer::tokenize(distilled, mel).indices;
      // A normal-mode target is what w2n generation produces, and vice versa.
      const auto d = r.mode == corpus::Mode::kNormal ? flow::Direction::kW2n : flow::Direction::kN2w;
      (records.size() >= 2 && k % 10 == 9 ? val : train).push_back({std::move(tokens), std::move(mel), d});
    }
  } else {
    pipeline::SyntheticStage2Spec spec;
    spec.vocabulary = static_cast<int>(s.integer("vocabulary"));
    if (spec.vocabulary <= 0 || spec.vocabulary > options.model.codebook_size) {
      throw ConfigurationError("train-stage2: --vocabulary must be in [1, codebook size]");
    }
    spec.stride = options.model.codebook_size / spec.vocabulary;
    spec.train_utterances = static_cast<int>(s.integer("train-utterances"));
    spec.val_utterances = static_cast<int>(s.integer("val-utterances"));
    spec.frames = static_cast<int>(s.integer("frames"));
    spec.task_seed = static_cast<std::uint64_t>(s.integer("task-seed"));
    std::tie(train, val) = pipeline::synthetic_stage2_data(spec, options.model.mel_bins, options.seed);
  }

  const auto result = pipeline::train_stage2(train, val, options, ctx.progress);
  const fs::path out = s.path("out-dir");
  flow::save_flow_model(out, result.model);
  result.log.write_tsv(out / "loss.tsv");
  json summary = {{"stage", 2},
                  {"steps", options.steps},
                  {"initial_loss", result.log.initial},
                  {"final_loss", result.log.final},
                  {"val_utterances", val.size()}};
  if (!val.empty()) {
    summary["val_initial"] = result.val_initial;
    summary["val_final"] = result.val_final;
  }
  write_json(out / "summary.json", summary);
  ctx.out << "stage 2: training loss " << result.log.initial << " -> " << result.log.final;
  if (!val.empty()) ctx.out << ", validation " << result.val_initial << " -> " << result.val_final;
  ctx.out << '\n';
  return kExitOk;
}

int cmd_train_stage3(const Context& ctx) {
  const auto& s = ctx.settings;
  const Role role = tokenizer::parse_role(s.text("direction"));
  if (role == Role::kDistilled) throw UsageError("train-stage3: --direction must be n2w or w2n");
  const auto distilled = load_stage1(s.path("stage1"));
  const auto flow_model = load_stage2(s.path("stage2"));
  if (flow_model.config().codebook_size < codebook_size(distilled)) {
    throw ArgumentError("train-stage3: the stage-2 codebook is smaller than the stage-1 tokenizer's");
  }
  const bool pseudo_given = s.has("pseudo-manifest");
  if (role == Role::kW2n && !pseudo_given) {
    if (!s.has("n2w")) {
      throw DependencyError(
          "w2n training needs the n2w tokenizer: run train-stage3 --direction n2w and pass --n2w, or supply "
          "--pseudo-manifest");
    }
    load_n2w(s.path("n2w"));
  }

  std::string mode_text = s.text("data-mode");
  if (mode_text == "auto") mode_text = role == Role::kW2n && pseudo_given ? "a+p" : "aligned";
  const auto mode = corpus::parse_ablation_mode(mode_text);
  const bool uses_pseudo = mode == corpus::AblationMode::kPseudo || mode == corpus::AblationMode::kAPlusP;
  if (role == Role::kN2w && uses_pseudo) throw UsageError("train-stage3: n2w trains on real pairs only");

  std::vector<corpus::TrainingPair> real, pseudo, held_out;
  const std::uint64_t seed = seed_of(s);
  if (s.flag("synthetic")) {
    pipeline::SyntheticPairSpec spec;
    spec.utterances = static_cast<int>(s.integer("pairs"));
    spec.frames = static_cast<int>(s.integer("frames"));
    spec.world_seed = static_cast<std::uint64_t>(s.integer("world-seed"));
    real = pipeline::synthetic_pairs(spec, distilled.config().feature_dim, seed, "train");
    spec.utterances = 10;
    held_out = pipeline::synthetic_pairs(spec, distilled.config().feature_dim, seed, "val");
    if (pseudo_given) {
      corpus::AblationInputs inputs;
      inputs.pseudo = corpus::load_manifest(s.path("pseudo-manifest"));
      pseudo = corpus::make_ablation_config(corpus::AblationMode::kPseudo, inputs);
    }
  } else {
    corpus::AblationInputs inputs;
    if (s.has("manifest")) inputs.real = corpus::load_manifest(s.path("manifest"));
    if (pseudo_given) inputs.pseudo = corpus::load_manifest(s.path("pseudo-manifest"));
    inputs.aligned_dir = s.path("aligned-dir");
    inputs.seed = seed;
    for (auto& p : corpus::make_ablation_config(mode, inputs)) (p.origin == "pseudo" ? pseudo : real).push_back(std::move(p));
  }

  pipeline::Stage3Options options;
  options.role = role;
  options.lambda = s.real("lambda");
  options.steps = static_cast<int>(s.integer("steps"));
  options.lr = s.real("lr");
  options.batch = static_cast<int>(s.integer("batch"));
  options.crop = static_cast<int>(s.integer("crop"));
  options.real_fraction = s.real("real-fraction");
  options.seed = seed;
  const auto real_d = pipeline::directional_pairs(distilled, real, role);
  const auto pseudo_d = pipeline::directional_pairs(distilled, pseudo, role);
  if (ctx.progress) {
    ctx.progress("stage3 " + std::string(tokenizer::role_name(role)) + ": " + std::to_string(real_d.size()) +
                 " real pairs, " + std::to_string(pseudo_d.size()) + " pseudo pairs");
  }
  const auto result = pipeline::train_stage3(distilled, real_d, pseudo_d, options, ctx.progress);

  const fs::path out = s.path("out-dir");
  tokenizer::save_seq_model(out, result.model);
  result.log.write_tsv(out / "loss.tsv");
  json summary = {{"stage", 3},
                  {"direction", std::string(tokenizer::role_name(role))},
                  {"real_pairs", real_d.size()},
                  {"pseudo_pairs", pseudo_d.size()},
                  {"steps", options.steps},
                  {"initial_loss", result.log.initial},
                  {"final_loss", result.log.final}};
  ctx.out << "stage 3 " << tokenizer::role_name(role) << ": loss " << result.log.initial << " -> " << result.log.final
          << '\n';
  if (!held_out.empty()) {
    const auto val = pipeline::directional_pairs(distilled, held_out, role);
    const double converted = pipeline::conversion_mse(result.model, val);
    const double passthrough = pipeline::passthrough_mse(distilled, val);
    summary["val_conversion_mse"] = converted;
    summary["val_passthrough_mse"] = passthrough;
    ctx.out << "held-out MSE " << converted << " (pass-through " << passthrough << ")\n";
  }
  write_json(out / "summary.json", summary);
  return kExitOk;
}

int cmd_gen_pseudo(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto n2w = load_n2w(s.path("n2w"));
  const auto distilled = load_stage1(s.path("stage1"));
  const auto flow_model = load_stage2(s.path("stage2"));
  const auto manifest = corpus::load_manifest(s.path("manifest"));
  const fs::path out = s.path("out-dir");

  corpus::PseudoOptions options;
  options.sampler_steps = static_cast<int>(s.integer("sampler-steps"));
  options.prompt_frames = static_cast<int>(s.integer("prompt-frames"));
  options.griffin_lim_iterations = static_cast<int>(s.integer("gl-iters"));
  options.seed = seed_of(s);
  const long limit = s.integer("limit");

  const auto prompts = corpus::longest_normal_prompts(manifest, dsp::wav_duration);
  corpus::Manifest generated;
  std::vector<std::pair<std::string, std::string>> failures;
  long done = 0;
  for (const auto& r : manifest) {
    if (r.mode != corpus::Mode::kNormal || r.provenance != corpus::Provenance::kReal) continue;
    if (limit > 0 && done >= limit) break;
    ++done;
    const auto prompt = prompts.find(r.speaker);
    try {
      auto pair = corpus::gen_pseudo_pair(r, n2w, distilled, flow_model,
                                          prompt == prompts.end() ? nullptr : &prompt->second, out, options);
      generated.push_back(std::move(pair.pseudo_whisper));
      generated.push_back(std::move(pair.pseudo_normal));
      if (ctx.progress) ctx.progress("gen-pseudo " + r.id);
    } catch (const DependencyError&) {
      throw;
    } catch (const Error& e) {
      failures.emplace_back(r.id, e.what());
    }
  }
  corpus::write_manifest(out / "pseudo_manifest.tsv", generated);
  ctx.out << "pseudo pairs: " << generated.size() / 2 << ", failures: " << failures.size() << '\n';
  for (const auto& [id, message] : failures) ctx.out << "failed " << id << ": " << message << '\n';
  return !failures.empty() && s.flag("strict") ? kExitPartial : kExitOk;
}

int cmd_eval(const Context& ctx) {
  const auto& s = ctx.settings;
  metrics::EvalOptions options;
  if (s.has("hypotheses")) options.hypotheses = metrics::read_hypotheses(s.path("hypotheses"));
  if (s.has("embeddings")) {
    options.embeddings = metrics::embedding_files(s.path("embeddings"));
    options.sim_label = "SIM";
  }
  const auto report =
      metrics::evaluate(corpus::load_manifest(s.path("converted")), corpus::load_manifest(s.path("reference")), options);
  const fs::path out = s.path("out-dir");
  const std::string table = metrics::format_report(report);
  write_text(out / "report.txt", table);
  std::ostringstream jsonl;
  metrics::write_report_jsonl(jsonl, report);
  write_text(out / "metrics.jsonl", jsonl.str());
  ctx.out << table;
  return kExitOk;
}

int cmd_stats(const Context& ctx) {
  const auto& s = ctx.settings;
  corpus::CorpusStats total;
  for (const auto& path : split_commas(s.text("manifest"))) total += corpus::corpus_stats(corpus::load_manifest(path));
  for (const auto& w : total.warnings) ctx.err << "warning: " << w << '\n';
  const std::string table = corpus::format_stats_table(total);
  if (s.has("out")) write_text(s.path("out"), table);
  ctx.out << table;
  return kExitOk;
}

int cmd_scale_study(const Context& ctx) {
  const auto& s = ctx.settings;
  pipeline::ScaleStudyOptions o;
  o.tiers = s.int_list("tiers");
  o.seeds = static_cast<int>(s.integer("seeds"));
  o.seed = seed_of(s);
  o.normal_pool = static_cast<int>(s.integer("pool"));
  o.real_pairs = static_cast<int>(s.integer("real-pairs"));
  o.val_pairs = static_cast<int>(s.integer("val-pairs"));
  o.frames = static_cast<int>(s.integer("frames"));
  o.stage1_steps = static_cast<int>(s.integer("stage1-steps"));
  o.pretrain_steps = static_cast<int>(s.integer("pretrain-steps"));
  o.sft_steps = static_cast<int>(s.integer("sft-steps"));
  o.lr = s.real("lr");
  o.sft_lr = s.real("sft-lr");
  o.batch = static_cast<int>(s.integer("batch"));
  o.sft = !s.flag("skip-sft");
  const auto rows = pipeline::scale_study(o, ctx.progress);

  const fs::path out = s.path("out-dir");
  write_text(out / "scale_study.tsv", pipeline::format_scale_rows(rows));
  // Seed means per tier and setting, in first-appearance order.
  std::vector<std::pair<int, std::string>> order;
  std::map<std::pair<int, std::string>, std::pair<double, int>> sums;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.tier, r.setting);
    if (!sums.count(key)) order.push_back(key);
    sums[key].first += r.value;
    ++sums[key].second;
  }
  std::ostringstream table;
  table << "tier\tsetting\tmean_val_loss\tseeds\n";
  for (const auto& key : order) {
    const auto& [sum, n] = sums[key];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", sum / n);
    table << key.first << '\t' << key.second << '\t' << buf << '\t' << n << '\n';
  }
  write_text(out / "tiers.tsv", table.str());
  ctx.out << table.str();
  return kExitOk;
}

}  // namespace murmur::cli
