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


#include "murmur/cli/registry.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "murmur/common/errors.hpp"

namespace murmur::cli {

namespace {

using K = FlagKind;

FlagSpec req(std::string name, std::string help) { return {std::move(name), K::kString, "", std::move(help), true}; }
FlagSpec str(std::string name, std::string def, std::string help) {
  return {std::move(name), K::kString, std::move(def), std::move(help), false};
}
FlagSpec num(std::string name, std::string def, std::string help) {
  return {std::move(name), K::kInt, std::move(def), std::move(help), false};
}
FlagSpec real(std::string name, std::string def, std::string help) {
  return {std::move(name), K::kReal, std::move(def), std::move(help), false};
}
FlagSpec boolean(std::string name, std::string help) {
  return {std::move(name), K::kBool, "false", std::move(help), false};
}

std::vector<FlagSpec> with_common(std::vector<FlagSpec> flags) {
  flags.push_back(num("seed", "0", "master seed; component seeds are derived from it"));
  flags.push_back(str("config", "", "key = value file; command-line flags override it"));
  flags.push_back(boolean("quiet", "suppress progress output on stderr"));
  return flags;
}

std::vector<FlagSpec> tokenizer_dims(const char* dim, const char* ff, const char* layers) {
  return {num("dim", dim, "model width"),
          num("ff", ff, "feed-forward width"),
          num("layers", layers, "trunk blocks"),
          num("heads", "4", "attention heads")};
}

std::vector<CommandSpec> build() {
  std::vector<CommandSpec> c;

  c.push_back({"align", "build the frame-aligned whisper/normal corpus",
               with_common({req("manifest", "paired manifest (TSV)"), req("out-dir", "output directory"),
                            num("radius", "5", "FastDTW radius"),
                            str("distance", "euclidean", "frame distance: euclidean, sqeuclidean, manhattan, cosine"),
                            str("posteriors", "", "directory of <id>.post log-posteriorgrams for word metadata"),
                            str("vocab", "", "posteriorgram vocabulary file, one symbol per line, blank first"),
                            boolean("force", "recompute pairs whose outputs exist"),
                            boolean("strict", "exit 4 when any pair fails")})});

  {
    auto f = std::vector<FlagSpec>{req("out-dir", "checkpoint directory"),
                                   str("manifest", "", "training manifest; synthetic data when empty"),
                                   str("teacher-dir", "", "directory of <id>.wft teacher embeddings (with --manifest)")};
    for (auto& d : tokenizer_dims("32", "64", "1")) f.push_back(d);
    f.push_back(str("fsq-levels", "8,5,5,5", "FSQ levels per dimension"));
    f.push_back(num("steps", "500", "Adam steps (full batch)"));
    f.push_back(real("lr", "1e-4", "learning rate"));
    f.push_back(num("frames", "2000", "synthetic frames"));
    f.push_back(num("utterances", "20", "synthetic utterances"));
    f.push_back(num("world-seed", "1", "synthetic feature world"));
    f.push_back(num("teacher-seed", "1", "synthetic teacher"));
    c.push_back({"train-stage1", "distill the semantic tokenizer", with_common(std::move(f))});
  }

  {
    auto f = std::vector<FlagSpec>{req("stage1", "stage-1 checkpoint directory"), req("out-dir", "checkpoint directory"),
                                   str("manifest", "", "training manifest; synthetic token->mel task when empty")};
    for (auto& d : tokenizer_dims("64", "128", "1")) f.push_back(d);
    f.push_back(num("steps", "2000", "Adam steps"));
    f.push_back(real("lr", "2e-3", "learning rate"));
    f.push_back(num("batch", "4", "utterances per step"));
    f.push_back(real("mask-min", "0.4", "smallest masked fraction"));
    f.push_back(real("mask-max", "0.9", "largest masked fraction"));
    f.push_back(num("train-utterances", "64", "synthetic training utterances"));
    f.push_back(num("val-utterances", "16", "synthetic validation utterances"));
    f.push_back(num("frames", "40", "synthetic frames per utterance"));
    f.push_back(num("vocabulary", "32", "synthetic token types"));
    f.push_back(num("task-seed", "1", "synthetic token->mel map"));
    c.push_back({"train-stage2", "train the flow-matching acoustic model", with_common(std::move(f))});
  }

  c.push_back(
      {"train-stage3", "train a unified direction tokenizer",
       with_common({req("direction", "n2w or w2n"), req("stage1", "stage-1 checkpoint directory"),
                    req("stage2", "stage-2 checkpoint directory"), req("out-dir", "checkpoint directory"),
                    str("n2w", "", "n2w checkpoint directory (needed for w2n without --pseudo-manifest)"),
                    str("pseudo-manifest", "", "pseudo-parallel manifest from gen-pseudo"),
                    str("aligned-dir", "", "aligned corpus from align"),
                    str("manifest", "", "real paired manifest (raw and dsp modes)"),
                    str("data-mode", "auto", "raw, dsp, aligned, pseudo, a+p; auto picks aligned (n2w) or a+p (w2n)"),
                    real("real-fraction", "-1", "probability of drawing a real pair; negative = uniform"),
                    real("lambda", "1", "consistency weight"), num("steps", "400", "Adam steps"),
                    real("lr", "1e-3", "learning rate"), num("batch", "4", "pairs per step"),
                    num("crop", "64", "frames per pair per step; 0 = whole pairs"),
                    boolean("synthetic", "train on synthetic feature-world pairs"),
                    num("pairs", "40", "synthetic training pairs"), num("frames", "60", "synthetic frames per pair"),
                    num("world-seed", "1", "synthetic feature world")})});

  c.push_back({"gen-pseudo", "generate pseudo whispers from normal speech",
               with_common({req("n2w", "n2w checkpoint directory"), req("stage1", "stage-1 checkpoint directory"),
                            req("stage2", "stage-2 checkpoint directory"), req("manifest", "manifest of normal speech"),
                            req("out-dir", "output directory"), num("sampler-steps", "10", "Euler steps"),
                            num("prompt-frames", "100", "longest timbre prompt"),
                            num("gl-iters", "32", "Griffin-Lim iterations"),
                            num("limit", "0", "process at most this many records; 0 = all"),
                            boolean("strict", "exit 4 when any record fails")})});

  c.push_back({"eval", "score converted speech against references",
               with_common({req("converted", "manifest of converted speech"),
                            req("reference", "manifest of reference speech (matched by id)"),
                            req("out-dir", "output directory"),
                            str("hypotheses", "", "TSV of id and ASR hypothesis; transcripts used when empty"),
                            str("embeddings", "", "directory of <id>.emb speaker embeddings; spectral proxy when empty")})});

  c.push_back({"stats", "corpus statistics by provenance and language",
               with_common({req("manifest", "manifest path(s), comma separated"),
                            str("out", "", "also write the table to this file")})});

  c.push_back({"scale-study", "pseudo-data scaling study on the synthetic world",
               with_common({req("out-dir", "output directory"), str("tiers", "200,1000,2000", "pseudo pairs per tier"),
                            num("seeds", "3", "seeds per tier"), num("pool", "2000", "available pseudo pairs"),
                            num("real-pairs", "100", "real pairs for the generator and fine-tuning"),
                            num("val-pairs", "10", "held-out real pairs"), num("frames", "8", "frames per utterance"),
                            num("stage1-steps", "300", "distillation steps per seed"),
                            num("pretrain-steps", "2000", "pretraining steps"), num("sft-steps", "300", "fine-tuning steps"),
                            real("lr", "1e-3", "pretraining learning rate"), real("sft-lr", "5e-4", "fine-tuning learning rate"),
                            num("batch", "8", "pairs per step"), boolean("skip-sft", "pretraining rows only")})});
  return c;
}

long parse_long(const std::string& name, const std::string& v) {
  long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigurationError("--" + name + ": expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& name, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) throw ConfigurationError("--" + name + ": expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& name, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigurationError("--" + name + ": expected true or false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

const FlagSpec* find_flag(const CommandSpec& command, const std::string& name) {
  for (const auto& f : command.flags) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<CommandSpec>& command_registry() {
  static const std::vector<CommandSpec> registry = build();
  return registry;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : command_registry()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

std::string default_note(const FlagSpec& flag) {
  if (flag.required) return "(required)";
  return "(default: " + (flag.default_value.empty() ? std::string("none") : flag.default_value) + ")";
}

Settings::Settings(const CommandSpec& command, std::map<std::string, std::string> values)
    : command_(&command), values_(std::move(values)) {}

const std::string& Settings::text(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw ArgumentError("no flag --" + name + " for " + command_->name);
  return it->second;
}

long Settings::integer(const std::string& name) const { return parse_long(name, text(name)); }
double Settings::real(const std::string& name) const { return parse_double(name, text(name)); }
bool Settings::flag(const std::string& name) const { return parse_bool(name, text(name)); }

std::vector<int> Settings::int_list(const std::string& name) const {
  std::vector<int> out;
  std::stringstream ss(text(name));
  std::string piece;
  while (std::getline(ss, piece, ',')) out.push_back(static_cast<int>(parse_long(name, trim(piece))));
  if (out.empty()) throw ConfigurationError("--" + name + ": expected a comma-separated list");
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path, const CommandSpec& command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(where + ": empty key");
    const FlagSpec* flag = find_flag(command, key);
    if (flag == nullptr || key == "config") {
      throw ConfigurationError(where + ": unknown key '" + key + "' for " + command.name);
    }
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

Settings resolve_settings(const CommandSpec& command, const std::map<std::string, std::string>& from_file,
                          const std::map<std::string, std::string>& from_command_line) {
  std::map<std::string, std::string> values;
  for (const auto& f : command.flags) values[f.name] = f.default_value;
  for (const auto* layer : {&from_file, &from_command_line}) {
    for (const auto& [k, v] : *layer) {
      if (!find_flag(command, k)) throw ConfigurationError("unknown option '" + k + "' for " + command.name);
      values[k] = v;
    }
  }
  for (const auto& f : command.flags) {
    const std::string& v = values[f.name];
    if (f.required && v.empty()) throw UsageError(command.name + ": --" + f.name + " is required");
    if (v.empty()) continue;
    switch (f.kind) {
      case FlagKind::kInt: parse_long(f.name, v); break;
      case FlagKind::kReal: parse_double(f.name, v); break;
      case FlagKind::kBool: parse_bool(f.name, v); break;
      case FlagKind::kString: break;
    }
  }
  return Settings(command, std::move(values));
}

}  // namespace murmur::cli
