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
#include <string>
#include <utility>
#include <vector>

#include "murmur/corpus/ablation.hpp"
#include "murmur/flow/cfm.hpp"
#include "murmur/flow/model.hpp"
#include "murmur/synth/world.hpp"
#include "murmur/tokenizer/model.hpp"
#include "murmur/tokenizer/training.hpp"

namespace murmur::pipeline {

/// Loss per optimizer step (the loss before that step's update).
struct TrainLog {
  std::vector<std::pair<int, double>> steps;
  double initial = 0.0;
  double final = 0.0;  // after the last update

  /// "# step<TAB>loss" header, one row per logged step, 17 significant digits.
  void write_tsv(const std::filesystem::path& path) const;
};

/// Reads a file written by TrainLog::write_tsv. Throws ParseError.
std::vector<std::pair<int, double>> read_loss_tsv(const std::filesystem::path& path);

using Progress = std::function<void(const std::string&)>;

// ---- Stage 1 -------------------------------------------------------------

struct Stage1Options {
  tokenizer::SeqModelConfig model = [] {
    tokenizer::SeqModelConfig c;
    c.trunk.dim_model = 32;
    c.trunk.dim_ff = 64;
    c.trunk.layers = 1;
    return c;
  }();
  int steps = 500;
  double lr = 1e-4;
  std::uint64_t seed = 0;
};

struct Stage1Result {
  tokenizer::SeqModel model;
  TrainLog log;
};

/// Full-batch distillation with Adam; normalization fitted on the features.
Stage1Result train_stage1(const std::vector<tokenizer::DistillExample>& data, const Stage1Options& options,
                          const Progress& progress = {});

struct SyntheticStage1Spec {
  int frames = 2000;
  int utterances = 20;
  std::uint64_t world_seed = 1;
  std::uint64_t teacher_seed = 1;
  int teacher_hidden = 32;
};

/// Normal-mode FeatureWorld utterances labelled by a SyntheticTeacher.
std::vector<tokenizer::DistillExample> synthetic_stage1_data(const SyntheticStage1Spec& spec, int feature_dim,
                                                             int embed_dim, std::uint64_t seed);

/// The FeatureWorld used by the synthetic stage-1 and stage-3 modes.
synth::FeatureWorld synthetic_world(int feature_dim, std::uint64_t world_seed);

// ---- Stage 2 -------------------------------------------------------------

struct Stage2Options {
  flow::FlowConfig model = [] {
    flow::FlowConfig c;
    c.trunk.dim_model = 64;
    c.trunk.dim_ff = 128;
    c.trunk.layers = 1;
    return c;
  }();
  int steps = 2000;
  double lr = 2e-3;
  int batch = 4;
  flow::MaskPolicy mask;
  std::uint64_t seed = 0;
};

struct Stage2Result {
  flow::FlowModel model;
  TrainLog log;
  double val_initial = 0.0;  // fixed validation batches, before training
  double val_final = 0.0;
};

/// Mels are raw; the model's normalization is fitted on the training mels.
/// Each step draws `batch` random examples and one mask/t/noise per example.
Stage2Result train_stage2(const std::vector<flow::FlowExample>& train, const std::vector<flow::FlowExample>& val,
                          const Stage2Options& options, const Progress& progress = {});

struct SyntheticStage2Spec {
  int vocabulary = 32;
  int stride = 31;  // token ids are multiples of the stride inside the codebook
  int train_utterances = 64;
  int val_utterances = 16;
  int frames = 40;
  std::uint64_t task_seed = 1;
};

/// Deterministic token -> mel task; directions alternate.
std::pair<std::vector<flow::FlowExample>, std::vector<flow::FlowExample>> synthetic_stage2_data(
    const SyntheticStage2Spec& spec, int mel_bins, std::uint64_t seed);

// ---- Stage 3 -------------------------------------------------------------

struct Stage3Options {
  tokenizer::Role role = tokenizer::Role::kN2w;
  double lambda = 1.0;
  int steps = 400;
  double lr = 1e-3;
  int batch = 4;
  int crop = 64;               // frames per item; 0 uses whole utterances
  double real_fraction = -1.0;  // probability of drawing a real pair; < 0 = uniform over all pairs
  std::uint64_t seed = 0;
};

/// Source/target view of a whisper/normal pair for a direction.
struct DirectionalPair {
  Matrix primary;      // source-mode features
  Matrix consistency;  // target-mode features
  Matrix target;       // dequantized distilled tokens of the target-mode member
};

/// w2n: primary = whisper, target = T(normal). n2w: the reverse.
std::vector<DirectionalPair> directional_pairs(const tokenizer::SeqModel& distilled,
                                               const std::vector<corpus::TrainingPair>& pairs, tokenizer::Role role);

struct Stage3Result {
  tokenizer::SeqModel model;
  TrainLog log;
};

/// Unified-tokenizer training initialized from the distilled model.
Stage3Result train_stage3(const tokenizer::SeqModel& distilled, const std::vector<DirectionalPair>& real,
                          const std::vector<DirectionalPair>& pseudo, const Stage3Options& options,
                          const Progress& progress = {});

/// Continues training an existing unified model (used for fine-tuning).
void continue_stage3(tokenizer::SeqModel& model, const std::vector<DirectionalPair>& real,
                     const std::vector<DirectionalPair>& pseudo, const Stage3Options& options, TrainLog& log,
                     const Progress& progress = {});

/// Mean over pairs of |f(primary) - target|^2 (frame means).
double conversion_mse(const tokenizer::SeqModel& model, const std::vector<DirectionalPair>& pairs);
/// The pass-through baseline: the distilled tokenizer applied to the source features.
double passthrough_mse(const tokenizer::SeqModel& distilled, const std::vector<DirectionalPair>& pairs);

struct SyntheticPairSpec {
  int utterances = 40;
  int frames = 60;
  double whisper_noise = 0.0;  // extra independent noise on the whisper member
  std::uint64_t world_seed = 1;
};

/// FeatureWorld whisper/normal twins: whisper = warp(normal) (+ noise).
std::vector<corpus::TrainingPair> synthetic_pairs(const SyntheticPairSpec& spec, int feature_dim, std::uint64_t seed,
                                                  const std::string& prefix = "syn");

// ---- Scaling study -------------------------------------------------------

struct ScaleStudyOptions {
  std::vector<int> tiers{200, 1000, 2000};
  int seeds = 3;
  std::uint64_t seed = 0;
  int normal_pool = 2000;   // normal utterances available for pseudo generation
  int real_pairs = 100;     // real aligned pairs (n2w fit and fine-tuning)
  int val_pairs = 10;       // held-out real pairs
  int frames = 8;           // frames per utterance
  double whisper_noise = 0.3;
  double real_distortion = 1.0;  // w += c tanh(w) on real whispers
  int feature_dim = 80;
  int stage1_steps = 300;
  int stage1_frames = 1000;
  int pretrain_steps = 2000;
  int sft_steps = 300;
  double lr = 1e-3;
  double sft_lr = 5e-4;
  int batch = 8;
  bool sft = true;  // also fine-tune on the real pairs
  tokenizer::SeqModelConfig model = Stage1Options{}.model;
};

struct ScaleRow {
  int tier = 0;
  std::string setting;  // "pretrain" or "pretrain+sft"
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

/// Pseudo-data scaling on the synthetic world. Per seed: stage-1 distillation,
/// an n2w feature map fitted by ridge regression on the real pairs (the
/// pseudo generator), pseudo whispers for `tier` pool utterances, w2n
/// pretraining on them, validation, then fine-tuning on the real pairs and
/// validation again. Throws ConfigurationError when a tier exceeds the pool.
std::vector<ScaleRow> scale_study(const ScaleStudyOptions& options, const Progress& progress = {});

/// Header "tier<TAB>setting<TAB>seed<TAB>metric<TAB>value" plus rows.
std::string format_scale_rows(const std::vector<ScaleRow>& rows);
inline constexpr const char* kScaleHeader = "tier\tsetting\tseed\tmetric\tvalue";

}  // namespace murmur::pipeline
