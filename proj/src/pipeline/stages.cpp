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


#include "murmur/pipeline/stages.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>

#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/tokenizer/teacher.hpp"

namespace murmur::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fmt_loss(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void report(const Progress& progress, const std::string& stage, int step, int steps, double loss) {
  if (!progress) return;
  const int every = std::max(1, steps / 10);
  if (step % every != 0 && step + 1 != steps) return;
  progress(stage + " step " + std::to_string(step + 1) + "/" + std::to_string(steps) + " loss " + fmt_loss(loss));
}

void require_finite(double loss, const std::string& stage, int step) {
  if (!std::isfinite(loss)) throw NumericError(stage + ": non-finite loss at step " + std::to_string(step));
}

}  // namespace

void TrainLog::write_tsv(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# step\tloss\n";
  for (const auto& [step, loss] : steps) out << step << '\t' << fmt_loss(loss) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::pair<int, double>> read_loss_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::pair<int, double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream is(line);
    int step = 0;
    double loss = 0.0;
    char tab = 0;
    if (!(is >> step) || !is.get(tab) || tab != '\t' || !(is >> loss) || !(is >> std::ws).eof()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected step<TAB>loss");
    }
    rows.emplace_back(step, loss);
  }
  return rows;
}

// ---- Stage 1 -------------------------------------------------------------

synth::FeatureWorld synthetic_world(int feature_dim, std::uint64_t world_seed) {
  return synth::FeatureWorld({feature_dim, 16, 0.3}, world_seed);
}

std::vector<tokenizer::DistillExample> synthetic_stage1_data(const SyntheticStage1Spec& spec, int feature_dim,
                                                             int embed_dim, std::uint64_t seed) {
  if (spec.utterances <= 0 || spec.frames < spec.utterances) throw ArgumentError("stage-1 data: too few frames");
  const auto world = synthetic_world(feature_dim, spec.world_seed);
  const tokenizer::SyntheticTeacher teacher(feature_dim, embed_dim, spec.teacher_seed, spec.teacher_hidden);
  Rng rng("stage1.data", seed);
  std::vector<tokenizer::DistillExample> data;
  for (int u = 0; u < spec.utterances; ++u) {
    const auto script = synth::random_script(rng, world.config().phones, spec.frames / spec.utterances);
    Matrix x = world.render(script, rng);
    Matrix z = teacher.embed(x);
    data.push_back({std::move(x), std::move(z)});
  }
  return data;
}

Stage1Result train_stage1(const std::vector<tokenizer::DistillExample>& data, const Stage1Options& options,
                          const Progress& progress) {
  if (data.empty()) throw ArgumentError("stage 1: no training data");
  if (options.steps <= 0) throw ArgumentError("stage 1: steps must be positive");
  Stage1Result result{tokenizer::SeqModel(options.model, tokenizer::Role::kDistilled,
                                          derive_seed("stage1.init", options.seed)),
                      {}};
  std::vector<Matrix> frames;
  for (const auto& d : data) frames.push_back(d.features);
  result.model.fit_normalization(frames);

  nn::Adam adam(nn::AdamConfig{options.lr});
  const auto objective = tokenizer::distill_objective(data);
  for (int s = 0; s < options.steps; ++s) {
    const double loss = tokenizer::train_step(result.model, adam, objective);
    require_finite(loss, "stage 1", s);
    result.log.steps.emplace_back(s, loss);
    report(progress, "stage1", s, options.steps, loss);
  }
  nn::Tape tape(false);
  result.log.initial = result.log.steps.front().second;
  result.log.final = objective(tape, result.model).value()(0, 0);
  return result;
}

// ---- Stage 2 -------------------------------------------------------------

std::pair<std::vector<flow::FlowExample>, std::vector<flow::FlowExample>> synthetic_stage2_data(
    const SyntheticStage2Spec& spec, int mel_bins, std::uint64_t seed) {
  const synth::TokenMelTask task(mel_bins, spec.vocabulary, spec.task_seed);
  Rng rng("stage2.data", seed);
  const auto make = [&](int n) {
    std::vector<flow::FlowExample> v;
    for (int i = 0; i < n; ++i) {
      auto tokens = task.random_tokens(rng, spec.frames, spec.stride);
      const int d = i % 2;
      Matrix mel = task.mel(tokens, d, spec.stride);
      v.push_back({std::move(tokens), std::move(mel), d ? flow::Direction::kN2w : flow::Direction::kW2n});
    }
    return v;
  };
  auto train = make(spec.train_utterances);
  auto val = make(spec.val_utterances);
  return {std::move(train), std::move(val)};
}

Stage2Result train_stage2(const std::vector<flow::FlowExample>& train, const std::vector<flow::FlowExample>& val,
                          const Stage2Options& options, const Progress& progress) {
  if (train.empty()) throw ArgumentError("stage 2: no training data");
  if (options.steps <= 0 || options.batch <= 0) throw ArgumentError("stage 2: steps and batch must be positive");
  Stage2Result result{flow::FlowModel(options.model, derive_seed("stage2.init", options.seed)), {}, 0.0, 0.0};
  auto& model = result.model;
  std::vector<Matrix> mels;
  for (const auto& e : train) mels.push_back(e.mel);
  model.fit_normalization(mels);

  const auto normalized = [&](const std::vector<flow::FlowExample>& in) {
    auto out = in;
    for (auto& e : out) e.mel = model.normalize(e.mel);
    return out;
  };
  const auto train_n = normalized(train);
  const auto val_n = normalized(val);
  Rng val_rng("stage2.val", options.seed);
  std::vector<flow::FlowBatch> val_batches;
  for (const auto& e : val_n) val_batches.push_back(flow::make_flow_batch(e, val_rng, options.mask));
  if (!val_batches.empty()) result.val_initial = flow::cfm_loss(model, val_batches);

  nn::Adam adam(nn::AdamConfig{options.lr});
  Rng rng("stage2.batches", options.seed);
  for (int s = 0; s < options.steps; ++s) {
    std::vector<flow::FlowBatch> batch;
    for (int k = 0; k < options.batch; ++k) {
      batch.push_back(flow::make_flow_batch(train_n[rng.below(train_n.size())], rng, options.mask));
    }
    const double loss = flow::flow_train_step(model, adam, batch);
    require_finite(loss, "stage 2", s);
    result.log.steps.emplace_back(s, loss);
    report(progress, "stage2", s, options.steps, loss);
  }
  result.log.initial = result.log.steps.front().second;
  result.log.final = result.log.steps.back().second;
  if (!val_batches.empty()) result.val_final = flow::cfm_loss(model, val_batches);
  return result;
}

// ---- Stage 3 -------------------------------------------------------------

std::vector<DirectionalPair> directional_pairs(const tokenizer::SeqModel& distilled,
                                               const std::vector<corpus::TrainingPair>& pairs, tokenizer::Role role) {
  if (role == tokenizer::Role::kDistilled) throw UsageError("directional pairs need a w2n or n2w role");
  std::vector<DirectionalPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.whisper.rows() != p.normal.rows()) {
      throw AlignmentRequiredError("pair " + p.id + " is not frame aligned (" + std::to_string(p.whisper.rows()) +
                                   " vs " + std::to_string(p.normal.rows()) + " frames)");
    }
    const bool w2n = role == tokenizer::Role::kW2n;
    const Matrix& source = w2n ? p.whisper : p.normal;
    const Matrix& target = w2n ? p.normal : p.whisper;
    out.push_back({source, target, tokenizer::tokenize(distilled, target).dequantized});
  }
  return out;
}

namespace {

tokenizer::UnifiedExample crop_example(const DirectionalPair& p, int crop, Rng& rng) {
  const Eigen::Index frames = p.primary.rows();
  if (crop <= 0 || frames <= crop) return {p.primary, p.consistency, p.target};
  const Eigen::Index start = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(frames - crop + 1)));
  return {p.primary.middleRows(start, crop), p.consistency.middleRows(start, crop), p.target.middleRows(start, crop)};
}

}  // namespace

void continue_stage3(tokenizer::SeqModel& model, const std::vector<DirectionalPair>& real,
                     const std::vector<DirectionalPair>& pseudo, const Stage3Options& options, TrainLog& log,
                     const Progress& progress) {
  if (real.empty() && pseudo.empty()) throw ArgumentError("stage 3: no training pairs");
  if (options.steps <= 0 || options.batch <= 0) throw ArgumentError("stage 3: steps and batch must be positive");
  if (options.real_fraction > 1.0) throw ArgumentError("stage 3: real fraction must be at most 1");
  if (model.role() != options.role) throw UsageError("stage 3: model role does not match the requested direction");
  const std::string stage = "stage3 " + std::string(tokenizer::role_name(options.role));

  nn::Adam adam(nn::AdamConfig{options.lr});
  Rng rng("stage3.batches", options.seed);
  const std::size_t total = real.size() + pseudo.size();
  const auto draw = [&]() -> const DirectionalPair& {
    if (options.real_fraction < 0.0 || real.empty() || pseudo.empty()) {
      const std::size_t k = rng.below(total);
      return k < real.size() ? real[k] : pseudo[k - real.size()];
    }
    if (rng.uniform() < options.real_fraction) return real[rng.below(real.size())];
    return pseudo[rng.below(pseudo.size())];
  };
  const int offset = log.steps.empty() ? 0 : log.steps.back().first + 1;
  for (int s = 0; s < options.steps; ++s) {
    std::vector<tokenizer::UnifiedExample> batch;
    for (int k = 0; k < options.batch; ++k) batch.push_back(crop_example(draw(), options.crop, rng));
    const double loss = tokenizer::train_step(model, adam, tokenizer::unified_objective(std::move(batch), options.lambda));
    require_finite(loss, stage, s);
    log.steps.emplace_back(offset + s, loss);
    report(progress, stage, s, options.steps, loss);
  }
  log.initial = log.steps.front().second;
  log.final = log.steps.back().second;
}

Stage3Result train_stage3(const tokenizer::SeqModel& distilled, const std::vector<DirectionalPair>& real,
                          const std::vector<DirectionalPair>& pseudo, const Stage3Options& options,
                          const Progress& progress) {
  if (distilled.role() != tokenizer::Role::kDistilled) throw UsageError("stage 3 starts from the distilled tokenizer");
  Stage3Result result{distilled.with_role(options.role), {}};
  continue_stage3(result.model, real, pseudo, options, result.log, progress);
  return result;
}

namespace {

double mean_sq(const Matrix& a, const Matrix& b) { return (a - b).rowwise().squaredNorm().mean(); }

}  // namespace

double conversion_mse(const tokenizer::SeqModel& model, const std::vector<DirectionalPair>& pairs) {
  if (pairs.empty()) throw ArgumentError("conversion_mse: no pairs");
  double sum = 0.0;
  for (const auto& p : pairs) sum += mean_sq(model.forward(p.primary), p.target);
  return sum / static_cast<double>(pairs.size());
}

double passthrough_mse(const tokenizer::SeqModel& distilled, const std::vector<DirectionalPair>& pairs) {
  return conversion_mse(distilled, pairs);
}

std::vector<corpus::TrainingPair> synthetic_pairs(const SyntheticPairSpec& spec, int feature_dim, std::uint64_t seed,
                                                  const std::string& prefix) {
  const auto world = synthetic_world(feature_dim, spec.world_seed);
  Rng rng("synthetic.pairs:" + prefix, seed);
  std::vector<corpus::TrainingPair> out;
  for (int u = 0; u < spec.utterances; ++u) {
    const auto script = synth::random_script(rng, world.config().phones, spec.frames);
    Matrix normal = world.render(script, rng);
    Matrix whisper = world.whisperize(normal);
    if (spec.whisper_noise > 0.0) {
      for (Eigen::Index i = 0; i < whisper.size(); ++i) whisper.data()[i] += spec.whisper_noise * rng.normal();
    }
    char id[32];
    std::snprintf(id, sizeof id, "%04d", u);
    out.push_back({prefix + id, std::move(whisper), std::move(normal), "synthetic"});
  }
  return out;
}

// ---- Scaling study -------------------------------------------------------

namespace {

// Ridge least squares for y ~ [x 1] W over all frames.
Matrix fit_affine(const std::vector<corpus::TrainingPair>& pairs, double ridge) {
  const Eigen::Index d = pairs.front().normal.cols();
  Matrix xtx = Matrix::Zero(d + 1, d + 1), xty = Matrix::Zero(d + 1, pairs.front().whisper.cols());
  for (const auto& p : pairs) {
    Matrix x(p.normal.rows(), d + 1);
    x.leftCols(d) = p.normal;
    x.col(d).setOnes();
    xtx.noalias() += x.transpose() * x;
    xty.noalias() += x.transpose() * p.whisper;
  }
  xtx.diagonal().array() += ridge;
  return xtx.ldlt().solve(xty);
}

Matrix apply_affine(const Matrix& w, const Matrix& x) {
  const Eigen::Index d = x.cols();
  return (x * w.topRows(d)).rowwise() + w.row(d);
}

}  // namespace

std::vector<ScaleRow> scale_study(const ScaleStudyOptions& o, const Progress& progress) {
  if (o.tiers.empty() || o.seeds <= 0) throw ConfigurationError("scale study: need at least one tier and one seed");
  if (!std::is_sorted(o.tiers.begin(), o.tiers.end())) throw ConfigurationError("scale study: tiers must ascend");
  for (int t : o.tiers) {
    if (t <= 0) throw ConfigurationError("scale study: tiers must be positive");
    if (t > o.normal_pool) {
      throw ConfigurationError("scale study: tier " + std::to_string(t) + " needs more pseudo pairs than the " +
                               std::to_string(o.normal_pool) + " available");
    }
  }
  if (o.real_pairs <= 0 || o.val_pairs <= 0) throw ConfigurationError("scale study: need real and validation pairs");

  std::vector<ScaleRow> rows;
  for (int k = 0; k < o.seeds; ++k) {
    const std::uint64_t seed = derive_seed("scale.seed:" + std::to_string(k), o.seed);
    const std::uint64_t world_seed = derive_seed("scale.world", seed);

    SyntheticStage1Spec s1spec;
    s1spec.frames = o.stage1_frames;
    s1spec.utterances = std::max(1, o.stage1_frames / 100);
    s1spec.world_seed = world_seed;
    s1spec.teacher_seed = derive_seed("scale.teacher", seed);
    Stage1Options s1;
    s1.model = o.model;
    s1.model.feature_dim = o.feature_dim;
    s1.steps = o.stage1_steps;
    s1.lr = o.lr;
    s1.seed = seed;
    const auto distilled = train_stage1(synthetic_stage1_data(s1spec, o.feature_dim, o.model.embed_dim, seed), s1).model;

    SyntheticPairSpec real_spec;
    real_spec.frames = o.frames;
    real_spec.whisper_noise = o.whisper_noise;
    real_spec.world_seed = world_seed;
    real_spec.utterances = o.real_pairs;
    // Real whispers carry a nonlinear distortion that an affine generator
    // cannot reproduce, leaving a gap for fine-tuning to close.
    const auto distort = [&](std::vector<corpus::TrainingPair> pairs) {
      for (auto& p : pairs) p.whisper += o.real_distortion * p.whisper.array().tanh().matrix();
      return pairs;
    };
    const auto real = distort(synthetic_pairs(real_spec, o.feature_dim, seed, "real"));
    real_spec.utterances = o.val_pairs;
    const auto val = directional_pairs(distilled, distort(synthetic_pairs(real_spec, o.feature_dim, seed, "val")),
                                       tokenizer::Role::kW2n);
    const auto real_w2n = directional_pairs(distilled, real, tokenizer::Role::kW2n);

    // Pseudo generator: affine n2w map fitted on the real pairs, applied to
    // a pool of normal utterances.
    // The generator samples: residual noise with the per-feature spread
    // left unexplained on the real pairs.
    const Matrix n2w = fit_affine(real, 1e-3);
    RowVector residual = RowVector::Zero(o.feature_dim);
    Eigen::Index residual_frames = 0;
    for (const auto& p : real) {
      residual += (p.whisper - apply_affine(n2w, p.normal)).array().square().colwise().sum().matrix();
      residual_frames += p.normal.rows();
    }
    residual = (residual / static_cast<double>(residual_frames)).cwiseSqrt();
    SyntheticPairSpec pool_spec = real_spec;
    pool_spec.utterances = o.normal_pool;
    pool_spec.whisper_noise = 0.0;
    auto pool = synthetic_pairs(pool_spec, o.feature_dim, seed, "pool");
    Rng gen("scale.generator", seed);
    for (auto& p : pool) {
      p.whisper = apply_affine(n2w, p.normal);
      for (Eigen::Index i = 0; i < p.whisper.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.whisper.cols(); ++j) p.whisper(i, j) += residual(j) * gen.normal();
      }
      p.origin = "pseudo";
    }
    const auto pseudo_all = directional_pairs(distilled, pool, tokenizer::Role::kW2n);

    for (int tier : o.tiers) {
      const std::vector<DirectionalPair> pseudo(pseudo_all.begin(), pseudo_all.begin() + tier);
      Stage3Options pre;
      pre.role = tokenizer::Role::kW2n;
      pre.steps = o.pretrain_steps;
      pre.lr = o.lr;
      pre.batch = o.batch;
      pre.crop = 0;
      pre.seed = derive_seed("scale.pretrain:" + std::to_string(tier), seed);
      auto trained = train_stage3(distilled, {}, pseudo, pre);
      const double pre_loss = conversion_mse(trained.model, val);
      rows.push_back({tier, "pretrain", static_cast<std::uint64_t>(k), "val_loss", pre_loss});

      if (!o.sft) {
        if (progress) {
          progress("scale-study seed " + std::to_string(k) + " tier " + std::to_string(tier) + " pretrain " +
                   fmt_loss(pre_loss));
        }
        continue;
      }
      Stage3Options sft = pre;
      sft.steps = o.sft_steps;
      sft.lr = o.sft_lr;
      sft.seed = derive_seed("scale.sft:" + std::to_string(tier), seed);
      continue_stage3(trained.model, real_w2n, {}, sft, trained.log);
      const double sft_loss = conversion_mse(trained.model, val);
      rows.push_back({tier, "pretrain+sft", static_cast<std::uint64_t>(k), "val_loss", sft_loss});
      if (progress) {
        progress("scale-study seed " + std::to_string(k) + " tier " + std::to_string(tier) + " pretrain " +
                 fmt_loss(pre_loss) + " pretrain+sft " + fmt_loss(sft_loss));
      }
    }
  }
  return rows;
}

std::string format_scale_rows(const std::vector<ScaleRow>& rows) {
  std::ostringstream os;
  os << kScaleHeader << '\n';
  for (const auto& r : rows) {
    os << r.tier << '\t' << r.setting << '\t' << r.seed << '\t' << r.metric << '\t' << fmt_loss(r.value) << '\n';
  }
  return os.str();
}

}  // namespace murmur::pipeline
