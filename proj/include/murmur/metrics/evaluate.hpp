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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "murmur/corpus/frontend.hpp"
#include "murmur/corpus/manifest.hpp"
#include "murmur/metrics/metrics.hpp"

namespace murmur::metrics {

/// Speaker embedding for a record given its mel; nothing when unavailable.
using EmbeddingSource = std::function<std::optional<RowVector>(const corpus::UtteranceRecord&, const Matrix& mel)>;

/// proxy_embedding of the mel.
EmbeddingSource proxy_embeddings();
/// `<dir>/<id>.emb` tensors (1 x dim or frames x dim, averaged over rows).
EmbeddingSource embedding_files(std::filesystem::path dir);

/// Tab-separated `id<TAB>text` lines; '#' lines skipped.
std::map<std::string, std::string> read_hypotheses(const std::filesystem::path& path);

struct UtteranceMetrics {
  std::string id;
  corpus::Language language = corpus::Language::kEN;
  std::optional<double> sim;
  std::optional<double> error_rate;  // WER for EN, CER for CN
  std::optional<double> f0_corr;

  Unit unit() const { return language == corpus::Language::kCN ? Unit::kCharacter : Unit::kWord; }
  bool operator==(const UtteranceMetrics&) const = default;
};

struct Exclusion {
  std::string id;
  std::string reason;
  bool operator==(const Exclusion&) const = default;
};

struct MetricSummary {
  double mean = 0.0;  // over defined values; 0 when count is 0
  std::size_t count = 0;
  bool operator==(const MetricSummary&) const = default;
};

struct MetricsReport {
  std::string sim_label = "proxy-SIM";
  std::vector<UtteranceMetrics> utterances;
  std::vector<Exclusion> exclusions;
  MetricSummary sim, wer, cer, f0_corr;

  /// Recomputes the summaries from `utterances`.
  void summarize();
};

struct EvalOptions {
  corpus::FrontendOptions frontend = [] {
    corpus::FrontendOptions f;
    f.trim = false;
    return f;
  }();
  dsp::F0Options f0;
  EmbeddingSource embeddings;  // empty: proxy embeddings
  std::string sim_label = "proxy-SIM";
  std::map<std::string, std::string> hypotheses;  // converted id -> ASR text
};

/// Pairs converted and reference records by id. Converted records without
/// a reference, references without a converted record and unreadable audio
/// are listed as exclusions. The hypothesis text defaults to the converted
/// record's transcript.
MetricsReport evaluate(const corpus::Manifest& converted, const corpus::Manifest& reference,
                       const EvalOptions& options = {});

/// Table with the SIM / WER / CER / F0_CoRR columns, counts and exclusions.
std::string format_report(const MetricsReport& report);

/// One JSON object per line: utterances, then exclusions, then a summary.
void write_report_jsonl(std::ostream& out, const MetricsReport& report);
MetricsReport read_report_jsonl(std::istream& in);

}  // namespace murmur::metrics
