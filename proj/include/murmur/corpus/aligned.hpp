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
#include <optional>
#include <string>
#include <vector>

#include "murmur/alignment/ctc.hpp"
#include "murmur/alignment/dtw.hpp"
#include "murmur/corpus/frontend.hpp"
#include "murmur/corpus/manifest.hpp"

namespace murmur::corpus {

/// Posteriorgram and transcript token ids for one utterance, used for the
/// word-level alignment metadata.
struct TranscriptPosteriors {
  alignment::Posteriorgram posteriors;
  std::vector<int> tokens;
  std::vector<int> word_lengths;  // tokens per word; empty = no word merge
};

/// Returns nothing when no posteriorgram is available for the record.
using PosteriorSource = std::function<std::optional<TranscriptPosteriors>(const UtteranceRecord&, Eigen::Index frames)>;

/// Reads `<dir>/<id>.post` (frames x vocabulary log-probs) and maps the
/// transcript characters through `vocabulary` (one symbol per line, blank
/// first; spaces separate words and are not tokens).
PosteriorSource posteriorgram_files(std::filesystem::path dir, std::vector<std::string> vocabulary);

struct AlignOptions {
  FrontendOptions frontend;
  int radius = 5;
  alignment::Distance distance = alignment::Distance::kEuclidean;
  bool force = false;  // recompute pairs whose outputs exist
};

struct PairFailure {
  std::string pair_id;
  std::string stage;
  std::string message;
};

struct AlignedEntry {
  std::string pair_id;
  std::string whisper_id;
  std::string normal_id;
  Eigen::Index frames = 0;
  double cost = 0.0;
  bool reused = false;
};

struct AlignReport {
  std::vector<AlignedEntry> aligned;
  std::vector<PairFailure> failures;
  std::size_t skipped = 0;
};

/// Aligned-corpus builder. For every pair: frontend on both members, mel
/// analysis, optional CTC word segmentation, FastDTW between the CMVN
/// features, one whisper frame per normal frame. Writes per pair
/// `<pair_id>.whisper.mel` (aligned), `<pair_id>.normal.mel`,
/// `<pair_id>.mapping` and `<pair_id>.align`, then `alignments.tsv` listing
/// every aligned pair in manifest order. A failing pair is recorded and
/// skipped.
AlignReport build_aligned_corpus(const Manifest& manifest, const std::filesystem::path& out_dir,
                                 const AlignOptions& options = {}, const PosteriorSource& posteriors = {});

/// One row of alignments.tsv.
struct AlignedPairFiles {
  std::string pair_id;
  std::string whisper_id;
  std::string normal_id;
  Eigen::Index frames = 0;
  double cost = 0.0;
  std::filesystem::path whisper_mel, normal_mel, mapping;
};

/// Reads `<dir>/alignments.tsv`. Throws DependencyError when absent.
std::vector<AlignedPairFiles> load_aligned_corpus(const std::filesystem::path& dir);

}  // namespace murmur::corpus
