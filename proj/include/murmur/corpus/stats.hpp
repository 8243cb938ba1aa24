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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "murmur/corpus/manifest.hpp"

namespace murmur::corpus {

struct StatsRow {
  double seconds = 0.0;
  std::set<std::string> pairs;     // distinct pair ids
  std::set<std::string> speakers;  // opaque speaker labels

  double hours() const { return seconds / 3600.0; }
  bool operator==(const StatsRow&) const = default;
};

struct CorpusStats {
  std::map<std::pair<Language, Provenance>, StatsRow> rows;
  std::vector<std::string> warnings;  // unreadable audio, excluded from durations

  /// Merge: durations add, pair and speaker sets unite.
  CorpusStats& operator+=(const CorpusStats& other);
  StatsRow total() const;
};

CorpusStats operator+(CorpusStats a, const CorpusStats& b);

/// Seconds of audio for a record; throws when unreadable.
using DurationFn = std::function<double(const std::filesystem::path&)>;

/// Aggregates per (language, provenance). Records whose duration throws
/// still count towards pairs and speakers and produce a warning.
CorpusStats corpus_stats(const Manifest& manifest, const DurationFn& duration);
CorpusStats corpus_stats(const Manifest& manifest);  // WAV header durations

/// "CN 18 4k 146": language, hours, pairs, speakers. Hours use one decimal,
/// pairs from 1000 on are written in thousands; a trailing ".0" is dropped.
std::string format_stats_row(Language language, const StatsRow& row);

/// Header plus one "<provenance> <row>" line per non-empty group.
std::string format_stats_table(const CorpusStats& stats);

}  // namespace murmur::corpus
