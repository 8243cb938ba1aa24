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


#include "murmur/corpus/stats.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "murmur/dsp/waveform.hpp"

namespace murmur::corpus {

CorpusStats& CorpusStats::operator+=(const CorpusStats& other) {
  for (const auto& [key, row] : other.rows) {
    auto& mine = rows[key];
    mine.seconds += row.seconds;
    mine.pairs.insert(row.pairs.begin(), row.pairs.end());
    mine.speakers.insert(row.speakers.begin(), row.speakers.end());
  }
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  return *this;
}

CorpusStats operator+(CorpusStats a, const CorpusStats& b) { return a += b; }

StatsRow CorpusStats::total() const {
  StatsRow t;
  for (const auto& [key, row] : rows) {
    t.seconds += row.seconds;
    // Pair ids and speakers are qualified so groups never collide.
    const std::string tag = std::string(language_name(key.first)) + "/" + std::string(provenance_name(key.second)) + "/";
    for (const auto& p : row.pairs) t.pairs.insert(tag + p);
    for (const auto& s : row.speakers) t.speakers.insert(tag + s);
  }
  return t;
}

CorpusStats corpus_stats(const Manifest& manifest, const DurationFn& duration) {
  CorpusStats stats;
  for (const auto& r : manifest) {
    auto& row = stats.rows[{r.language, r.provenance}];
    row.speakers.insert(r.speaker);
    if (!r.pair_id.empty()) row.pairs.insert(r.pair_id);
    try {
      row.seconds += duration(r.audio_path);
    } catch (const std::exception& e) {
      stats.warnings.push_back(r.id + ": " + e.what());
    }
  }
  return stats;
}

CorpusStats corpus_stats(const Manifest& manifest) {
  return corpus_stats(manifest, [](const std::filesystem::path& p) { return dsp::wav_duration(p); });
}

namespace {

std::string one_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  std::string s(buf);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

}  // namespace

std::string format_stats_row(Language language, const StatsRow& row) {
  const auto pairs = row.pairs.size();
  const std::string pair_text = pairs >= 1000 ? one_decimal(static_cast<double>(pairs) / 1000.0) + "k"
                                              : std::to_string(pairs);
  return std::string(language_name(language)) + " " + one_decimal(row.hours()) + " " + pair_text + " " +
         std::to_string(row.speakers.size());
}

std::string format_stats_table(const CorpusStats& stats) {
  std::ostringstream os;
  os << "# provenance language hours pairs speakers\n";
  for (const auto& [key, row] : stats.rows) {
    os << provenance_name(key.second) << ' ' << format_stats_row(key.first, row) << '\n';
  }
  return os.str();
}

}  // namespace murmur::corpus
