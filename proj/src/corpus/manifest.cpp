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


#include "murmur/corpus/manifest.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "murmur/common/errors.hpp"

namespace murmur::corpus {

std::string_view mode_name(Mode m) { return m == Mode::kWhisper ? "whisper" : "normal"; }
std::string_view language_name(Language l) { return l == Language::kEN ? "EN" : "CN"; }
std::string_view provenance_name(Provenance p) { return p == Provenance::kReal ? "real" : "pseudo"; }

Mode parse_mode(std::string_view s) {
  if (s == "whisper") return Mode::kWhisper;
  if (s == "normal") return Mode::kNormal;
  throw ParseError("unknown mode '" + std::string(s) + "'");
}

Language parse_language(std::string_view s) {
  if (s == "EN") return Language::kEN;
  if (s == "CN") return Language::kCN;
  throw ParseError("unknown language '" + std::string(s) + "'");
}

Provenance parse_provenance(std::string_view s) {
  if (s == "real") return Provenance::kReal;
  if (s == "pseudo") return Provenance::kPseudo;
  throw ParseError("unknown provenance '" + std::string(s) + "'");
}

namespace {

std::vector<std::string> split_tabs(const std::string& line, std::size_t max_fields) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (fields.size() + 1 < max_fields) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) break;
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

}  // namespace

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir, const std::string& source) {
  Manifest out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    // The transcript is last and may itself contain tabs.
    const auto f = split_tabs(line, 8);
    const std::string where = source + ":" + std::to_string(line_no);
    if (f.size() != 8) throw ParseError(where + ": expected 8 tab-separated fields, got " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(where + ": empty id");
    if (f[4].empty()) throw ParseError(where + ": empty audio path");
    UtteranceRecord r;
    try {
      r.id = f[0];
      r.speaker = f[1];
      r.mode = parse_mode(f[2]);
      r.language = parse_language(f[3]);
      r.audio_path = f[4];
      r.pair_id = f[5];
      r.provenance = parse_provenance(f[6]);
      r.transcript = f[7];
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (r.audio_path.is_relative() && !base_dir.empty()) r.audio_path = base_dir / r.audio_path;
    out.push_back(std::move(r));
  }
  validate_manifest(out);
  return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path(), path.string());
}

void validate_manifest(const Manifest& manifest) {
  std::set<std::string> ids;
  std::map<std::string, std::pair<int, int>> pairs;  // whisper count, normal count
  for (const auto& r : manifest) {
    if (!ids.insert(r.id).second) throw ValidationError("duplicate utterance id '" + r.id + "'");
    if (r.pair_id.empty()) continue;
    auto& c = pairs[r.pair_id];
    (r.mode == Mode::kWhisper ? c.first : c.second) += 1;
  }
  for (const auto& [pair_id, c] : pairs) {
    if (c.first != 1 || c.second != 1) {
      throw ValidationError("pair '" + pair_id + "' has " + std::to_string(c.first) + " whisper and " +
                            std::to_string(c.second) + " normal records (expected one of each)");
    }
  }
}

void format_manifest(std::ostream& out, const Manifest& manifest, const std::filesystem::path& base_dir) {
  out << "# id\tspeaker\tmode\tlanguage\taudio_path\tpair_id\tprovenance\ttranscript\n";
  for (const auto& r : manifest) {
    std::filesystem::path p = r.audio_path;
    if (!base_dir.empty()) {
      const auto rel = p.lexically_normal().lexically_relative(base_dir.lexically_normal());
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << r.id << '\t' << r.speaker << '\t' << mode_name(r.mode) << '\t' << language_name(r.language) << '\t'
        << p.generic_string() << '\t' << r.pair_id << '\t' << provenance_name(r.provenance) << '\t' << r.transcript
        << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  validate_manifest(manifest);
  std::ostringstream buf;
  format_manifest(buf, manifest, path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << buf.str();
}

std::vector<RecordPair> resolve_pairs(const Manifest& manifest) {
  std::vector<RecordPair> pairs;
  std::map<std::string, std::size_t> index;
  for (const auto& r : manifest) {
    if (r.pair_id.empty()) continue;
    auto [it, fresh] = index.emplace(r.pair_id, pairs.size());
    if (fresh) pairs.push_back(RecordPair{r.pair_id, {}, {}});
    (r.mode == Mode::kWhisper ? pairs[it->second].whisper : pairs[it->second].normal) = r;
  }
  for (const auto& p : pairs) {
    if (p.whisper.id.empty() || p.normal.id.empty()) throw ValidationError("pair '" + p.pair_id + "' is incomplete");
  }
  return pairs;
}

}  // namespace murmur::corpus
