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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace murmur::corpus {

enum class Mode { kWhisper, kNormal };
enum class Language { kEN, kCN };
enum class Provenance { kReal, kPseudo };

std::string_view mode_name(Mode m);            // "whisper" / "normal"
std::string_view language_name(Language l);    // "EN" / "CN"
std::string_view provenance_name(Provenance p);  // "real" / "pseudo"
Mode parse_mode(std::string_view s);
Language parse_language(std::string_view s);
Provenance parse_provenance(std::string_view s);

struct UtteranceRecord {
  std::string id;
  std::string speaker;
  Mode mode = Mode::kNormal;
  Language language = Language::kEN;
  std::filesystem::path audio_path;
  std::string pair_id;  // empty when unpaired
  Provenance provenance = Provenance::kReal;
  std::string transcript;

  bool operator==(const UtteranceRecord&) const = default;
};

using Manifest = std::vector<UtteranceRecord>;

/// Tab-separated: id, speaker, mode, language, audio_path, pair_id,
/// provenance, transcript. Lines starting with '#' and blank lines are
/// skipped. Relative audio paths are resolved against `base_dir`.
/// Throws ParseError (with the line number) on malformed lines and
/// ValidationError on duplicate ids or unresolvable pair ids.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {},
                        const std::string& source = "<manifest>");
Manifest load_manifest(const std::filesystem::path& path);

/// Duplicate ids, pair ids naming anything but one whisper and one normal
/// record. Throws ValidationError.
void validate_manifest(const Manifest& manifest);

/// Audio paths under `base_dir` are written relative to it.
void format_manifest(std::ostream& out, const Manifest& manifest, const std::filesystem::path& base_dir = {});
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

struct RecordPair {
  std::string pair_id;
  UtteranceRecord whisper;
  UtteranceRecord normal;
};

/// Pairs in order of first appearance of their pair id.
std::vector<RecordPair> resolve_pairs(const Manifest& manifest);

}  // namespace murmur::corpus
