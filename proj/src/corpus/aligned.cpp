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


#include "murmur/corpus/aligned.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "murmur/alignment/align.hpp"
#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/common/text.hpp"

namespace murmur::corpus {

namespace fs = std::filesystem;

PosteriorSource posteriorgram_files(fs::path dir, std::vector<std::string> vocabulary) {
  std::map<std::string, int> index;
  for (std::size_t k = 1; k < vocabulary.size(); ++k) index.emplace(vocabulary[k], static_cast<int>(k));
  return [dir = std::move(dir), index = std::move(index)](const UtteranceRecord& r,
                                                          Eigen::Index) -> std::optional<TranscriptPosteriors> {
    const auto path = dir / (r.id + ".post");
    if (!fs::exists(path)) return std::nullopt;
    TranscriptPosteriors tp;
    tp.posteriors = alignment::read_posteriorgram(path);
    for (const auto& word : split_whitespace(r.transcript)) {
      int n = 0;
      for (const auto& symbol : utf8_code_points(word)) {
        const auto it = index.find(symbol);
        if (it == index.end()) throw ValidationError("symbol '" + symbol + "' of " + r.id + " is not in the vocabulary");
        tp.tokens.push_back(it->second);
        ++n;
      }
      tp.word_lengths.push_back(n);
    }
    return tp;
  };
}

namespace {

struct PairPaths {
  fs::path whisper_mel, normal_mel, mapping, record;
};

PairPaths paths_for(const fs::path& dir, const std::string& pair_id) {
  return {dir / (pair_id + ".whisper.mel"), dir / (pair_id + ".normal.mel"), dir / (pair_id + ".mapping"),
          dir / (pair_id + ".align")};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

alignment::AlignmentRecord read_record(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) throw IoError("cannot read " + path.string());
  return alignment::parse_alignment_record(line);
}

void write_words(const fs::path& path, const std::vector<alignment::TokenSegment>& segments) {
  std::ostringstream os;
  os << "# index\tstart_frame\tend_frame\n";
  for (std::size_t k = 0; k < segments.size(); ++k) {
    os << k << '\t' << segments[k].start_frame << '\t' << segments[k].end_frame << '\n';
  }
  write_text(path, os.str());
}

}  // namespace

AlignReport build_aligned_corpus(const Manifest& manifest, const fs::path& out_dir, const AlignOptions& options,
                                 const PosteriorSource& posteriors) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  AlignReport report;
  for (const auto& pair : resolve_pairs(manifest)) {
    const PairPaths paths = paths_for(out_dir, pair.pair_id);
    if (!options.force && fs::exists(paths.whisper_mel) && fs::exists(paths.normal_mel) && fs::exists(paths.mapping) &&
        fs::exists(paths.record)) {
      try {
        const auto rec = read_record(paths.record);
        report.aligned.push_back({pair.pair_id, pair.whisper.id, pair.normal.id,
                                  static_cast<Eigen::Index>(rec.mapping.size()), rec.cost, true});
        ++report.skipped;
        continue;
      } catch (const Error&) {
        // Unreadable leftovers are recomputed.
      }
    }

    std::string stage = "load";
    try {
      const auto whisper = load_features(pair.whisper.audio_path, options.frontend);
      const auto normal = load_features(pair.normal.audio_path, options.frontend);

      if (posteriors) {
        stage = "forced-alignment";
        for (const auto* member : {&pair.whisper, &pair.normal}) {
          const auto frames = (member == &pair.whisper ? whisper : normal).frames();
          const auto tp = posteriors(*member, frames);
          if (!tp) continue;
          auto segments = alignment::ctc_forced_align(tp->posteriors, tp->tokens);
          if (!tp->word_lengths.empty()) segments = alignment::merge_words(segments, tp->word_lengths);
          write_words(out_dir / (pair.pair_id + "." + std::string(mode_name(member->mode)) + ".words"), segments);
        }
      }

      stage = "dtw";
      dsp::MelSpectrogram ws = whisper, ns = normal;
      ws.values = cmvn(whisper.values);
      ns.values = cmvn(normal.values);
      const auto aligned = alignment::align_pair(ws, ns, options.radius, options.distance);
      const Matrix aligned_whisper = alignment::apply_mapping(whisper.values, aligned.mapping);

      stage = "write";
      Matrix mapping(static_cast<Eigen::Index>(aligned.mapping.target_to_source.size()), 1);
      for (Eigen::Index t = 0; t < mapping.rows(); ++t) {
        mapping(t, 0) = static_cast<double>(aligned.mapping.target_to_source[static_cast<std::size_t>(t)]);
      }
      write_matrix(paths.whisper_mel, aligned_whisper);
      write_matrix(paths.normal_mel, normal.values);
      write_matrix(paths.mapping, mapping);
      alignment::AlignmentRecord rec{pair.pair_id, aligned.path.steps.size(), aligned.path.cost,
                                     aligned.mapping.target_to_source};
      // Written last: its presence marks the pair as complete.
      write_text(paths.record, alignment::format_alignment_record(rec) + "\n");
      report.aligned.push_back({pair.pair_id, pair.whisper.id, pair.normal.id, normal.frames(), aligned.path.cost, false});
    } catch (const std::exception& e) {
      report.failures.push_back({pair.pair_id, stage, e.what()});
    }
  }

  std::ostringstream os;
  os.precision(17);
  os << "# pair_id\twhisper_id\tnormal_id\tframes\tcost\twhisper_mel\tnormal_mel\tmapping\n";
  for (const auto& e : report.aligned) {
    const PairPaths p = paths_for(out_dir, e.pair_id);
    os << e.pair_id << '\t' << e.whisper_id << '\t' << e.normal_id << '\t' << e.frames << '\t' << e.cost << '\t'
       << p.whisper_mel.filename().string() << '\t' << p.normal_mel.filename().string() << '\t'
       << p.mapping.filename().string() << '\n';
  }
  write_text(out_dir / "alignments.tsv", os.str());
  return report;
}

std::vector<AlignedPairFiles> load_aligned_corpus(const fs::path& dir) {
  const auto path = dir / "alignments.tsv";
  if (!fs::exists(path)) throw DependencyError("no aligned corpus at " + dir.string() + " (run align first)");
  std::ifstream in(path);
  std::vector<AlignedPairFiles> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::istringstream is(line);
    for (std::string x; std::getline(is, x, '\t');) f.push_back(x);
    if (f.size() != 8) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 8 fields");
    AlignedPairFiles e;
    e.pair_id = f[0];
    e.whisper_id = f[1];
    e.normal_id = f[2];
    try {
      e.frames = std::stol(f[3]);
      e.cost = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
    e.whisper_mel = dir / f[5];
    e.normal_mel = dir / f[6];
    e.mapping = dir / f[7];
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace murmur::corpus
