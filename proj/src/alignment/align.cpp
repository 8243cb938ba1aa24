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


#include "murmur/alignment/align.hpp"

#include <charconv>
#include <sstream>

#include "murmur/common/errors.hpp"

namespace murmur::alignment {

AlignedPair align_pair(const dsp::MelSpectrogram& source, const dsp::MelSpectrogram& target, int radius,
                       Distance distance) {
  if (source.frames() == 0 || target.frames() == 0) throw ArgumentError("cannot align an empty spectrogram");
  if (source.bins() != target.bins() || source.hop_length != target.hop_length ||
      source.sample_rate != target.sample_rate) {
    throw ArgumentError("spectrograms were computed with different mel configurations");
  }

  AlignedPair out;
  out.path = fastdtw(source.values, target.values, radius, distance);
  out.mapping = path_to_frame_mapping(out.path, MappingTarget::kB);
  out.aligned_source = target;
  out.aligned_source.values = apply_mapping(source.values, out.mapping);
  return out;
}

Matrix apply_mapping(const Matrix& source, const FrameMapping& mapping) {
  Matrix out(static_cast<Eigen::Index>(mapping.target_to_source.size()), source.cols());
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    const Eigen::Index s = mapping.target_to_source[static_cast<std::size_t>(t)];
    if (s < 0 || s >= source.rows()) throw ArgumentError("frame mapping points outside the source");
    out.row(t) = source.row(s);
  }
  return out;
}

std::string format_alignment_record(const AlignmentRecord& record) {
  std::ostringstream os;
  os.precision(17);
  os << record.pair_id << '\t' << record.path_length << '\t' << record.cost << '\t';
  for (std::size_t k = 0; k < record.mapping.size(); ++k) os << (k ? "," : "") << record.mapping[k];
  return os.str();
}

AlignmentRecord parse_alignment_record(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, '\t');) fields.push_back(f);
  if (fields.size() == 3 && !line.empty() && line.back() == '\t') fields.emplace_back();
  if (fields.size() != 4) throw ParseError("alignment record needs 4 tab-separated fields");

  AlignmentRecord r;
  r.pair_id = fields[0];
  try {
    std::size_t used = 0;
    r.path_length = std::stoul(fields[1], &used);
    if (used != fields[1].size()) throw ParseError("bad path length");
    r.cost = std::stod(fields[2], &used);
    if (used != fields[2].size()) throw ParseError("bad cost");
  } catch (const std::logic_error&) {
    throw ParseError("alignment record '" + r.pair_id + "' has non-numeric fields");
  }
  std::istringstream ms(fields[3]);
  for (std::string v; std::getline(ms, v, ',');) {
    Eigen::Index x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError("bad mapping entry '" + v + "'");
    r.mapping.push_back(x);
  }
  return r;
}

}  // namespace murmur::alignment
