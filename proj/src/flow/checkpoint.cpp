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


#include "murmur/flow/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/nn/checkpoint.hpp"

namespace murmur::flow {

using nlohmann::json;

void save_flow_model(const std::filesystem::path& dir, const FlowModel& model) {
  nn::save_params(dir, model.params());
  write_matrix(dir / "mel_mean.buf", model.mel_mean());
  write_matrix(dir / "mel_std.buf", model.mel_std());
  const auto& c = model.config();
  json names = json::array();
  for (const auto& e : model.params().entries()) names.push_back(e.name);
  const json manifest = {{"kind", "flow"},
                         {"role", "flow"},
                         {"seed", model.seed()},
                         {"mel_bins", c.mel_bins},
                         {"codebook_size", c.codebook_size},
                         {"time_dim", c.time_dim},
                         {"trunk", nn::trunk_to_json(c.trunk)},
                         {"params", names}};
  std::ofstream os(dir / "model.json");
  if (!os) throw IoError("cannot write " + (dir / "model.json").string());
  os << manifest.dump(2) << '\n';
}

FlowModel load_flow_model(const std::filesystem::path& dir) {
  nn::require_checkpoint(dir, "flow model");
  std::ifstream is(dir / "model.json");
  try {
    const json j = json::parse(is);
    if (j.at("kind").get<std::string>() != "flow") throw FormatError(dir.string() + " is not a flow-model checkpoint");
    FlowConfig c;
    c.mel_bins = j.at("mel_bins").get<int>();
    c.codebook_size = j.at("codebook_size").get<std::int64_t>();
    c.time_dim = j.at("time_dim").get<int>();
    c.trunk = nn::trunk_from_json(j.at("trunk"));
    FlowModel model(c, j.at("seed").get<std::uint64_t>());
    model.params() = nn::load_params(dir, model.params());
    const Matrix mean = read_matrix(dir / "mel_mean.buf");
    const Matrix std = read_matrix(dir / "mel_std.buf");
    model.set_normalization(mean.row(0), std.row(0));
    return model;
  } catch (const json::exception& e) {
    throw FormatError(dir.string() + "/model.json: " + e.what());
  }
}

}  // namespace murmur::flow
