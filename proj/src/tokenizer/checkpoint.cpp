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


#include "murmur/tokenizer/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"
#include "murmur/nn/checkpoint.hpp"

namespace murmur::tokenizer {

using nlohmann::json;

void save_seq_model(const std::filesystem::path& dir, const SeqModel& model) {
  nn::save_params(dir, model.params());
  write_matrix(dir / "feature_mean.buf", model.feature_mean());
  write_matrix(dir / "feature_std.buf", model.feature_std());

  const auto& c = model.config();
  json names = json::array();
  for (const auto& e : model.params().entries()) names.push_back(e.name);
  const json manifest = {{"kind", "tokenizer"},
                         {"role", std::string(role_name(model.role()))},
                         {"seed", model.seed()},
                         {"feature_dim", c.feature_dim},
                         {"embed_dim", c.embed_dim},
                         {"fsq_levels", c.fsq.levels},
                         {"fsq_delta", c.fsq.delta},
                         {"trunk", nn::trunk_to_json(c.trunk)},
                         {"params", names}};
  std::ofstream os(dir / "model.json");
  if (!os) throw IoError("cannot write " + (dir / "model.json").string());
  os << manifest.dump(2) << '\n';
}

SeqModel load_seq_model(const std::filesystem::path& dir) {
  nn::require_checkpoint(dir, "tokenizer");
  std::ifstream is(dir / "model.json");
  json j;
  try {
    j = json::parse(is);
    if (j.at("kind").get<std::string>() != "tokenizer") throw FormatError(dir.string() + " is not a tokenizer checkpoint");
    SeqModelConfig c;
    c.feature_dim = j.at("feature_dim").get<int>();
    c.embed_dim = j.at("embed_dim").get<int>();
    c.fsq.levels = j.at("fsq_levels").get<std::vector<int>>();
    c.fsq.delta = j.at("fsq_delta").get<double>();
    c.trunk = nn::trunk_from_json(j.at("trunk"));
    SeqModel model(c, parse_role(j.at("role").get<std::string>()), j.at("seed").get<std::uint64_t>());
    model.params() = nn::load_params(dir, model.params());
    Matrix mean = read_matrix(dir / "feature_mean.buf");
    Matrix std = read_matrix(dir / "feature_std.buf");
    model.set_normalization(mean.row(0), std.row(0));
    return model;
  } catch (const json::exception& e) {
    throw FormatError(dir.string() + "/model.json: " + e.what());
  }
}

}  // namespace murmur::tokenizer
