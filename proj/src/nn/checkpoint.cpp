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


#include "murmur/nn/checkpoint.hpp"

#include "murmur/common/errors.hpp"
#include "murmur/common/tensor_io.hpp"

namespace murmur::nn {

std::filesystem::path param_file(const std::filesystem::path& dir, const std::string& name) {
  return dir / (name + ".wft");
}

void save_params(const std::filesystem::path& dir, const ParamSet& params) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory " + dir.string() + ": " + ec.message());
  for (const auto& e : params.entries()) write_matrix(param_file(dir, e.name), e.value);
}

ParamSet load_params(const std::filesystem::path& dir, const ParamSet& like) {
  ParamSet out;
  for (const auto& e : like.entries()) {
    const auto path = param_file(dir, e.name);
    if (!std::filesystem::exists(path)) throw DependencyError("checkpoint " + dir.string() + " lacks parameter '" + e.name + "'");
    Matrix m = read_matrix(path);
    if (m.rows() != e.value.rows() || m.cols() != e.value.cols()) {
      throw FormatError("parameter '" + e.name + "' in " + dir.string() + " has shape " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(e.value.rows()) + "x" +
                        std::to_string(e.value.cols()));
    }
    out.add(e.name, std::move(m));
  }
  return out;
}

void require_checkpoint(const std::filesystem::path& dir, const std::string& what) {
  if (!std::filesystem::exists(dir / "model.json")) {
    throw DependencyError(what + " checkpoint not found at " + dir.string() + " (missing model.json)");
  }
}

nlohmann::json trunk_to_json(const TrunkConfig& t) {
  return {{"dim_model", t.dim_model}, {"dim_ff", t.dim_ff},         {"heads", t.heads},
          {"layers", t.layers},       {"fsmn_left", t.fsmn_left}, {"fsmn_right", t.fsmn_right},
          {"rope_base", t.rope_base}};
}

TrunkConfig trunk_from_json(const nlohmann::json& j) {
  TrunkConfig t;
  try {
    t.dim_model = j.at("dim_model").get<int>();
    t.dim_ff = j.at("dim_ff").get<int>();
    t.heads = j.at("heads").get<int>();
    t.layers = j.at("layers").get<int>();
    t.fsmn_left = j.at("fsmn_left").get<int>();
    t.fsmn_right = j.at("fsmn_right").get<int>();
    t.rope_base = j.at("rope_base").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("trunk config: ") + e.what());
  }
  return t;
}

}  // namespace murmur::nn
