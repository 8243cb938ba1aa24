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
#include <string>

#include "json.hpp"
#include "murmur/nn/params.hpp"
#include "murmur/nn/transformer.hpp"

namespace murmur::nn {

/// File holding parameter `name` inside a checkpoint directory.
std::filesystem::path param_file(const std::filesystem::path& dir, const std::string& name);

/// One tensor file per parameter.
void save_params(const std::filesystem::path& dir, const ParamSet& params);

/// Reads every parameter of `like` from `dir`; shapes must match.
/// Throws DependencyError if a file is missing, FormatError on shape mismatch.
ParamSet load_params(const std::filesystem::path& dir, const ParamSet& like);

/// Throws DependencyError naming `what` unless `dir`/model.json exists.
void require_checkpoint(const std::filesystem::path& dir, const std::string& what);

nlohmann::json trunk_to_json(const TrunkConfig& cfg);
/// Throws FormatError on missing or mistyped fields.
TrunkConfig trunk_from_json(const nlohmann::json& j);

}  // namespace murmur::nn
