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

#include "murmur/flow/model.hpp"

namespace murmur::flow {

/// model.json (kind and role "flow", sizes, seed) plus tensor files.
void save_flow_model(const std::filesystem::path& dir, const FlowModel& model);

/// Throws DependencyError when absent, FormatError for a non-flow checkpoint.
FlowModel load_flow_model(const std::filesystem::path& dir);

}  // namespace murmur::flow
