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

#include "murmur/tokenizer/model.hpp"

namespace murmur::tokenizer {

/// Writes model.json (architecture, role, FSQ levels, seed) plus one tensor
/// file per parameter and the normalization buffers.
///
/// Parameters are stored as float32, so a loaded model matches the saved one
/// to single precision.
void save_seq_model(const std::filesystem::path& dir, const SeqModel& model);

/// Throws DependencyError when the directory holds no checkpoint and
/// FormatError when it describes something other than a tokenizer.
SeqModel load_seq_model(const std::filesystem::path& dir);

}  // namespace murmur::tokenizer
