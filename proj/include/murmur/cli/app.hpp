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

#include <iosfwd>
#include <string>
#include <vector>

namespace murmur::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,     // validation, configuration or usage error
  kExitDependency = 2,  // missing prerequisite artifact
  kExitNumeric = 3,
  kExitPartial = 4,     // some items failed under --strict
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace murmur::cli
