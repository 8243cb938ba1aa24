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

#include <functional>
#include <iosfwd>
#include <string>

#include "murmur/cli/registry.hpp"

namespace murmur::cli {

struct Context {
  const Settings& settings;
  std::ostream& out;
  std::ostream& err;
  std::function<void(const std::string&)> progress;  // empty when quiet
};

int cmd_align(const Context& ctx);
int cmd_train_stage1(const Context& ctx);
int cmd_train_stage2(const Context& ctx);
int cmd_train_stage3(const Context& ctx);
int cmd_gen_pseudo(const Context& ctx);
int cmd_eval(const Context& ctx);
int cmd_stats(const Context& ctx);
int cmd_scale_study(const Context& ctx);

}  // namespace murmur::cli
