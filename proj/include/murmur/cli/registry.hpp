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
#include <map>
#include <string>
#include <vector>

namespace murmur::cli {

enum class FlagKind { kString, kInt, kReal, kBool };

struct FlagSpec {
  std::string name;  // without the leading dashes
  FlagKind kind = FlagKind::kString;
  std::string default_value;  // textual; "" = unset
  std::string help;
  bool required = false;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::vector<FlagSpec> flags;  // includes the common flags
};

/// Every subcommand with its flags. Help text, config-file keys and
/// validation are all generated from this table.
const std::vector<CommandSpec>& command_registry();
/// Throws UsageError for an unknown command.
const CommandSpec& find_command(const std::string& name);

/// Help line suffix describing a flag's default ("(default: 5)", "(required)").
std::string default_note(const FlagSpec& flag);

/// Resolved flag values of one invocation.
class Settings {
 public:
  Settings(const CommandSpec& command, std::map<std::string, std::string> values);

  const CommandSpec& command() const { return *command_; }
  const std::string& text(const std::string& name) const;
  bool has(const std::string& name) const { return !text(name).empty(); }
  long integer(const std::string& name) const;
  double real(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::filesystem::path path(const std::string& name) const { return text(name); }
  std::vector<int> int_list(const std::string& name) const;  // comma separated

 private:
  const CommandSpec* command_;
  std::map<std::string, std::string> values_;
};

/// key = value lines, '#' comments. Keys are flag names of `command`;
/// unknown keys throw ConfigurationError, malformed lines ParseError.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path, const CommandSpec& command);

/// Defaults, overridden by the config file, overridden by the command line.
/// Checks that every value parses as its kind (ConfigurationError) and that
/// required flags are present (UsageError).
Settings resolve_settings(const CommandSpec& command, const std::map<std::string, std::string>& from_file,
                          const std::map<std::string, std::string>& from_command_line);

}  // namespace murmur::cli
