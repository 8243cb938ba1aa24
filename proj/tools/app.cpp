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


#include "murmur/cli/app.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "murmur/common/errors.hpp"

namespace murmur::cli {

namespace fs = std::filesystem;

namespace {

// One writer per output directory.
class LockFile {
 public:
  explicit LockFile(const fs::path& dir) : path_(dir / ".murmur.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        throw UsageError(dir.string() + " is in use by another run (remove " + path_.string() +
                         " if no run is active)");
      }
      throw IoError("cannot create lock " + path_.string() + ": " + std::strerror(errno));
    }
    ::close(fd);
  }
  ~LockFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  fs::path path_;
};

using Handler = int (*)(const Context&);

Handler handler_for(const std::string& name) {
  if (name == "align") return cmd_align;
  if (name == "train-stage1") return cmd_train_stage1;
  if (name == "train-stage2") return cmd_train_stage2;
  if (name == "train-stage3") return cmd_train_stage3;
  if (name == "gen-pseudo") return cmd_gen_pseudo;
  if (name == "eval") return cmd_eval;
  if (name == "stats") return cmd_stats;
  if (name == "scale-study") return cmd_scale_study;
  throw UsageError("unknown command '" + name + "'");
}

std::string type_name(FlagKind kind) {
  switch (kind) {
    case FlagKind::kInt: return "INT";
    case FlagKind::kReal: return "REAL";
    case FlagKind::kBool: return "";
    case FlagKind::kString: break;
  }
  return "TEXT";
}

struct Bound {
  const CommandSpec* spec;
  CLI::App* app;
  std::vector<std::pair<CLI::Option*, const FlagSpec*>> options;
};

int execute(const CommandSpec& spec, const std::map<std::string, std::string>& given, std::ostream& out,
            std::ostream& err) {
  std::map<std::string, std::string> from_file;
  if (const auto it = given.find("config"); it != given.end() && !it->second.empty()) {
    from_file = read_config_file(it->second, spec);
  }
  const Settings settings = resolve_settings(spec, from_file, given);
  Context ctx{settings, out, err, {}};
  if (!settings.flag("quiet")) ctx.progress = [&err](const std::string& line) { err << line << '\n'; };
  std::unique_ptr<LockFile> lock;
  for (const auto& f : spec.flags) {
    if (f.name == "out-dir") lock = std::make_unique<LockFile>(settings.path("out-dir"));
  }
  return handler_for(spec.name)(ctx);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whispered/normal speech conversion pipeline", "murmur"};
  app.require_subcommand(0, 1);
  std::vector<Bound> bound;
  for (const auto& spec : command_registry()) {
    Bound b{&spec, app.add_subcommand(spec.name, spec.summary), {}};
    for (const auto& flag : spec.flags) {
      const std::string description = flag.help + " " + default_note(flag);
      CLI::Option* opt = flag.kind == FlagKind::kBool
                             ? b.app->add_flag("--" + flag.name, description)
                             : b.app->add_option("--" + flag.name, description)->type_name(type_name(flag.kind));
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      b.options.emplace_back(opt, &flag);
    }
    bound.push_back(std::move(b));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  for (const auto& b : bound) {
    if (!b.app->parsed()) continue;
    std::map<std::string, std::string> given;
    for (const auto& [opt, flag] : b.options) {
      if (opt->count() == 0) continue;
      given[flag->name] = flag->kind == FlagKind::kBool ? "true" : opt->as<std::string>();
    }
    try {
      return execute(*b.spec, given, out, err);
    } catch (const DependencyError& e) {
      err << "error: " << e.what() << '\n';
      return kExitDependency;
    } catch (const NumericError& e) {
      err << "error: " << e.what() << '\n';
      return kExitNumeric;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  err << app.help();
  return kExitInvalid;
}

}  // namespace murmur::cli
