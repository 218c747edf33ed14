// Copyright 2026 The slicekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cstdio>
#include <exception>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

nlohmann::json load_config(
    const std::string& path,
    const std::vector<std::unique_ptr<slicekit::cli::Command>>& commands) {
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(slicekit::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw slicekit::ValidationError(fmt::format("config {}: {}", path, e.what()));
  } catch (const slicekit::IoError& e) {
    throw slicekit::ValidationError(e.what());
  }
  if (!config.is_object()) {
    throw slicekit::ValidationError(fmt::format("config {}: expected an object", path));
  }
  for (const auto& [key, value] : config.items()) {
    bool known = false;
    for (const auto& c : commands) known = known || c->options().contains(key);
    if (!known) {
      throw slicekit::ValidationError(
          fmt::format("config {}: unknown key '{}'", path, key));
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "slicekit: slicing-aided inference and fine-tuning toolkit for small "
      "object detection.\n\nPrecedence: explicit flags override --config "
      "values, which override defaults. Exit codes: 0 success, 1 invalid "
      "arguments or configuration, 2 runtime failure."};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  std::string config_path;
  bool quiet = false;
  app.add_option("--config", config_path,
                 "JSON object whose keys are flag names without leading dashes");
  app.add_flag("-q,--quiet", quiet, "Only log errors");
  auto commands = slicekit::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (quiet) spdlog::set_level(spdlog::level::err);
  spdlog::set_pattern("[%l] %v");

  try {
    for (const auto& c : commands) {
      if (!c->app()->parsed()) continue;
      if (!config_path.empty()) c->options().apply(load_config(config_path, commands));
      return c->run();
    }
  } catch (const slicekit::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
