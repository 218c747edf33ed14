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
#pragma once

#include <memory>
#include <vector>

#include "CLI11.hpp"
#include "options.hpp"

namespace slicekit::cli {

class Command {
 public:
  virtual ~Command() = default;

  CLI::App* app() const { return app_; }
  const OptionTable& options() const { return options_; }
  virtual int run() = 0;

 protected:
  CLI::App* app_ = nullptr;
  OptionTable options_;
};

/// Adds grid, slice, predict, merge, evaluate, compare and bench.
std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root);

}  // namespace slicekit::cli
