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

#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slicekit/error.hpp"

namespace slicekit::cli {

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

/// Flags of one subcommand, each mirrored by a key of the same name in the
/// shared JSON config file. Explicit flags win over config values, which
/// win over defaults.
class OptionTable {
 public:
  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& name, T& var,
                   const std::string& description) {
    CLI::Option* opt = app.add_option("--" + name, var, description);
    remember<T>(name, opt, var);
    return opt;
  }

  /// Boolean switch. When negatable, --no-<name> clears it.
  CLI::Option* flag(CLI::App& app, const std::string& name, bool& var,
                    const std::string& description, bool negatable = false) {
    const std::string spec =
        negatable ? "--" + name + ",!--no-" + name : "--" + name;
    const std::string shown =
        negatable ? description + (var ? " (default: on)" : " (default: off)")
                  : description;
    CLI::Option* opt = app.add_flag(spec, var, shown);
    remember<bool>(name, opt, var);
    return opt;
  }

  bool contains(const std::string& name) const {
    for (const auto& b : bindings_) {
      if (b.name == name) return true;
    }
    return false;
  }

  /// Applies every key this table knows to options not given on the
  /// command line.
  void apply(const nlohmann::json& config) const {
    for (const auto& b : bindings_) {
      if (!config.contains(b.name) || b.option->count() > 0) continue;
      try {
        b.set(config.at(b.name));
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config key '" + b.name + "': " + e.what());
      }
    }
  }

  nlohmann::ordered_json resolved() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& b : bindings_) out[b.name] = b.get();
    return out;
  }

 private:
  struct Binding {
    std::string name;
    CLI::Option* option;
    std::function<void(const nlohmann::json&)> set;
    std::function<nlohmann::ordered_json()> get;
  };

  template <typename T>
  void remember(const std::string& name, CLI::Option* opt, T& var) {
    Binding b{name, opt, {}, {}};
    if constexpr (is_optional<T>::value) {
      b.set = [&var](const nlohmann::json& j) {
        if (j.is_null()) {
          var.reset();
        } else {
          var = j.get<typename T::value_type>();
        }
      };
      b.get = [&var]() -> nlohmann::ordered_json {
        if (var) return *var;
        return nullptr;
      };
    } else {
      b.set = [&var](const nlohmann::json& j) { var = j.get<T>(); };
      b.get = [&var]() -> nlohmann::ordered_json { return var; };
    }
    bindings_.push_back(std::move(b));
  }

  std::vector<Binding> bindings_;
};

}  // namespace slicekit::cli
