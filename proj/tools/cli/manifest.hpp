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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace slicekit::cli {

/// Lowercase hex SHA-256 of the file contents. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

/// Reproducibility record written next to every output.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(nlohmann::ordered_json options);
  void add_resolved(const std::string& key, nlohmann::ordered_json value);
  void add_input(const std::filesystem::path& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// Stops the clock and writes the manifest.
  void write(const std::filesystem::path& path);

  /// preds.json -> preds.manifest.json; a directory gets manifest.json.
  static std::filesystem::path beside(const std::filesystem::path& output,
                                      bool output_is_directory);

 private:
  std::string command_;
  nlohmann::ordered_json options_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json resolved_ = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace slicekit::cli
