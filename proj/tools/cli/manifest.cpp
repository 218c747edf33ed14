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
#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

#include <fmt/format.h>

#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"

#ifndef SLICEKIT_VERSION
#define SLICEKIT_VERSION "0.0.0"
#endif

namespace slicekit::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, decltype(&std::fclose)> file(
      std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw IoError(fmt::format("cannot open {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 initialisation failed");
  }
  std::array<unsigned char, 1 << 16> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), file.get())) > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), n);
  }
  if (std::ferror(file.get())) {
    throw IoError(fmt::format("read error on {}", path.string()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::set_config(nlohmann::ordered_json options) {
  options_ = std::move(options);
}

void RunManifest::add_resolved(const std::string& key,
                               nlohmann::ordered_json value) {
  resolved_[key] = std::move(value);
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), sha256_file(path));
}

void RunManifest::write(const std::filesystem::path& path) {
  const double millis = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
  nlohmann::ordered_json j;
  j["tool"] = "slicekit";
  j["version"] = SLICEKIT_VERSION;
  j["command"] = command_;
  j["options"] = options_;
  j["resolved"] = resolved_;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [p, digest] : inputs_) {
    j["inputs"].push_back({{"path", p}, {"sha256", digest}});
  }
  j["seed"] = seed_ ? nlohmann::ordered_json(*seed_) : nlohmann::ordered_json();
  j["timings"] = {{"total_millis", millis}};
  write_text_file(path, j.dump(1) + "\n");
}

std::filesystem::path RunManifest::beside(const std::filesystem::path& output,
                                          bool output_is_directory) {
  if (output_is_directory) return output / "manifest.json";
  auto p = output;
  p.replace_extension(".manifest.json");
  return p;
}

}  // namespace slicekit::cli
