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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/detector.hpp"

namespace slicekit {

// Line-delimited JSON over the child's stdin/stdout. The child announces
// itself with {"protocol": "slicekit-detect", "version": 1}, then answers
// each request line with exactly one response line.
inline constexpr std::string_view kProtocolName = "slicekit-detect";
inline constexpr int kProtocolVersion = 1;

std::string encode_request(const DetectRequest& request);

/// Parses one response line for `request`. Boxes past the resized region
/// are clamped to it; `clamped` and `dropped` count clamped and
/// degenerate-after-clamp boxes. Throws ProtocolError on malformed input or
/// an id mismatch.
std::vector<Detection> decode_response(std::string_view line,
                                       const DetectRequest& request,
                                       int* clamped = nullptr,
                                       int* dropped = nullptr);

struct ExternalConfig {
  std::string command;
  int workers = 1;
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
};

struct ExternalStats {
  long requests = 0;
  long clamped_boxes = 0;
  long dropped_boxes = 0;
};

/// A child process speaking the line protocol on its stdin/stdout.
class ChildProcess {
 public:
  explicit ChildProcess(std::string command);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  void write_line(std::string_view line);
  /// nullopt on EOF. Throws ProtocolError on timeout.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);
  const std::string& command() const { return command_; }

 private:
  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Backend that forwards every request to a pool of child processes. Each
/// child serves one request at a time; responses are matched by id.
class ExternalDetector final : public Detector {
 public:
  explicit ExternalDetector(ExternalConfig config);
  ~ExternalDetector() override;

  std::vector<Detection> detect(const DetectRequest& request) override;
  ExternalStats stats() const;

 private:
  ChildProcess& acquire();
  void release(ChildProcess& worker);

  ExternalConfig config_;
  std::vector<std::unique_ptr<ChildProcess>> workers_;
  std::vector<ChildProcess*> idle_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::atomic<long> requests_{0};
  std::atomic<long> clamped_{0};
  std::atomic<long> dropped_{0};
};

}  // namespace slicekit
