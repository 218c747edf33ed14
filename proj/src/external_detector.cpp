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
#include "slicekit/external_detector.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "slicekit/error.hpp"

namespace slicekit {

using nlohmann::json;

namespace {

std::string truncate_for_log(std::string_view line) {
  constexpr std::size_t kMax = 200;
  if (line.size() <= kMax) return std::string(line);
  return std::string(line.substr(0, kMax)) + "...";
}

void ignore_sigpipe() {
  static const bool once = [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)once;
}

}  // namespace

std::string encode_request(const DetectRequest& request) {
  const auto* path = std::get_if<std::filesystem::path>(&request.image);
  if (path == nullptr) {
    throw DetectorError("external backend requires an image path");
  }
  const auto& r = request.region;
  return fmt::format(
      "{{\"id\": {}, \"image\": {}, \"region\": [{}, {}, {}, {}], "
      "\"target_width\": {}}}",
      request.request_id, json(path->string()).dump(), r.x_min(), r.y_min(),
      r.x_max(), r.y_max(), request.target_width);
}

std::vector<Detection> decode_response(std::string_view line,
                                       const DetectRequest& request,
                                       int* clamped, int* dropped) {
  const auto fail = [&](std::string_view why) {
    return ProtocolError(fmt::format("malformed response ({}): {}", why,
                                     truncate_for_log(line)));
  };
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error&) {
    throw fail("not JSON");
  }
  if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_number_integer()) {
    throw fail("missing integer id");
  }
  if (doc["id"].get<std::int64_t>() != request.request_id) {
    throw fail(fmt::format("expected id {}", request.request_id));
  }
  if (!doc.contains("detections") || !doc["detections"].is_array()) {
    throw fail("missing detections array");
  }

  const double out_w = request.resized_width();
  const double out_h = request.resized_height();
  std::vector<Detection> out;
  for (const auto& j : doc["detections"]) {
    if (!j.is_object() || !j.contains("bbox") || !j["bbox"].is_array() ||
        j["bbox"].size() != 4 || !j.contains("score") ||
        !j["score"].is_number() || !j.contains("category_id") ||
        !j["category_id"].is_number_integer()) {
      throw fail("bad detection entry");
    }
    std::array<double, 4> b{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!j["bbox"][i].is_number()) throw fail("bbox entries must be numbers");
      b[i] = j["bbox"][i].get<double>();
    }
    const double score = j["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) throw fail("score outside [0, 1]");

    const std::array<double, 4> c{std::clamp(b[0], 0.0, out_w),
                                  std::clamp(b[1], 0.0, out_h),
                                  std::clamp(b[2], 0.0, out_w),
                                  std::clamp(b[3], 0.0, out_h)};
    if (c != b) {
      spdlog::warn(
          "request {}: box [{}, {}, {}, {}] exceeds resized region {}x{}; "
          "clamped",
          request.request_id, b[0], b[1], b[2], b[3], out_w, out_h);
      if (clamped != nullptr) ++*clamped;
    }
    auto box = BBox::make(c[0], c[1], c[2], c[3]);
    if (!box) {
      spdlog::warn("request {}: degenerate box dropped", request.request_id);
      if (dropped != nullptr) ++*dropped;
      continue;
    }
    out.push_back(Detection{j["category_id"].get<CategoryId>(), score, *box,
                            DetectionSource::full_image()});
  }
  return out;
}

ChildProcess::ChildProcess(std::string command) : command_(std::move(command)) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw ProtocolError(fmt::format("pipe failed: {}", std::strerror(errno)));
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProtocolError(fmt::format("pipe failed: {}", std::strerror(errno)));
  }
  pid_ = fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw ProtocolError(fmt::format("fork failed: {}", std::strerror(errno)));
  }
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ChildProcess::~ChildProcess() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ <= 0) return;
  // Closing stdin asks the child to exit; give it a moment before killing.
  for (int i = 0; i < 200; ++i) {
    if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
}

void ChildProcess::write_line(std::string_view line) {
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(fmt::format("detector process '{}' closed its input: {}",
                                      command_, std::strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ChildProcess::read_line(
    std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      throw ProtocolError(fmt::format(
          "detector process '{}' timed out after {} ms", command_,
          timeout.count()));
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(
                                      remaining.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(fmt::format("poll failed: {}", std::strerror(errno)));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(fmt::format("read from '{}' failed: {}", command_,
                                      std::strerror(errno)));
    }
    if (n == 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ExternalDetector::ExternalDetector(ExternalConfig config)
    : config_(std::move(config)) {
  if (config_.command.empty()) {
    throw ValidationError("external backend needs a command");
  }
  if (config_.workers < 1) {
    throw ValidationError("external backend needs at least one worker");
  }
  for (int i = 0; i < config_.workers; ++i) {
    auto child = std::make_unique<ChildProcess>(config_.command);
    const auto hello = child->read_line(config_.timeout);
    if (!hello) {
      throw ProtocolError(fmt::format(
          "detector process '{}' exited before the handshake", config_.command));
    }
    json doc;
    try {
      doc = json::parse(*hello);
    } catch (const json::parse_error&) {
      throw ProtocolError(fmt::format("bad handshake from '{}': {}",
                                      config_.command, truncate_for_log(*hello)));
    }
    if (!doc.is_object() || doc.value("protocol", "") != kProtocolName ||
        doc.value("version", -1) != kProtocolVersion) {
      throw ProtocolError(fmt::format("bad handshake from '{}': {}",
                                      config_.command, truncate_for_log(*hello)));
    }
    idle_.push_back(child.get());
    workers_.push_back(std::move(child));
  }
}

ExternalDetector::~ExternalDetector() = default;

ChildProcess& ExternalDetector::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !idle_.empty(); });
  ChildProcess* w = idle_.back();
  idle_.pop_back();
  return *w;
}

void ExternalDetector::release(ChildProcess& worker) {
  {
    std::lock_guard lock(mu_);
    idle_.push_back(&worker);
  }
  cv_.notify_one();
}

std::vector<Detection> ExternalDetector::detect(const DetectRequest& request) {
  const std::string line = encode_request(request);
  ChildProcess& worker = acquire();
  std::vector<Detection> out;
  try {
    worker.write_line(line);
    const auto reply = worker.read_line(config_.timeout);
    if (!reply) {
      throw ProtocolError(fmt::format(
          "detector process '{}' closed its output", config_.command));
    }
    int clamped = 0;
    int dropped = 0;
    out = decode_response(*reply, request, &clamped, &dropped);
    clamped_ += clamped;
    dropped_ += dropped;
    ++requests_;
  } catch (...) {
    release(worker);
    throw;
  }
  release(worker);
  return out;
}

ExternalStats ExternalDetector::stats() const {
  return ExternalStats{requests_.load(), clamped_.load(), dropped_.load()};
}

}  // namespace slicekit
