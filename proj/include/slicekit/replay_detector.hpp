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

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/detector.hpp"

namespace slicekit {

/// "imageId:x0:y0:x1:y1:tw". Region coordinates are rounded to integers;
/// slice grids are integer aligned.
std::string replay_key(const DetectRequest& request);

/// Recorded detector responses keyed by replay_key(). Stored as a JSON
/// object mapping keys to arrays of
/// {"bbox": [x_min, y_min, x_max, y_max], "score": s, "category_id": c}.
class PredictionStore {
 public:
  static PredictionStore parse(std::string_view text);
  static PredictionStore load(const std::filesystem::path& path);
  std::string dump() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<Detection>* find(const std::string& key) const;
  void put(std::string key, std::vector<Detection> detections);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<Detection>> entries_;
};

/// Pure lookup. A missing key yields no detections and a warning, or a
/// DetectorError naming the key when strict.
class ReplayDetector final : public Detector {
 public:
  ReplayDetector(PredictionStore store, bool strict)
      : store_(std::move(store)), strict_(strict) {}

  std::vector<Detection> detect(const DetectRequest& request) override;

 private:
  PredictionStore store_;
  bool strict_;
};

/// Forwards to another detector and records every response, so a run can
/// later be replayed without the original backend.
class RecordingDetector final : public Detector {
 public:
  explicit RecordingDetector(Detector& inner) : inner_(inner) {}

  std::vector<Detection> detect(const DetectRequest& request) override;
  PredictionStore store() const;

 private:
  Detector& inner_;
  mutable std::mutex mu_;
  PredictionStore store_;
};

}  // namespace slicekit
