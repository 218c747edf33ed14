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
#include "slicekit/replay_detector.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"

namespace slicekit {

using nlohmann::json;

std::string replay_key(const DetectRequest& request) {
  const auto& r = request.region;
  return fmt::format("{}:{}:{}:{}:{}:{}", request.image_id,
                     std::llround(r.x_min()), std::llround(r.y_min()),
                     std::llround(r.x_max()), std::llround(r.y_max()),
                     request.target_width);
}

PredictionStore PredictionStore::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("replay store: malformed JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ParseError("replay store must be a JSON object");

  PredictionStore store;
  for (const auto& [key, arr] : doc.items()) {
    if (!arr.is_array()) {
      throw ParseError(fmt::format("replay store: \"{}\" is not an array", key));
    }
    std::vector<Detection> dets;
    for (const auto& j : arr) {
      try {
        const auto b = j.at("bbox").get<std::vector<double>>();
        if (b.size() != 4) throw ParseError("bbox must have 4 entries");
        auto box = BBox::make(b[0], b[1], b[2], b[3]);
        if (!box) throw GeometryError("degenerate bbox");
        dets.push_back(Detection{j.at("category_id").get<CategoryId>(),
                                 j.at("score").get<double>(), *box,
                                 DetectionSource::full_image()});
      } catch (const json::exception& e) {
        throw ParseError(
            fmt::format("replay store: bad entry under \"{}\": {}", key,
                        e.what()));
      } catch (const Error& e) {
        throw ParseError(
            fmt::format("replay store: bad entry under \"{}\": {}", key,
                        e.what()));
      }
    }
    store.entries_.emplace(key, std::move(dets));
  }
  return store;
}

PredictionStore PredictionStore::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

std::string PredictionStore::dump() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, dets] : entries_) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += json(key).dump() + ": [";
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const auto& d = dets[i];
      if (i > 0) out += ", ";
      // Six decimals: replayed boxes are re-clamped and merged, so they
      // need more precision than the 2-decimal COCO output.
      out += fmt::format(
          "{{\"bbox\": [{}, {}, {}, {}], \"score\": {}, \"category_id\": {}}}",
          format_fixed(d.bbox.x_min(), 6), format_fixed(d.bbox.y_min(), 6),
          format_fixed(d.bbox.x_max(), 6), format_fixed(d.bbox.y_max(), 6),
          format_fixed(d.score, 6), d.category_id);
    }
    out += "]";
  }
  out += first ? "}\n" : "\n}\n";
  return out;
}

void PredictionStore::save(const std::filesystem::path& path) const {
  write_text_file(path, dump());
}

const std::vector<Detection>* PredictionStore::find(
    const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void PredictionStore::put(std::string key, std::vector<Detection> detections) {
  entries_.insert_or_assign(std::move(key), std::move(detections));
}

std::vector<Detection> ReplayDetector::detect(const DetectRequest& request) {
  const auto key = replay_key(request);
  if (const auto* hit = store_.find(key)) return *hit;
  if (strict_) {
    throw DetectorError(fmt::format("replay store has no entry for key {}", key));
  }
  spdlog::warn("replay store has no entry for key {}; returning no detections",
               key);
  return {};
}

std::vector<Detection> RecordingDetector::detect(const DetectRequest& request) {
  auto dets = inner_.detect(request);
  std::lock_guard lock(mu_);
  store_.put(replay_key(request), dets);
  return dets;
}

PredictionStore RecordingDetector::store() const {
  std::lock_guard lock(mu_);
  return store_;
}

}  // namespace slicekit
