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
#include "slicekit/merge.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "slicekit/error.hpp"
#include "slicekit/geometry.hpp"

namespace slicekit {

void MergeConfig::validate() const {
  if (!(t_m > 0.0 && t_m <= 1.0)) {
    throw ValidationError(
        fmt::format("t_m must be in (0, 1], got {}", t_m));
  }
  if (!(t_d >= 0.0 && t_d <= 1.0)) {
    throw ValidationError(
        fmt::format("t_d must be in [0, 1], got {}", t_d));
  }
}

bool canonical_less(const Detection& a, const Detection& b) noexcept {
  const auto key = [](const Detection& d) {
    return std::make_tuple(-d.score, d.bbox.x_min(), d.bbox.y_min(),
                           d.category_id, d.bbox.x_max(), d.bbox.y_max(),
                           d.source);
  };
  return key(a) < key(b);
}

void canonical_sort(std::vector<Detection>& detections) {
  std::sort(detections.begin(), detections.end(), canonical_less);
}

std::vector<Detection> nms(std::vector<Detection> detections,
                           const MergeConfig& config) {
  std::erase_if(detections,
                [&](const Detection& d) { return d.score < config.t_d; });
  canonical_sort(detections);

  std::vector<Detection> kept;
  kept.reserve(detections.size());
  for (auto& cand : detections) {
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          if (config.class_aware && k.category_id != cand.category_id) {
            return false;
          }
          return iou(k.bbox, cand.bbox) > config.t_m;
        });
    if (!suppressed) kept.push_back(std::move(cand));
  }
  return kept;
}

std::vector<Detection> merge_sources(std::span<const Detection> patch_dets,
                                     std::span<const Detection> fi_dets,
                                     const MergeConfig& config) {
  std::vector<Detection> all;
  all.reserve(patch_dets.size() + fi_dets.size());
  all.insert(all.end(), patch_dets.begin(), patch_dets.end());
  all.insert(all.end(), fi_dets.begin(), fi_dets.end());
  return nms(std::move(all), config);
}

}  // namespace slicekit
