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
#include "slicekit/oracle_detector.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slicekit/error.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

void VisibilityModel::validate() const {
  if (!(min_apparent_px >= 0.0)) {
    throw ValidationError("min_apparent_px must be >= 0");
  }
  if (!(score_saturation_px > 0.0)) {
    throw ValidationError("score_saturation_px must be > 0");
  }
  if (!(score_floor >= 0.0 && score_floor <= 1.0)) {
    throw ValidationError("score_floor must be in [0, 1]");
  }
  if (!(localization_noise_px >= 0.0)) {
    throw ValidationError("localization_noise_px must be >= 0");
  }
  if (!(min_visible_fraction >= 0.0 && min_visible_fraction <= 1.0)) {
    throw ValidationError("min_visible_fraction must be in [0, 1]");
  }
}

double VisibilityModel::score_for(double apparent_min_side) const {
  return std::clamp(apparent_min_side / score_saturation_px, score_floor, 1.0);
}

GroundTruthIndex::GroundTruthIndex(const CocoDataset& dataset) {
  for (const auto& img : dataset.images) by_image_[img.id];
  for (const auto& ann : dataset.annotations) {
    if (!ann.iscrowd) by_image_[ann.image_id].push_back(ann);
  }
}

const std::vector<Annotation>& GroundTruthIndex::objects(
    ImageId image_id) const {
  auto it = by_image_.find(image_id);
  if (it == by_image_.end()) {
    throw DetectorError(fmt::format("oracle: unknown image id {}", image_id));
  }
  return it->second;
}

std::vector<Detection> oracle_detect(const DetectRequest& request,
                                     const GroundTruthIndex& ground_truth,
                                     const VisibilityModel& visibility) {
  const auto& objects = ground_truth.objects(request.image_id);
  const BBox& region = request.region;
  const double scale = request.scale();
  const double out_w = request.resized_width();
  const double out_h = request.resized_height();

  // Jitter streams are keyed by (seed, image, region, annotation) so the
  // output never depends on call order.
  const std::uint64_t region_key = stable_hash(fmt::format(
      "{}:{}:{}:{}:{}:{}", request.image_id, region.x_min(), region.y_min(),
      region.x_max(), region.y_max(), request.target_width));

  std::vector<Detection> out;
  for (const auto& obj : objects) {
    const auto clipped = obj.bbox.intersect(region);
    if (!clipped) continue;
    if (clipped->area() < visibility.min_visible_fraction * obj.bbox.area()) {
      continue;
    }
    const double apparent =
        std::min(clipped->width(), clipped->height()) * scale;
    if (apparent < visibility.min_apparent_px) continue;

    BBox local = BBox((clipped->x_min() - region.x_min()) * scale,
                      (clipped->y_min() - region.y_min()) * scale,
                      (clipped->x_max() - region.x_min()) * scale,
                      (clipped->y_max() - region.y_min()) * scale);
    if (visibility.localization_noise_px > 0.0) {
      Rng rng(derive_seed(visibility.seed, "oracle-jitter",
                          region_key ^ mix64(static_cast<std::uint64_t>(obj.id))));
      const double n = visibility.localization_noise_px;
      const double dx0 = rng.uniform(-n, n);
      const double dy0 = rng.uniform(-n, n);
      const double dx1 = rng.uniform(-n, n);
      const double dy1 = rng.uniform(-n, n);
      if (auto jittered = BBox::make(local.x_min() + dx0, local.y_min() + dy0,
                                     local.x_max() + dx1, local.y_max() + dy1)) {
        if (auto inside = jittered->clamped(out_w, out_h)) local = *inside;
      }
    } else if (auto inside = local.clamped(out_w, out_h)) {
      local = *inside;
    }
    out.push_back(Detection{obj.category_id, visibility.score_for(apparent),
                            local, DetectionSource::full_image()});
  }
  return out;
}

OracleDetector::OracleDetector(GroundTruthIndex ground_truth,
                               VisibilityModel visibility)
    : ground_truth_(std::move(ground_truth)), visibility_(visibility) {
  visibility_.validate();
}

}  // namespace slicekit
