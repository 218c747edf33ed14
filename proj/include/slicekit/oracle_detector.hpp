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

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "slicekit/detector.hpp"
#include "slicekit/types.hpp"

namespace slicekit {

/// Apparent-size model of a detector. An object is found iff the smaller
/// side of its (region-clipped) box, measured after the region resize, is
/// at least min_apparent_px. score = clamp(apparent_min_side /
/// score_saturation_px, score_floor, 1).
struct VisibilityModel {
  double min_apparent_px = 32.0;
  double score_saturation_px = 128.0;
  double score_floor = 0.05;
  // Half-width of the uniform jitter added to every box edge, in
  // resized-region pixels.
  double localization_noise_px = 0.0;
  // Fraction of the object's area that must fall inside the region. 0
  // keeps every truncated object (pure clip-then-threshold).
  double min_visible_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  double score_for(double apparent_min_side) const;
};

/// Ground truth grouped per image, crowd regions excluded.
class GroundTruthIndex {
 public:
  GroundTruthIndex() = default;
  explicit GroundTruthIndex(const CocoDataset& dataset);

  /// Throws DetectorError for an unknown image id.
  const std::vector<Annotation>& objects(ImageId image_id) const;
  bool contains(ImageId image_id) const { return by_image_.contains(image_id); }

 private:
  std::unordered_map<ImageId, std::vector<Annotation>> by_image_;
};

std::vector<Detection> oracle_detect(const DetectRequest& request,
                                     const GroundTruthIndex& ground_truth,
                                     const VisibilityModel& visibility);

class OracleDetector final : public Detector {
 public:
  OracleDetector(GroundTruthIndex ground_truth, VisibilityModel visibility);

  std::vector<Detection> detect(const DetectRequest& request) override {
    return oracle_detect(request, ground_truth_, visibility_);
  }

 private:
  GroundTruthIndex ground_truth_;
  VisibilityModel visibility_;
};

}  // namespace slicekit
