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

#include <span>
#include <vector>

#include "slicekit/types.hpp"

namespace slicekit {

struct MergeConfig {
  double t_m = 0.5;  // IoU matching threshold, (0, 1]
  double t_d = 0.0;  // minimum score, [0, 1]
  bool class_aware = true;

  void validate() const;
};

/// Total order used before suppression: score descending, then x_min,
/// y_min, category_id ascending. Remaining fields only break exact ties so
/// the order never depends on input order.
bool canonical_less(const Detection& a, const Detection& b) noexcept;
void canonical_sort(std::vector<Detection>& detections);

/// Greedy hard NMS. Detections scoring below t_d are dropped first; then in
/// canonical order a detection is kept iff its IoU with every kept
/// detection (same category when class_aware) is <= t_m. A pair with IoU
/// exactly t_m survives.
std::vector<Detection> nms(std::vector<Detection> detections,
                           const MergeConfig& config);

/// Fuses patch and full-image detections. Full-image detections get no
/// priority beyond their scores.
std::vector<Detection> merge_sources(std::span<const Detection> patch_dets,
                                     std::span<const Detection> fi_dets,
                                     const MergeConfig& config);

/// Post-processing strategy hook. Only greedy NMS ships today.
class MergeStrategy {
 public:
  virtual ~MergeStrategy() = default;
  virtual std::vector<Detection> merge(std::vector<Detection> detections,
                                       const MergeConfig& config) const = 0;
};

class GreedyNms final : public MergeStrategy {
 public:
  std::vector<Detection> merge(std::vector<Detection> detections,
                               const MergeConfig& config) const override {
    return nms(std::move(detections), config);
  }
};

}  // namespace slicekit
