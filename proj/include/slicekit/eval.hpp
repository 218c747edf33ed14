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

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slicekit/types.hpp"

namespace slicekit {

/// Half-open area range [lo, hi) in original-image pixels^2.
struct AreaRange {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double area) const { return area >= lo && area < hi; }
};

struct EvalConfig {
  double iou_threshold = 0.5;
  int max_detections = 500;  // per image, across categories
  AreaRange small{0.0, 32.0 * 32.0};
  AreaRange medium{32.0 * 32.0, 96.0 * 96.0};
  AreaRange large{96.0 * 96.0, std::numeric_limits<double>::infinity()};

  void validate() const;
};

struct EvalCounts {
  long gt_matched = 0;
  long gt_missed = 0;
  long pred_true_positive = 0;
  long pred_false_positive = 0;
};

/// AP values are nullopt when no category has ground truth in the range.
struct EvalResult {
  std::optional<double> ap50;
  std::optional<double> ap50_small;
  std::optional<double> ap50_medium;
  std::optional<double> ap50_large;
  std::map<CategoryId, std::optional<double>> per_category_ap;
  EvalCounts counts;

  std::string to_json() const;
  static EvalResult from_json(const std::string& text);
};

/// COCO protocol at a single IoU threshold: per image the highest scoring
/// max_detections predictions are kept, each prediction (score order) is
/// greedily matched to the unmatched ground truth with the highest IoU >=
/// threshold, crowd regions and out-of-range ground truth are ignored, and
/// AP is the mean over categories of the 101-point interpolated precision.
EvalResult evaluate(const CocoDataset& gt,
                    const std::vector<ImageDetection>& predictions,
                    const EvalConfig& config = {});

/// Aligned text table of AP50/s/m/l per run, with deltas against the first
/// row when there is more than one.
std::string compare_runs_table(
    const std::vector<std::pair<std::string, EvalResult>>& runs);
std::string compare_runs_csv(
    const std::vector<std::pair<std::string, EvalResult>>& runs);

}  // namespace slicekit
