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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slicekit/rng.hpp"
#include "slicekit/slice_grid.hpp"
#include "slicekit/types.hpp"

namespace slicekit {

/// Inclusive ranges the patch width (M) and height (N) are drawn from.
struct DimsRange {
  int m_min = 480;
  int m_max = 640;
  int n_min = 480;
  int n_max = 640;
};

struct SliceJobConfig {
  DimsRange dims;
  double overlap_ratio = 0.25;
  // A clipped annotation is kept iff clipped_area / original_area >= this.
  double min_area_ratio = 0.1;
  bool include_originals = true;
  // Inclusive range for the recorded training resize width.
  std::pair<int, int> resize_width_range{800, 1333};
  std::uint64_t seed = 0;
  // Abort on an unreadable image instead of skipping it.
  bool strict = false;
  int parallelism = 1;

  void validate() const;
};

/// Draws (M, N) uniformly from the range, M first.
std::pair<int, int> sample_patch_dims(Rng& rng, const DimsRange& range);

/// Intersects each annotation with the slice and moves it to patch-local
/// coordinates. Kept iff the intersection has positive area and
/// intersection_area / original_area >= min_area_ratio. Output ids run
/// 1, 2, ... in input order; image_id is left at 0 for the caller to set.
std::vector<Annotation> clip_annotations(std::span<const Annotation> annotations,
                                         const SliceRect& slice,
                                         double min_area_ratio);

struct FinetuneResult {
  CocoDataset dataset;
  std::vector<std::string> skipped_images;  // unreadable inputs
  int patch_count = 0;
};

/// Builds the slicing-aided fine-tuning dataset: one patch image per grid
/// cell of every source image (one random (M, N) per source image), the
/// originals when requested, and the clipped annotations. Writes
/// out_dir/images/{stem}_{x}_{y}_{w}_{h}.png and out_dir/annotations.json.
/// Output ids are assigned in (source image id, patch index) order, so the
/// result does not depend on parallelism.
FinetuneResult build_finetune_dataset(const CocoDataset& dataset,
                                      const std::filesystem::path& image_root,
                                      const std::filesystem::path& out_dir,
                                      const SliceJobConfig& config);

}  // namespace slicekit
