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

#include "slicekit/geometry.hpp"

namespace slicekit {

/// Patch size and fractional overlap between adjacent patches.
struct GridSpec {
  int patch_w = 640;
  int patch_h = 640;
  double overlap_ratio = 0.25;

  /// Throws ValidationError unless patch dims >= 1 and overlap in [0, 1).
  void validate() const;
};

/// One patch of the grid, in original-image pixels.
struct SliceRect {
  BBox rect;
  int index = 0;
  // Factor applied to the patch before detection.
  double resize_scale = 1.0;

  int x() const { return static_cast<int>(rect.x_min()); }
  int y() const { return static_cast<int>(rect.y_min()); }
  int width() const { return static_cast<int>(rect.width()); }
  int height() const { return static_cast<int>(rect.height()); }

  friend bool operator==(const SliceRect&, const SliceRect&) = default;
};

/// Patch origins along one axis. step = patch - ceil(patch * overlap); the
/// last origin is clamped to extent - patch so the final patch is flush
/// with the edge. A patch at least as large as the extent gives {0}.
std::vector<int> axis_offsets(int extent, int patch, double overlap_ratio);

/// Row-major (y outer, x inner) grid covering the whole image.
std::vector<SliceRect> compute_slice_grid(int image_w, int image_h,
                                          const GridSpec& spec);

/// True iff every pixel of the image lies inside at least one slice.
/// Exact: rectangles are integer aligned, so membership is constant on the
/// cells of the arrangement formed by the slice edges, and one
/// representative pixel per cell decides it. Images larger than 4096^2 fall
/// back to testing a stratified sample of pixels on top of the cell check.
bool coverage_check(int image_w, int image_h, std::span<const SliceRect> slices);

}  // namespace slicekit
