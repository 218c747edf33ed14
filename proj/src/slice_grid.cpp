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
#include "slicekit/slice_grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slicekit/error.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

void GridSpec::validate() const {
  if (patch_w < 1 || patch_h < 1) {
    throw ValidationError(
        fmt::format("patch size must be >= 1, got {}x{}", patch_w, patch_h));
  }
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw ValidationError(
        fmt::format("overlap ratio must be in [0, 1), got {}", overlap_ratio));
  }
}

std::vector<int> axis_offsets(int extent, int patch, double overlap_ratio) {
  if (patch >= extent) return {0};
  // 1e-9 keeps products such as 640 * 0.1 from rounding up a whole pixel.
  const int overlap_px =
      static_cast<int>(std::ceil(patch * overlap_ratio - 1e-9));
  const int step = std::max(1, patch - overlap_px);
  std::vector<int> offsets;
  for (int o = 0;; o += step) {
    if (o + patch >= extent) {
      offsets.push_back(extent - patch);
      break;
    }
    offsets.push_back(o);
  }
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  return offsets;
}

std::vector<SliceRect> compute_slice_grid(int image_w, int image_h,
                                          const GridSpec& spec) {
  if (image_w < 1 || image_h < 1) {
    throw ValidationError(
        fmt::format("image size must be >= 1, got {}x{}", image_w, image_h));
  }
  spec.validate();
  const auto xs = axis_offsets(image_w, spec.patch_w, spec.overlap_ratio);
  const auto ys = axis_offsets(image_h, spec.patch_h, spec.overlap_ratio);
  const int w = std::min(spec.patch_w, image_w);
  const int h = std::min(spec.patch_h, image_h);

  std::vector<SliceRect> slices;
  slices.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) {
      slices.push_back(SliceRect{BBox(x, y, x + w, y + h),
                                 static_cast<int>(slices.size()), 1.0});
    }
  }
  return slices;
}

namespace {

std::vector<double> cell_edges(std::span<const SliceRect> slices, int extent,
                               bool horizontal) {
  std::vector<double> edges{0.0, static_cast<double>(extent)};
  for (const auto& s : slices) {
    const double lo = horizontal ? s.rect.x_min() : s.rect.y_min();
    const double hi = horizontal ? s.rect.x_max() : s.rect.y_max();
    if (lo > 0.0 && lo < extent) edges.push_back(lo);
    if (hi > 0.0 && hi < extent) edges.push_back(hi);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

/// Number of slices covering each cell of the grid formed by all slice
/// edges, built with a 2-D difference array.
class CellCover {
 public:
  CellCover(std::span<const SliceRect> slices, int image_w, int image_h)
      : xe_(cell_edges(slices, image_w, true)),
        ye_(cell_edges(slices, image_h, false)),
        nx_(xe_.size() - 1),
        counts_((xe_.size()) * (ye_.size()), 0) {
    const auto index = [](const std::vector<double>& edges, double v) {
      v = std::clamp(v, edges.front(), edges.back());
      return static_cast<std::size_t>(
          std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
    };
    const std::size_t stride = nx_ + 1;
    for (const auto& s : slices) {
      const auto x0 = index(xe_, s.rect.x_min());
      const auto x1 = index(xe_, s.rect.x_max());
      const auto y0 = index(ye_, s.rect.y_min());
      const auto y1 = index(ye_, s.rect.y_max());
      if (x0 >= x1 || y0 >= y1) continue;
      ++counts_[y0 * stride + x0];
      --counts_[y0 * stride + x1];
      --counts_[y1 * stride + x0];
      ++counts_[y1 * stride + x1];
    }
    for (std::size_t j = 0; j < ye_.size(); ++j) {
      for (std::size_t i = 0; i < stride; ++i) {
        auto& c = counts_[j * stride + i];
        if (i > 0) c += counts_[j * stride + i - 1];
        if (j > 0) c += counts_[(j - 1) * stride + i];
        if (i > 0 && j > 0) c -= counts_[(j - 1) * stride + i - 1];
      }
    }
  }

  std::size_t columns() const { return nx_; }
  std::size_t rows() const { return ye_.size() - 1; }
  const std::vector<double>& x_edges() const { return xe_; }
  const std::vector<double>& y_edges() const { return ye_; }
  bool cell_covered(std::size_t i, std::size_t j) const {
    return counts_[j * (nx_ + 1) + i] > 0;
  }
  bool pixel_covered(double px, double py) const {
    const auto i = std::upper_bound(xe_.begin(), xe_.end(), px) - xe_.begin() - 1;
    const auto j = std::upper_bound(ye_.begin(), ye_.end(), py) - ye_.begin() - 1;
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= columns() ||
        static_cast<std::size_t>(j) >= rows()) {
      return false;
    }
    return cell_covered(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }

 private:
  std::vector<double> xe_;
  std::vector<double> ye_;
  std::size_t nx_;
  std::vector<long> counts_;
};

}  // namespace

bool coverage_check(int image_w, int image_h,
                    std::span<const SliceRect> slices) {
  if (slices.empty() || image_w < 1 || image_h < 1) return false;

  const CellCover cover(slices, image_w, image_h);
  const auto& xe = cover.x_edges();
  const auto& ye = cover.y_edges();
  for (std::size_t j = 0; j < cover.rows(); ++j) {
    // Pixel centres are integers; the first pixel of a cell is its lower
    // edge rounded up.
    if (std::ceil(ye[j]) >= ye[j + 1]) continue;
    for (std::size_t i = 0; i < cover.columns(); ++i) {
      if (std::ceil(xe[i]) >= xe[i + 1]) continue;
      if (!cover.cell_covered(i, j)) return false;
    }
  }

  constexpr long long kExhaustiveLimit = 4096LL * 4096LL;
  if (static_cast<long long>(image_w) * image_h > kExhaustiveLimit) {
    // 64x64 strata, one pixel drawn per stratum.
    Rng rng(derive_seed(static_cast<std::uint64_t>(image_w) << 32 |
                            static_cast<std::uint32_t>(image_h),
                        "coverage"));
    constexpr int kStrata = 64;
    for (int sy = 0; sy < kStrata; ++sy) {
      for (int sx = 0; sx < kStrata; ++sx) {
        const auto x0 = static_cast<std::int64_t>(image_w) * sx / kStrata;
        const auto x1 = static_cast<std::int64_t>(image_w) * (sx + 1) / kStrata;
        const auto y0 = static_cast<std::int64_t>(image_h) * sy / kStrata;
        const auto y1 = static_cast<std::int64_t>(image_h) * (sy + 1) / kStrata;
        if (x1 <= x0 || y1 <= y0) continue;
        const auto px = rng.uniform_int(x0, x1 - 1);
        const auto py = rng.uniform_int(y0, y1 - 1);
        if (!cover.pixel_covered(static_cast<double>(px),
                                 static_cast<double>(py))) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace slicekit
