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

#include <compare>
#include <optional>

namespace slicekit {

/// Axis-aligned box in pixel coordinates, half-open [x_min, x_max) x
/// [y_min, y_max). Construction rejects zero and negative area.
class BBox {
 public:
  /// Unit box at the origin.
  BBox() noexcept : BBox(Unchecked{}, 0.0, 0.0, 1.0, 1.0) {}
  /// Throws GeometryError when x_max <= x_min or y_max <= y_min.
  BBox(double x_min, double y_min, double x_max, double y_max);

  /// Non-throwing variant; nullopt for degenerate or non-finite input.
  static std::optional<BBox> make(double x_min, double y_min, double x_max,
                                  double y_max) noexcept;
  /// Builds from COCO [x, y, width, height].
  static BBox from_xywh(double x, double y, double w, double h);

  double x_min() const noexcept { return x_min_; }
  double y_min() const noexcept { return y_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_max() const noexcept { return y_max_; }
  double width() const noexcept { return x_max_ - x_min_; }
  double height() const noexcept { return y_max_ - y_min_; }
  double area() const noexcept { return width() * height(); }

  BBox translated(double dx, double dy) const;
  BBox scaled(double factor) const;

  // Positive-area intersection, nullopt when the boxes only touch or are
  // disjoint.
  std::optional<BBox> intersect(const BBox& other) const noexcept;
  // Clips to [0, width) x [0, height).
  std::optional<BBox> clamped(double width, double height) const noexcept;
  bool contains(const BBox& other) const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
  friend auto operator<=>(const BBox&, const BBox&) = default;

 private:
  struct Unchecked {};
  BBox(Unchecked, double x_min, double y_min, double x_max,
       double y_max) noexcept
      : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {}

  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

double intersection_area(const BBox& a, const BBox& b) noexcept;

/// Intersection over union, in [0, 1]. Symmetric, 1 for identical boxes.
double iou(const BBox& a, const BBox& b) noexcept;

}  // namespace slicekit
