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
#include "slicekit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slicekit/error.hpp"

namespace slicekit {

namespace {

bool valid(double x_min, double y_min, double x_max, double y_max) {
  return std::isfinite(x_min) && std::isfinite(y_min) &&
         std::isfinite(x_max) && std::isfinite(y_max) && x_max > x_min &&
         y_max > y_min;
}

}  // namespace

BBox::BBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!valid(x_min, y_min, x_max, y_max)) {
    throw GeometryError(fmt::format("degenerate box ({}, {}, {}, {})", x_min,
                                    y_min, x_max, y_max));
  }
}

std::optional<BBox> BBox::make(double x_min, double y_min, double x_max,
                               double y_max) noexcept {
  if (!valid(x_min, y_min, x_max, y_max)) return std::nullopt;
  return BBox(Unchecked{}, x_min, y_min, x_max, y_max);
}

BBox BBox::from_xywh(double x, double y, double w, double h) {
  return BBox(x, y, x + w, y + h);
}

BBox BBox::translated(double dx, double dy) const {
  return BBox(x_min_ + dx, y_min_ + dy, x_max_ + dx, y_max_ + dy);
}

BBox BBox::scaled(double factor) const {
  return BBox(x_min_ * factor, y_min_ * factor, x_max_ * factor,
              y_max_ * factor);
}

std::optional<BBox> BBox::intersect(const BBox& other) const noexcept {
  return make(std::max(x_min_, other.x_min_), std::max(y_min_, other.y_min_),
              std::min(x_max_, other.x_max_), std::min(y_max_, other.y_max_));
}

std::optional<BBox> BBox::clamped(double width, double height) const noexcept {
  return make(std::clamp(x_min_, 0.0, width), std::clamp(y_min_, 0.0, height),
              std::clamp(x_max_, 0.0, width), std::clamp(y_max_, 0.0, height));
}

bool BBox::contains(const BBox& other) const noexcept {
  return other.x_min_ >= x_min_ && other.y_min_ >= y_min_ &&
         other.x_max_ <= x_max_ && other.y_max_ <= y_max_;
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double w =
      std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double h =
      std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BBox& a, const BBox& b) noexcept {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace slicekit
