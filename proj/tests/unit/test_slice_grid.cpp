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
#include <random>

#include "doctest.h"
#include "reference_oracles.hpp"
#include "slicekit/error.hpp"
#include "slicekit/slice_grid.hpp"

using namespace slicekit;

namespace {

std::vector<std::pair<int, int>> origins(const std::vector<SliceRect>& s) {
  std::vector<std::pair<int, int>> out;
  for (const auto& r : s) out.emplace_back(r.x(), r.y());
  return out;
}

}  // namespace

TEST_CASE("patch covering the image gives one slice") {
  const auto s = compute_slice_grid(640, 640, {640, 640, 0.25});
  REQUIRE(s.size() == 1);
  CHECK(s[0].rect == BBox(0, 0, 640, 640));
  CHECK(s[0].index == 0);

  const auto big = compute_slice_grid(300, 200, {512, 512, 0.25});
  REQUIRE(big.size() == 1);
  CHECK(big[0].rect == BBox(0, 0, 300, 200));
}

TEST_CASE("1024x1024, 512 patches, 25% overlap") {
  // step = 512 - ceil(128) = 384; 768 clamps to 1024 - 512 = 512
  CHECK(axis_offsets(1024, 512, 0.25) == std::vector<int>{0, 384, 512});
  const auto s = compute_slice_grid(1024, 1024, {512, 512, 0.25});
  REQUIRE(s.size() == 9);
  CHECK(origins(s) == std::vector<std::pair<int, int>>{
                          {0, 0}, {384, 0}, {512, 0}, {0, 384}, {384, 384},
                          {512, 384}, {0, 512}, {384, 512}, {512, 512}});
  CHECK(reference::brute_force_coverage(1024, 1024, s));
}

TEST_CASE("800x600, 512 patches, 20% overlap") {
  // overlap px = ceil(102.4) = 103, step 409
  CHECK(axis_offsets(800, 512, 0.2) == std::vector<int>{0, 288});
  CHECK(axis_offsets(600, 512, 0.2) == std::vector<int>{0, 88});
  const auto s = compute_slice_grid(800, 600, {512, 512, 0.2});
  REQUIRE(s.size() == 4);
  CHECK(origins(s) == std::vector<std::pair<int, int>>{{0, 0}, {288, 0}, {0, 88}, {288, 88}});
  CHECK(reference::brute_force_coverage(800, 600, s));
}

TEST_CASE("overlap products do not round up a whole pixel") {
  // 640 * 0.1 must give 64 px of overlap, not 65.
  const auto xs = axis_offsets(2000, 640, 0.1);
  CHECK(xs[1] == 576);
}

TEST_CASE("grid rejects invalid specs") {
  CHECK_THROWS_AS(compute_slice_grid(100, 100, {0, 10, 0.1}), ValidationError);
  CHECK_THROWS_AS(compute_slice_grid(100, 100, {10, 10, 1.0}), ValidationError);
  CHECK_THROWS_AS(compute_slice_grid(0, 100, {10, 10, 0.1}), ValidationError);
}

TEST_CASE("coverage_check examples") {
  CHECK_FALSE(coverage_check(200, 200, std::vector<SliceRect>{{BBox(0, 0, 100, 100), 0, 1.0}}));
  CHECK(coverage_check(200, 200, std::vector<SliceRect>{{BBox(0, 0, 200, 200), 0, 1.0}}));
  CHECK(coverage_check(1024, 1024, compute_slice_grid(1024, 1024, {512, 512, 0.25})));
  // A one-pixel gap in the middle.
  const std::vector<SliceRect> gap{{BBox(0, 0, 50, 100), 0, 1.0}, {BBox(51, 0, 100, 100), 1, 1.0}};
  CHECK_FALSE(coverage_check(100, 100, gap));
  CHECK_FALSE(coverage_check(100, 100, std::vector<SliceRect>{}));
}

TEST_CASE("coverage_check agrees with the brute-force pixel oracle") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> dim(1, 120);
  for (int trial = 0; trial < 400; ++trial) {
    const int w = dim(gen);
    const int h = dim(gen);
    std::vector<SliceRect> slices;
    const int n = std::uniform_int_distribution<int>(1, 6)(gen);
    for (int i = 0; i < n; ++i) {
      const int x0 = std::uniform_int_distribution<int>(0, w - 1)(gen);
      const int y0 = std::uniform_int_distribution<int>(0, h - 1)(gen);
      const int x1 = std::uniform_int_distribution<int>(x0 + 1, w)(gen);
      const int y1 = std::uniform_int_distribution<int>(y0 + 1, h)(gen);
      slices.push_back({BBox(x0, y0, x1, y1), i, 1.0});
    }
    if (trial % 3 == 0) slices.push_back({BBox(0, 0, w, h), n, 1.0});
    CHECK(coverage_check(w, h, slices) == reference::brute_force_coverage(w, h, slices));
  }
}

TEST_CASE("grid invariants on random small images match the pixel oracle") {
  std::mt19937_64 gen(11);
  const double overlaps[] = {0.0, 0.1, 0.2, 0.25, 0.5};
  for (int trial = 0; trial < 200; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 300)(gen);
    const int h = std::uniform_int_distribution<int>(1, 300)(gen);
    const int m = std::uniform_int_distribution<int>(16, 128)(gen);
    const int n = std::uniform_int_distribution<int>(16, 128)(gen);
    const double ov = overlaps[trial % 5];
    const auto s = compute_slice_grid(w, h, {m, n, ov});
    CHECK(reference::brute_force_coverage(w, h, s));
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i].index == static_cast<int>(i));
      CHECK(s[i].rect.x_min() >= 0);
      CHECK(s[i].rect.y_min() >= 0);
      CHECK(s[i].rect.x_max() <= w);
      CHECK(s[i].rect.y_max() <= h);
      CHECK(s[i].width() <= m);
      CHECK(s[i].height() <= n);
      if (i > 0) {
        // Row-major: y outer, x inner.
        const bool same_row = s[i].y() == s[i - 1].y();
        CHECK((same_row ? s[i].x() > s[i - 1].x() : s[i].y() > s[i - 1].y()));
      }
    }
    CHECK(compute_slice_grid(w, h, {m, n, ov}) == s);
  }
}
