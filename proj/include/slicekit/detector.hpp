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
#include <memory>
#include <variant>
#include <vector>

#include "slicekit/geometry.hpp"
#include "slicekit/types.hpp"

namespace slicekit {

/// Decoded pixels, row-major, interleaved channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;
};

using ImageRef =
    std::variant<std::filesystem::path, std::shared_ptr<const ImageBuffer>>;

/// One forward pass: the region of the image is resized, aspect preserved,
/// to target_width pixels wide before the detector sees it.
struct DetectRequest {
  ImageId image_id = 0;
  ImageRef image;
  BBox region;  // original-image pixels
  int target_width = 1;
  std::int64_t request_id = 0;

  double scale() const { return target_width / region.width(); }
  double resized_width() const { return target_width; }
  double resized_height() const { return region.height() * scale(); }
};

/// Detector contract. detect() returns boxes in resized-region coordinates
/// ([0, resized_width) x [0, resized_height)), must give the same answer for
/// the same request and must be safe to call from several threads.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const DetectRequest& request) = 0;
};

}  // namespace slicekit
