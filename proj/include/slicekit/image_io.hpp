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

#include "slicekit/detector.hpp"

namespace slicekit {

/// Decodes any format OpenCV reads into 8-bit BGR. Throws IoError.
ImageBuffer read_image(const std::filesystem::path& path);

/// Lossless PNG; identical input gives identical bytes.
void write_png(const std::filesystem::path& path, const ImageBuffer& image);

/// Copy of the [x, x + w) x [y, y + h) window. Throws ValidationError when
/// the window leaves the image.
ImageBuffer crop(const ImageBuffer& image, int x, int y, int w, int h);

/// Solid image filled with one BGR color.
ImageBuffer make_image(int width, int height, std::uint8_t b, std::uint8_t g,
                       std::uint8_t r);

/// Fills [x0, x1) x [y0, y1), clipped to the image.
void fill_rect(ImageBuffer& image, int x0, int y0, int x1, int y1,
               std::uint8_t b, std::uint8_t g, std::uint8_t r);

}  // namespace slicekit
