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
#include "slicekit/image_io.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

#include <fmt/format.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "slicekit/error.hpp"

namespace slicekit {

ImageBuffer read_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty()) {
    throw IoError(fmt::format("cannot read image {}", path.string()));
  }
  ImageBuffer out{mat.cols, mat.rows, 3, {}};
  out.pixels.resize(static_cast<std::size_t>(mat.cols) * mat.rows * 3);
  for (int y = 0; y < mat.rows; ++y) {
    std::memcpy(out.pixels.data() + static_cast<std::size_t>(y) * mat.cols * 3,
                mat.ptr<std::uint8_t>(y), static_cast<std::size_t>(mat.cols) * 3);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  if (image.channels != 3 && image.channels != 1) {
    throw ValidationError("write_png supports 1 or 3 channels");
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const cv::Mat mat(image.height, image.width,
                    image.channels == 3 ? CV_8UC3 : CV_8UC1,
                    const_cast<std::uint8_t*>(image.pixels.data()));
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 3};
  std::vector<std::uint8_t> encoded;
  if (!cv::imencode(".png", mat, encoded, params)) {
    throw IoError(fmt::format("PNG encoding failed for {}", path.string()));
  }
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (f == nullptr) throw IoError(fmt::format("cannot write {}", path.string()));
  const std::size_t n = std::fwrite(encoded.data(), 1, encoded.size(), f);
  const bool ok = std::fclose(f) == 0 && n == encoded.size();
  if (!ok) throw IoError(fmt::format("write failed for {}", path.string()));
}

ImageBuffer crop(const ImageBuffer& image, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > image.width ||
      y + h > image.height) {
    throw ValidationError(fmt::format(
        "crop window ({}, {}, {}, {}) outside {}x{} image", x, y, w, h,
        image.width, image.height));
  }
  ImageBuffer out{w, h, image.channels, {}};
  const std::size_t row = static_cast<std::size_t>(w) * image.channels;
  out.pixels.resize(row * h);
  for (int r = 0; r < h; ++r) {
    const auto* src = image.pixels.data() +
                      (static_cast<std::size_t>(y + r) * image.width + x) *
                          image.channels;
    std::memcpy(out.pixels.data() + row * r, src, row);
  }
  return out;
}

ImageBuffer make_image(int width, int height, std::uint8_t b, std::uint8_t g,
                       std::uint8_t r) {
  ImageBuffer out{width, height, 3, {}};
  out.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    out.pixels[i] = b;
    out.pixels[i + 1] = g;
    out.pixels[i + 2] = r;
  }
  return out;
}

void fill_rect(ImageBuffer& image, int x0, int y0, int x1, int y1,
               std::uint8_t b, std::uint8_t g, std::uint8_t r) {
  x0 = std::clamp(x0, 0, image.width);
  x1 = std::clamp(x1, 0, image.width);
  y0 = std::clamp(y0, 0, image.height);
  y1 = std::clamp(y1, 0, image.height);
  for (int y = y0; y < y1; ++y) {
    auto* p = image.pixels.data() +
              (static_cast<std::size_t>(y) * image.width + x0) * 3;
    for (int x = x0; x < x1; ++x, p += 3) {
      p[0] = b;
      p[1] = g;
      p[2] = r;
    }
  }
}

}  // namespace slicekit
