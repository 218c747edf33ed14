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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slicekit/geometry.hpp"

namespace slicekit {

using ImageId = std::int64_t;
using CategoryId = std::int64_t;
using AnnotationId = std::int64_t;

/// Where a detection came from. Diagnostics only; never serialized into
/// COCO results.
struct DetectionSource {
  enum class Kind { kPatch, kFullImage };
  Kind kind = Kind::kFullImage;
  int patch_index = -1;

  static DetectionSource patch(int index) { return {Kind::kPatch, index}; }
  static DetectionSource full_image() { return {Kind::kFullImage, -1}; }

  friend auto operator<=>(const DetectionSource&,
                          const DetectionSource&) = default;
};

struct Detection {
  CategoryId category_id = 0;
  double score = 0.0;  // [0, 1]
  BBox bbox;
  DetectionSource source = DetectionSource::full_image();

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// A detection tied to the image it was produced for (COCO results entry).
struct ImageDetection {
  ImageId image_id = 0;
  Detection detection;

  friend bool operator==(const ImageDetection&,
                         const ImageDetection&) = default;
};

struct Annotation {
  AnnotationId id = 0;
  ImageId image_id = 0;
  CategoryId category_id = 0;
  BBox bbox;
  double area = 0.0;
  bool iscrowd = false;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Sidecar metadata attached by the dataset slicer.
struct PatchOrigin {
  ImageId source_image_id = 0;
  int x = 0;
  int y = 0;
  friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

// Aspect-preserving resize target for the training framework.
struct ResizeHint {
  int width = 0;
  int height = 0;
  friend bool operator==(const ResizeHint&, const ResizeHint&) = default;
};

struct ImageRecord {
  ImageId id = 0;
  std::string file_name;
  int width = 1;
  int height = 1;
  std::optional<PatchOrigin> patch_origin;
  std::optional<ResizeHint> resize;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Category {
  CategoryId id = 0;
  std::string name;
  friend bool operator==(const Category&, const Category&) = default;
};

struct CocoDataset {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;

  /// Throws ReferenceError / GeometryError / ValidationError when an
  /// invariant is broken (duplicate ids, dangling references, bad sizes).
  void validate() const;

  const ImageRecord* find_image(ImageId id) const noexcept;
  bool has_category(CategoryId id) const noexcept;

  friend bool operator==(const CocoDataset&, const CocoDataset&) = default;
};

}  // namespace slicekit
