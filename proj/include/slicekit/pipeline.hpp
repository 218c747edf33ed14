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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slicekit/detector.hpp"
#include "slicekit/merge.hpp"
#include "slicekit/slice_grid.hpp"
#include "slicekit/types.hpp"

namespace slicekit {

struct PipelineConfig {
  GridSpec grid;
  // Per-patch resize width. Unset means twice the patch width.
  std::optional<int> target_width;
  // Run the detector on the slice grid. Turning this off with
  // full_inference on gives plain full-image inference.
  bool sliced_inference = true;
  bool full_inference = false;
  int fi_target_width = 1333;
  MergeConfig merge;
  std::uint64_t seed = 0;
  int parallelism = 1;
  // Abort the image when a patch fails instead of skipping the patch.
  bool strict = false;
  // Shuffles the order patches are dispatched in. Diagnostic only: the
  // merged result must not change.
  std::optional<std::uint64_t> patch_order_seed;

  int effective_target_width() const {
    return target_width.value_or(2 * grid.patch_w);
  }
  void validate() const;
};

struct ImageInput {
  ImageId id = 0;
  ImageRef ref;
  int width = 1;
  int height = 1;
};

/// Patch-resized coordinates -> original image coordinates.
double to_image_x(double x, const SliceRect& slice);
double to_image_y(double y, const SliceRect& slice);
/// Original image coordinates -> patch-resized coordinates.
double to_patch_x(double x, const SliceRect& slice);
double to_patch_y(double y, const SliceRect& slice);

/// Maps a detection from resized-patch coordinates back to the image and
/// clamps it to [0, W) x [0, H). nullopt when nothing is left after
/// clamping.
std::optional<Detection> remap_detection(const Detection& det,
                                         const SliceRect& slice, int image_w,
                                         int image_h);

struct ImageInferenceResult {
  std::vector<Detection> detections;  // merged, canonical order
  int patches = 0;                    // detector calls on grid patches
  int failed_patches = 0;
  bool full_inference = false;
};

/// Slice, detect every patch (and the full image when FI is on), remap and
/// merge. Deterministic for fixed inputs whatever the parallelism or
/// dispatch order. Detections whose category is not in known_categories
/// (when given) are dropped with a warning, or rejected when strict.
ImageInferenceResult run_sliced_inference(
    const ImageInput& image, const PipelineConfig& config, Detector& detector,
    const std::set<CategoryId>* known_categories = nullptr);

struct ImageRunStats {
  ImageId image_id = 0;
  int patches = 0;
  int detections = 0;
  int failed_patches = 0;
  double millis = 0.0;
};

struct DatasetRunReport {
  std::vector<ImageRunStats> images;
  long total_patches = 0;
  long total_detections = 0;
  double total_millis = 0.0;

  std::string to_json() const;
};

struct DatasetRunOutput {
  std::vector<ImageDetection> predictions;
  DatasetRunReport report;
};

/// Runs every image of the dataset through run_sliced_inference. Image
/// files are looked up as image_root / file_name.
DatasetRunOutput run_dataset_inference(const CocoDataset& dataset,
                                       const std::filesystem::path& image_root,
                                       const PipelineConfig& config,
                                       Detector& detector);

/// Same, writing the COCO results file and the sidecar report. On failure
/// the predictions gathered so far are flushed before rethrowing.
DatasetRunReport run_dataset_inference(const CocoDataset& dataset,
                                       const std::filesystem::path& image_root,
                                       const PipelineConfig& config,
                                       Detector& detector,
                                       const std::filesystem::path& out_path,
                                       const std::filesystem::path& report_path);

}  // namespace slicekit
