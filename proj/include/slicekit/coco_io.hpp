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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slicekit/types.hpp"

namespace slicekit {

// COCO detection JSON. Boxes are xywh on disk and xyxy in memory. Output
// is deterministic: fixed key order, 2-decimal geometry.
CocoDataset parse_coco(std::string_view text);
CocoDataset load_coco(const std::filesystem::path& path);
std::string dump_coco(const CocoDataset& dataset);
void save_coco(const CocoDataset& dataset, const std::filesystem::path& path);

// COCO results format: [{image_id, category_id, bbox: [x, y, w, h], score}].
std::vector<ImageDetection> parse_results(std::string_view text);
std::vector<ImageDetection> load_results(const std::filesystem::path& path);
std::string dump_results(const std::vector<ImageDetection>& detections);
void save_results(const std::vector<ImageDetection>& detections,
                  const std::filesystem::path& path);

/// Throws ReferenceError when a result names an image or category missing
/// from the dataset.
void check_results_against(const CocoDataset& dataset,
                           const std::vector<ImageDetection>& detections);

// Shared helpers for the deterministic writers.
std::string format_fixed(double value, int decimals);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace slicekit
