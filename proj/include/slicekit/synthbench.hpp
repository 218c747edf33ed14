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
#include <string>
#include <utility>
#include <vector>

#include "slicekit/eval.hpp"
#include "slicekit/oracle_detector.hpp"
#include "slicekit/pipeline.hpp"
#include "slicekit/types.hpp"

namespace slicekit {

enum class Background { kFlat, kNoise };

struct SceneConfig {
  int width = 2048;
  int height = 2048;
  int n_images = 100;
  int objects_min = 20;
  int objects_max = 40;
  std::pair<int, int> small_size_range{8, 24};
  std::pair<int, int> large_size_range{200, 400};
  double large_object_fraction = 0.0;
  // Fraction of small objects deliberately placed across a vertical or
  // horizontal seam at a multiple of seam_period pixels.
  double seam_fraction = 0.0;
  int seam_period = 256;
  std::uint64_t seed = 7;
  Background background = Background::kFlat;
  bool write_images = true;
  int max_placement_attempts = 200;

  void validate() const;
};

/// Named presets: "default" (small objects only), "large" (10% large
/// objects) and "seam" (half the objects straddle patch seams).
SceneConfig scene_preset(const std::string& name);

struct SceneDataset {
  CocoDataset dataset;
  std::filesystem::path image_root;
  // Objects given up on after max_placement_attempts failed placements.
  int dropped_objects = 0;
};

/// Non-overlapping solid rectangles, one color per category, with exact
/// COCO annotations. Writes out_dir/images/scene_NNNNN.png (when
/// write_images) and out_dir/annotations.json. Fully determined by seed.
SceneDataset generate_scene_dataset(const SceneConfig& config,
                                    const std::filesystem::path& out_dir);

struct LabeledConfig {
  std::string label;
  PipelineConfig config;
};

/// FI, SAHI, SAHI+PO, SAHI+FI+PO with 256 px patches resized to 1024.
std::vector<LabeledConfig> default_bench_configs();
VisibilityModel default_bench_visibility();

struct BenchRun {
  std::string label;
  PipelineConfig config;
  EvalResult result;
  long patches = 0;
  long detections = 0;
  double millis = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchRun> runs;
  std::string table;
  std::string report_json;   // deterministic, no timings
  std::string timings_json;  // wall-clock only
};

/// Generates the scene once, runs every configuration through the pipeline
/// with the oracle detector and evaluates it. Writes report.json,
/// table.txt, timings.json and predictions/NN_label.json under out_dir.
BenchmarkReport run_benchmark(const SceneConfig& scene,
                              const std::vector<LabeledConfig>& configs,
                              const VisibilityModel& visibility,
                              const std::filesystem::path& out_dir);

}  // namespace slicekit
