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
#include "slicekit/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/config_json.hpp"
#include "slicekit/error.hpp"
#include "slicekit/image_io.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr CategoryId kSmallA = 1;
constexpr CategoryId kSmallB = 2;
constexpr CategoryId kLarge = 3;
constexpr int kGap = 2;  // minimum spacing between objects, pixels

struct Color {
  std::uint8_t b, g, r;
};

Color category_color(CategoryId id) {
  switch (id) {
    case kSmallA: return {40, 40, 230};
    case kSmallB: return {230, 60, 40};
    default: return {40, 200, 40};
  }
}

bool overlaps(const BBox& a, const std::vector<BBox>& placed) {
  const BBox grown(a.x_min() - kGap, a.y_min() - kGap, a.x_max() + kGap,
                   a.y_max() + kGap);
  return std::any_of(placed.begin(), placed.end(), [&](const BBox& p) {
    return intersection_area(grown, p) > 0.0;
  });
}

// Origin along one axis such that a seam at a multiple of `period` splits
// the object between 35% and 65% of its extent.
std::optional<int> seam_origin(Rng& rng, int extent, int size, int period) {
  const int seams = (extent - 1) / period;
  if (seams < 1) return std::nullopt;
  const int seam = static_cast<int>(rng.uniform_int(1, seams)) * period;
  const double split = rng.uniform(0.35, 0.65);
  const int origin = static_cast<int>(std::lround(seam - split * size));
  if (origin < 0 || origin + size > extent) return std::nullopt;
  return origin;
}

ImageBuffer render(const SceneConfig& config, const std::vector<Annotation>& objects,
                   Rng& rng) {
  ImageBuffer img = make_image(config.width, config.height, 114, 114, 114);
  if (config.background == Background::kNoise) {
    for (auto& px : img.pixels) {
      px = static_cast<std::uint8_t>(100 + rng.uniform_int(0, 28));
    }
  }
  for (const auto& obj : objects) {
    const Color c = category_color(obj.category_id);
    fill_rect(img, static_cast<int>(obj.bbox.x_min()), static_cast<int>(obj.bbox.y_min()),
              static_cast<int>(obj.bbox.x_max()), static_cast<int>(obj.bbox.y_max()),
              c.b, c.g, c.r);
  }
  return img;
}

std::string file_label(std::size_t index, const std::string& label) {
  std::string safe;
  for (char ch : label) {
    safe += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-') ? ch : '_';
  }
  return fmt::format("{:02d}_{}", index, safe);
}

}  // namespace

void SceneConfig::validate() const {
  if (width < 1 || height < 1) throw ValidationError("scene size must be >= 1");
  if (n_images < 0) throw ValidationError("n_images must be >= 0");
  if (objects_min < 0 || objects_min > objects_max) {
    throw ValidationError("objects range must satisfy 0 <= min <= max");
  }
  for (const auto& [lo, hi] : {small_size_range, large_size_range}) {
    if (lo < 1 || lo > hi) throw ValidationError("invalid object size range");
  }
  std::vector<std::pair<int, int>> used{small_size_range};
  if (large_object_fraction > 0.0) used.push_back(large_size_range);
  for (const auto& [lo, hi] : used) {
    if (hi >= width || hi >= height) {
      throw ValidationError(fmt::format(
          "object size {} must be smaller than the {}x{} image", hi, width, height));
    }
  }
  if (!(large_object_fraction >= 0.0 && large_object_fraction <= 1.0)) {
    throw ValidationError("large_object_fraction must be in [0, 1]");
  }
  if (!(seam_fraction >= 0.0 && seam_fraction <= 1.0)) {
    throw ValidationError("seam_fraction must be in [0, 1]");
  }
  if (seam_period < 1) throw ValidationError("seam_period must be >= 1");
  if (max_placement_attempts < 1) {
    throw ValidationError("max_placement_attempts must be >= 1");
  }
}

SceneConfig scene_preset(const std::string& name) {
  SceneConfig c;
  if (name == "default") return c;
  if (name == "large") {
    c.large_object_fraction = 0.1;
    return c;
  }
  if (name == "seam") {
    c.seam_fraction = 0.5;
    return c;
  }
  throw ValidationError(
      fmt::format("unknown scene \"{}\" (expected default, large or seam)", name));
}

SceneDataset generate_scene_dataset(const SceneConfig& config,
                                    const std::filesystem::path& out_dir) {
  config.validate();
  SceneDataset out;
  out.image_root = out_dir / "images";
  out.dataset.categories = {{kSmallA, "small_a"}, {kSmallB, "small_b"}, {kLarge, "large"}};

  AnnotationId next_ann = 1;
  for (int i = 0; i < config.n_images; ++i) {
    const ImageId image_id = i + 1;
    Rng rng(derive_seed(config.seed, "scene-image", static_cast<std::uint64_t>(image_id)));
    const int n_objects =
        static_cast<int>(rng.uniform_int(config.objects_min, config.objects_max));

    std::vector<BBox> placed;
    std::vector<Annotation> objects;
    for (int k = 0; k < n_objects; ++k) {
      const bool large = rng.bernoulli(config.large_object_fraction);
      const auto [lo, hi] = large ? config.large_size_range : config.small_size_range;
      const int w = static_cast<int>(rng.uniform_int(lo, hi));
      const int h = static_cast<int>(rng.uniform_int(lo, hi));
      const CategoryId cat = large ? kLarge : (rng.bernoulli(0.5) ? kSmallA : kSmallB);
      const bool seam = !large && rng.bernoulli(config.seam_fraction);

      std::optional<BBox> box;
      for (int attempt = 0; attempt < config.max_placement_attempts && !box; ++attempt) {
        std::optional<int> x;
        std::optional<int> y;
        if (seam && rng.bernoulli(0.5)) {
          x = seam_origin(rng, config.width, w, config.seam_period);
        } else if (seam) {
          y = seam_origin(rng, config.height, h, config.seam_period);
        }
        if (seam && !x && !y) continue;
        if (!x) x = static_cast<int>(rng.uniform_int(0, config.width - w));
        if (!y) y = static_cast<int>(rng.uniform_int(0, config.height - h));
        const BBox candidate(*x, *y, *x + w, *y + h);
        if (!overlaps(candidate, placed)) box = candidate;
      }
      if (!box) {
        ++out.dropped_objects;
        spdlog::warn("scene image {}: could not place object {} after {} attempts",
                     image_id, k, config.max_placement_attempts);
        continue;
      }
      placed.push_back(*box);
      objects.push_back(Annotation{next_ann++, image_id, cat, *box, box->area(), false});
    }

    const std::string name = fmt::format("scene_{:05d}.png", image_id);
    if (config.write_images) {
      write_png(out.image_root / name, render(config, objects, rng));
    }
    out.dataset.images.push_back(
        ImageRecord{image_id, name, config.width, config.height, {}, {}});
    out.dataset.annotations.insert(out.dataset.annotations.end(), objects.begin(),
                                   objects.end());
  }
  save_coco(out.dataset, out_dir / "annotations.json");
  return out;
}

std::vector<LabeledConfig> default_bench_configs() {
  PipelineConfig base;
  base.grid = GridSpec{256, 256, 0.0};
  base.target_width = 1024;
  base.fi_target_width = 1024;

  PipelineConfig fi = base;
  fi.sliced_inference = false;
  fi.full_inference = true;

  PipelineConfig sahi = base;

  PipelineConfig sahi_po = base;
  sahi_po.grid.overlap_ratio = 0.25;

  PipelineConfig sahi_fi_po = sahi_po;
  sahi_fi_po.full_inference = true;

  return {{"FI", fi}, {"SAHI", sahi}, {"SAHI+PO", sahi_po}, {"SAHI+FI+PO", sahi_fi_po}};
}

VisibilityModel default_bench_visibility() {
  VisibilityModel v;
  v.min_apparent_px = 32.0;
  v.score_saturation_px = 128.0;
  v.score_floor = 0.05;
  v.localization_noise_px = 0.5;
  v.min_visible_fraction = 0.6;
  v.seed = 7;
  return v;
}

BenchmarkReport run_benchmark(const SceneConfig& scene,
                              const std::vector<LabeledConfig>& configs,
                              const VisibilityModel& visibility,
                              const std::filesystem::path& out_dir) {
  if (configs.empty()) throw ValidationError("benchmark needs at least one config");
  for (const auto& c : configs) c.config.validate();
  visibility.validate();

  const auto t_gen = std::chrono::steady_clock::now();
  const SceneDataset data = generate_scene_dataset(scene, out_dir / "scene");
  const double gen_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_gen)
                            .count();
  OracleDetector oracle(GroundTruthIndex(data.dataset), visibility);

  BenchmarkReport report;
  std::vector<std::pair<std::string, EvalResult>> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& lc = configs[i];
    const auto t0 = std::chrono::steady_clock::now();
    auto run = run_dataset_inference(data.dataset, data.image_root, lc.config, oracle);
    save_results(run.predictions,
                 out_dir / "predictions" / (file_label(i, lc.label) + ".json"));
    BenchRun br{lc.label, lc.config, evaluate(data.dataset, run.predictions),
                run.report.total_patches, run.report.total_detections, 0.0};
    br.millis = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    rows.emplace_back(br.label, br.result);
    report.runs.push_back(std::move(br));
  }
  report.table = compare_runs_table(rows);

  ordered_json rj;
  rj["scene"] = to_json(scene);
  rj["visibility"] = to_json(visibility);
  rj["images"] = data.dataset.images.size();
  rj["annotations"] = data.dataset.annotations.size();
  rj["dropped_objects"] = data.dropped_objects;
  rj["runs"] = ordered_json::array();
  ordered_json tj;
  tj["generation_millis"] = gen_ms;
  tj["runs"] = ordered_json::array();
  for (const auto& r : report.runs) {
    ordered_json entry;
    entry["label"] = r.label;
    entry["config"] = to_json(r.config);
    entry["patches"] = r.patches;
    entry["detections"] = r.detections;
    entry["eval"] = ordered_json::parse(r.result.to_json());
    rj["runs"].push_back(entry);
    tj["runs"].push_back({{"label", r.label}, {"millis", r.millis}});
  }
  report.report_json = rj.dump(2) + "\n";
  report.timings_json = tj.dump(2) + "\n";

  write_text_file(out_dir / "report.json", report.report_json);
  write_text_file(out_dir / "table.txt", report.table);
  write_text_file(out_dir / "timings.json", report.timings_json);
  return report;
}

}  // namespace slicekit
