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
#include "commands.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "manifest.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/config_json.hpp"
#include "slicekit/dataset_slicer.hpp"
#include "slicekit/error.hpp"
#include "slicekit/eval.hpp"
#include "slicekit/external_detector.hpp"
#include "slicekit/merge.hpp"
#include "slicekit/oracle_detector.hpp"
#include "slicekit/pipeline.hpp"
#include "slicekit/replay_detector.hpp"
#include "slicekit/slice_grid.hpp"
#include "slicekit/synthbench.hpp"

namespace slicekit::cli {
namespace {

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ValidationError(fmt::format("--{} is required", flag));
}

class GridCommand final : public Command {
 public:
  explicit GridCommand(CLI::App& root) {
    app_ = root.add_subcommand("grid", "Print the slice grid of one image size");
    options_.add(*app_, "width", width_, "Image width in pixels");
    options_.add(*app_, "height", height_, "Image height in pixels");
    options_.add(*app_, "patch", patch_, "Patch width (and height unless --patch-h)");
    options_.add(*app_, "patch-h", patch_h_, "Patch height");
    options_.add(*app_, "overlap", overlap_, "Overlap ratio in [0, 1)");
    options_.flag(*app_, "json", json_, "Print JSON instead of one rect per line");
  }

  int run() override {
    if (width_ < 1 || height_ < 1) {
      throw ValidationError(fmt::format(
          "--width and --height must be >= 1, got {}x{}", width_, height_));
    }
    const GridSpec spec{patch_, patch_h_.value_or(patch_), overlap_};
    const auto grid = compute_slice_grid(width_, height_, spec);
    if (json_) {
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (const auto& s : grid) {
        out.push_back({{"index", s.index},
                       {"x", s.x()},
                       {"y", s.y()},
                       {"width", s.width()},
                       {"height", s.height()}});
      }
      fmt::print("{}\n", out.dump());
    } else {
      for (const auto& s : grid) {
        fmt::print("{} {} {} {} {}\n", s.index, s.x(), s.y(), s.width(), s.height());
      }
    }
    return 0;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int patch_ = 640;
  std::optional<int> patch_h_;
  double overlap_ = 0.25;
  bool json_ = false;
};

class SliceCommand final : public Command {
 public:
  explicit SliceCommand(CLI::App& root) {
    app_ = root.add_subcommand("slice", "Build a slicing-aided fine-tuning dataset");
    options_.add(*app_, "coco", coco_, "Input COCO annotations");
    options_.add(*app_, "images", images_, "Directory holding the input images");
    options_.add(*app_, "out", out_, "Output directory");
    options_.add(*app_, "patch-min", patch_min_, "Smallest patch side");
    options_.add(*app_, "patch-max", patch_max_, "Largest patch side");
    options_.add(*app_, "overlap", overlap_, "Overlap ratio in [0, 1)");
    options_.add(*app_, "min-area-ratio", min_area_ratio_,
                 "Keep a clipped box iff clipped/original area >= this");
    options_.flag(*app_, "include-originals", include_originals_,
                  "Also emit the full images", true);
    options_.add(*app_, "resize-min", resize_min_, "Smallest recorded resize width");
    options_.add(*app_, "resize-max", resize_max_, "Largest recorded resize width");
    options_.add(*app_, "seed", seed_, "Random seed");
    options_.add(*app_, "parallelism", parallelism_, "Worker threads");
    options_.flag(*app_, "strict", strict_, "Fail on unreadable images");
  }

  int run() override {
    SliceJobConfig cfg;
    cfg.dims = DimsRange{patch_min_, patch_max_, patch_min_, patch_max_};
    cfg.overlap_ratio = overlap_;
    cfg.min_area_ratio = min_area_ratio_;
    cfg.include_originals = include_originals_;
    cfg.resize_width_range = {resize_min_, resize_max_};
    cfg.seed = seed_;
    cfg.strict = strict_;
    cfg.parallelism = parallelism_;
    cfg.validate();
    require(coco_, "coco");
    require(images_, "images");
    require(out_, "out");

    RunManifest manifest("slice");
    manifest.set_config(options_.resolved());
    manifest.add_resolved("slice", to_json(cfg));
    manifest.set_seed(seed_);
    manifest.add_input(coco_);
    const auto dataset = load_coco(coco_);
    const auto res = build_finetune_dataset(dataset, images_, out_, cfg);
    manifest.write(RunManifest::beside(out_, true));
    fmt::print("{} images ({} patches), {} annotations -> {}\n",
               res.dataset.images.size(), res.patch_count,
               res.dataset.annotations.size(), out_);
    for (const auto& name : res.skipped_images) {
      fmt::print(stderr, "skipped unreadable image {}\n", name);
    }
    return 0;
  }

 private:
  std::string coco_;
  std::string images_;
  std::string out_;
  int patch_min_ = 480;
  int patch_max_ = 640;
  double overlap_ = 0.25;
  double min_area_ratio_ = 0.1;
  bool include_originals_ = true;
  int resize_min_ = 800;
  int resize_max_ = 1333;
  std::uint64_t seed_ = 0;
  int parallelism_ = 1;
  bool strict_ = false;
};

class PredictCommand final : public Command {
 public:
  explicit PredictCommand(CLI::App& root) {
    app_ = root.add_subcommand("predict", "Run sliced inference over a dataset");
    options_.add(*app_, "coco", coco_, "COCO file listing the images");
    options_.add(*app_, "images", images_,
                 "Image directory (default: the COCO file's directory)");
    options_.add(*app_, "backend", backend_, "oracle, replay or exec")
        ->check(CLI::IsMember({"oracle", "replay", "exec"}));
    options_.add(*app_, "exec-cmd", exec_cmd_, "Detector command for the exec backend");
    options_.add(*app_, "workers", workers_, "Detector processes for the exec backend");
    options_.add(*app_, "timeout", timeout_s_, "Per-request timeout in seconds");
    options_.add(*app_, "replay", replay_, "Prediction store for the replay backend");
    options_.add(*app_, "record", record_, "Save every raw detector response here");
    options_.add(*app_, "patch", patch_, "Patch width (and height unless --patch-h)");
    options_.add(*app_, "patch-h", patch_h_, "Patch height");
    options_.add(*app_, "overlap", overlap_, "Overlap ratio in [0, 1)");
    options_.add(*app_, "target-width", target_width_,
                 "Patch resize width (default: twice the patch width)");
    options_.flag(*app_, "sliced", sliced_, "Run the detector on slices", true);
    options_.flag(*app_, "fi", fi_, "Also run full-image inference");
    options_.add(*app_, "fi-target-width", fi_target_width_,
                 "Resize width for full-image inference");
    options_.add(*app_, "tm", tm_, "NMS IoU threshold t_m in (0, 1]");
    options_.add(*app_, "td", td_, "Score threshold t_d in [0, 1]");
    options_.flag(*app_, "class-aware", class_aware_, "Suppress within a class only",
                  true);
    options_.add(*app_, "seed", seed_, "Random seed");
    options_.add(*app_, "parallelism", parallelism_, "Concurrent detector calls");
    options_.flag(*app_, "strict", strict_, "Abort on the first failed patch");
    options_.add(*app_, "min-apparent", vis_.min_apparent_px,
                 "Oracle: smallest detectable apparent side in pixels");
    options_.add(*app_, "score-saturation", vis_.score_saturation_px,
                 "Oracle: apparent side at which the score reaches 1");
    options_.add(*app_, "score-floor", vis_.score_floor, "Oracle: lowest score");
    options_.add(*app_, "noise", vis_.localization_noise_px,
                 "Oracle: box edge jitter half-width in resized pixels");
    options_.add(*app_, "min-visible-fraction", vis_.min_visible_fraction,
                 "Oracle: visible area fraction needed for a truncated object");
    options_.add(*app_, "out", out_, "Output COCO results file");
    options_.add(*app_, "report", report_, "Per-image run report (JSON)");
  }

  int run() override {
    PipelineConfig cfg;
    cfg.grid = GridSpec{patch_, patch_h_.value_or(patch_), overlap_};
    cfg.target_width = target_width_;
    cfg.sliced_inference = sliced_;
    cfg.full_inference = fi_;
    cfg.fi_target_width = fi_target_width_;
    cfg.merge = MergeConfig{tm_, td_, class_aware_};
    cfg.seed = seed_;
    cfg.parallelism = parallelism_;
    cfg.strict = strict_;
    cfg.validate();
    vis_.seed = seed_;
    vis_.validate();
    require(coco_, "coco");
    require(out_, "out");
    if (workers_ < 1) throw ValidationError("--workers must be >= 1");
    if (timeout_s_ <= 0) throw ValidationError("--timeout must be positive");

    RunManifest manifest("predict");
    manifest.set_config(options_.resolved());
    manifest.add_resolved("pipeline", to_json(cfg));
    manifest.set_seed(seed_);
    manifest.add_input(coco_);
    const auto dataset = load_coco(coco_);
    const std::filesystem::path root =
        images_.empty() ? std::filesystem::path(coco_).parent_path()
                        : std::filesystem::path(images_);

    std::unique_ptr<Detector> detector;
    ExternalDetector* external = nullptr;
    if (backend_ == "oracle") {
      manifest.add_resolved("visibility", to_json(vis_));
      detector = std::make_unique<OracleDetector>(GroundTruthIndex(dataset), vis_);
    } else if (backend_ == "replay") {
      require(replay_, "replay");
      manifest.add_input(replay_);
      detector = std::make_unique<ReplayDetector>(PredictionStore::load(replay_), strict_);
    } else {
      require(exec_cmd_, "exec-cmd");
      const auto timeout = std::chrono::milliseconds(
          static_cast<long>(timeout_s_ * 1000.0));
      auto ext = std::make_unique<ExternalDetector>(
          ExternalConfig{exec_cmd_, workers_, timeout});
      external = ext.get();
      detector = std::move(ext);
    }

    std::optional<RecordingDetector> recorder;
    Detector* active = detector.get();
    if (!record_.empty()) active = &recorder.emplace(*detector);

    const std::filesystem::path report_path =
        report_.empty() ? std::filesystem::path(out_).replace_extension(".report.json")
                        : std::filesystem::path(report_);
    const auto report =
        run_dataset_inference(dataset, root, cfg, *active, out_, report_path);
    if (recorder) recorder->store().save(record_);
    manifest.write(RunManifest::beside(out_, false));

    fmt::print("{} detections over {} images ({} patches) -> {}\n",
               report.total_detections, report.images.size(), report.total_patches,
               out_);
    if (external != nullptr) {
      const auto stats = external->stats();
      fmt::print("detector requests: {}, clamped boxes: {}, dropped boxes: {}\n",
                 stats.requests, stats.clamped_boxes, stats.dropped_boxes);
    }
    return 0;
  }

 private:
  std::string coco_;
  std::string images_;
  std::string backend_ = "oracle";
  std::string exec_cmd_;
  int workers_ = 1;
  double timeout_s_ = 300.0;
  std::string replay_;
  std::string record_;
  int patch_ = 640;
  std::optional<int> patch_h_;
  double overlap_ = 0.25;
  std::optional<int> target_width_;
  bool sliced_ = true;
  bool fi_ = false;
  int fi_target_width_ = 1333;
  double tm_ = 0.5;
  double td_ = 0.0;
  bool class_aware_ = true;
  std::uint64_t seed_ = 0;
  int parallelism_ = 1;
  bool strict_ = false;
  VisibilityModel vis_;
  std::string out_;
  std::string report_;
};

class MergeCommand final : public Command {
 public:
  explicit MergeCommand(CLI::App& root) {
    app_ = root.add_subcommand("merge", "Merge COCO results files with greedy NMS");
    options_.add(*app_, "in", inputs_, "Input COCO results files");
    options_.add(*app_, "tm", tm_, "NMS IoU threshold t_m in (0, 1]");
    options_.add(*app_, "td", td_, "Score threshold t_d in [0, 1]");
    options_.flag(*app_, "class-aware", class_aware_, "Suppress within a class only",
                  true);
    options_.add(*app_, "out", out_, "Output COCO results file");
  }

  int run() override {
    const MergeConfig cfg{tm_, td_, class_aware_};
    cfg.validate();
    if (inputs_.empty()) throw ValidationError("--in needs at least one file");
    require(out_, "out");

    RunManifest manifest("merge");
    manifest.set_config(options_.resolved());
    manifest.add_resolved("merge", to_json(cfg));
    std::map<ImageId, std::vector<Detection>> by_image;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      manifest.add_input(inputs_[i]);
      for (auto& p : load_results(inputs_[i])) {
        p.detection.source = DetectionSource::patch(static_cast<int>(i));
        by_image[p.image_id].push_back(p.detection);
      }
    }
    std::vector<ImageDetection> merged;
    for (auto& [image, dets] : by_image) {
      for (auto& d : nms(std::move(dets), cfg)) {
        d.source = DetectionSource::full_image();
        merged.push_back({image, d});
      }
    }
    save_results(merged, out_);
    manifest.write(RunManifest::beside(out_, false));
    fmt::print("{} detections -> {}\n", merged.size(), out_);
    return 0;
  }

 private:
  std::vector<std::string> inputs_;
  double tm_ = 0.5;
  double td_ = 0.0;
  bool class_aware_ = true;
  std::string out_;
};

class EvaluateCommand final : public Command {
 public:
  explicit EvaluateCommand(CLI::App& root) {
    app_ = root.add_subcommand("evaluate", "COCO AP50 with small/medium/large breakdown");
    options_.add(*app_, "gt", gt_, "Ground-truth COCO annotations");
    options_.add(*app_, "preds", preds_, "COCO results file");
    options_.add(*app_, "iou", iou_, "IoU threshold");
    options_.add(*app_, "max-dets", max_dets_, "Detections kept per image");
    options_.add(*app_, "out", out_, "Write the result JSON here");
  }

  int run() override {
    EvalConfig cfg;
    cfg.iou_threshold = iou_;
    cfg.max_detections = max_dets_;
    cfg.validate();
    require(gt_, "gt");
    require(preds_, "preds");

    RunManifest manifest("evaluate");
    manifest.set_config(options_.resolved());
    manifest.add_resolved("eval", to_json(cfg));
    manifest.add_input(gt_);
    manifest.add_input(preds_);
    const auto result = evaluate(load_coco(gt_), load_results(preds_), cfg);
    fmt::print("{}", compare_runs_table(
                         {{std::filesystem::path(preds_).stem().string(), result}}));
    fmt::print("gt matched {} missed {}; predictions tp {} fp {}\n",
               result.counts.gt_matched, result.counts.gt_missed,
               result.counts.pred_true_positive, result.counts.pred_false_positive);
    if (!out_.empty()) {
      write_text_file(out_, result.to_json());
      manifest.write(RunManifest::beside(out_, false));
    }
    return 0;
  }

 private:
  std::string gt_;
  std::string preds_;
  double iou_ = 0.5;
  int max_dets_ = 500;
  std::string out_;
};

class CompareCommand final : public Command {
 public:
  explicit CompareCommand(CLI::App& root) {
    app_ = root.add_subcommand("compare", "Tabulate evaluation results against the first");
    options_.add(*app_, "runs", runs_, "Result JSON files written by evaluate");
    options_.add(*app_, "labels", labels_, "Row labels (default: file stems)");
    options_.flag(*app_, "csv", csv_, "Emit CSV");
    options_.add(*app_, "out", out_, "Also write the table here");
  }

  int run() override {
    if (runs_.empty()) throw ValidationError("--runs needs at least one file");
    if (!labels_.empty() && labels_.size() != runs_.size()) {
      throw ValidationError(fmt::format("got {} labels for {} runs", labels_.size(),
                                        runs_.size()));
    }
    std::vector<std::pair<std::string, EvalResult>> rows;
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      const std::string label = labels_.empty()
                                    ? std::filesystem::path(runs_[i]).stem().string()
                                    : labels_[i];
      rows.emplace_back(label, EvalResult::from_json(read_text_file(runs_[i])));
    }
    const auto table = csv_ ? compare_runs_csv(rows) : compare_runs_table(rows);
    fmt::print("{}", table);
    if (!out_.empty()) {
      RunManifest manifest("compare");
      manifest.set_config(options_.resolved());
      for (const auto& r : runs_) manifest.add_input(r);
      write_text_file(out_, table);
      manifest.write(RunManifest::beside(out_, false));
    }
    return 0;
  }

 private:
  std::vector<std::string> runs_;
  std::vector<std::string> labels_;
  bool csv_ = false;
  std::string out_;
};

class BenchCommand final : public Command {
 public:
  explicit BenchCommand(CLI::App& root) {
    app_ = root.add_subcommand("bench", "Synthetic small-object benchmark");
    options_.add(*app_, "scene", scene_, "Scene preset: default, large or seam")
        ->check(CLI::IsMember({"default", "large", "seam"}));
    options_.add(*app_, "out", out_, "Output directory");
    options_.add(*app_, "seed", seed_, "Random seed (default: the preset's)");
    options_.add(*app_, "configs", configs_,
                 "JSON list of labeled pipeline configs (default: FI, SAHI, "
                 "SAHI+PO, SAHI+FI+PO)");
    options_.add(*app_, "n-images", n_images_, "Override the preset's image count");
    options_.flag(*app_, "write-images", write_images_, "Write scene PNGs", true);
    options_.add(*app_, "parallelism", parallelism_, "Concurrent detector calls");
  }

  int run() override {
    auto scene = scene_preset(scene_);
    auto vis = default_bench_visibility();
    if (seed_) {
      scene.seed = *seed_;
      vis.seed = *seed_;
    }
    if (n_images_) scene.n_images = *n_images_;
    scene.write_images = write_images_;
    scene.validate();
    if (parallelism_ < 1) throw ValidationError("--parallelism must be >= 1");
    require(out_, "out");

    RunManifest manifest("bench");
    auto configs = default_bench_configs();
    if (!configs_.empty()) {
      manifest.add_input(configs_);
      configs = labeled_configs_from_json(nlohmann::json::parse(read_text_file(configs_)));
    }
    nlohmann::ordered_json resolved = nlohmann::ordered_json::array();
    for (auto& lc : configs) {
      lc.config.parallelism = parallelism_;
      lc.config.validate();
      auto j = to_json(lc.config);
      j["label"] = lc.label;
      resolved.push_back(j);
    }
    manifest.set_config(options_.resolved());
    manifest.add_resolved("scene", to_json(scene));
    manifest.add_resolved("visibility", to_json(vis));
    manifest.add_resolved("configs", resolved);
    manifest.set_seed(scene.seed);
    const auto report = run_benchmark(scene, configs, vis, out_);
    manifest.write(RunManifest::beside(out_, true));
    fmt::print("{}", report.table);
    return 0;
  }

 private:
  std::string scene_ = "default";
  std::string out_;
  std::optional<std::uint64_t> seed_;
  std::string configs_;
  std::optional<int> n_images_;
  bool write_images_ = true;
  int parallelism_ = 1;
};

}  // namespace

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root) {
  std::vector<std::unique_ptr<Command>> out;
  out.push_back(std::make_unique<GridCommand>(root));
  out.push_back(std::make_unique<SliceCommand>(root));
  out.push_back(std::make_unique<PredictCommand>(root));
  out.push_back(std::make_unique<MergeCommand>(root));
  out.push_back(std::make_unique<EvaluateCommand>(root));
  out.push_back(std::make_unique<CompareCommand>(root));
  out.push_back(std::make_unique<BenchCommand>(root));
  return out;
}

}  // namespace slicekit::cli
