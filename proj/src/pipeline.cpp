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
#include "slicekit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"
#include "slicekit/parallel.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

void PipelineConfig::validate() const {
  grid.validate();
  if (effective_target_width() < 1) {
    throw ValidationError(fmt::format("target_width must be >= 1, got {}",
                                      effective_target_width()));
  }
  if (fi_target_width < 1) {
    throw ValidationError(
        fmt::format("fi_target_width must be >= 1, got {}", fi_target_width));
  }
  if (parallelism < 1) {
    throw ValidationError(
        fmt::format("parallelism must be >= 1, got {}", parallelism));
  }
  if (!sliced_inference && !full_inference) {
    throw ValidationError(
        "at least one of sliced inference and full inference must be enabled");
  }
  merge.validate();
}

double to_image_x(double x, const SliceRect& s) {
  return x / s.resize_scale + s.rect.x_min();
}
double to_image_y(double y, const SliceRect& s) {
  return y / s.resize_scale + s.rect.y_min();
}
double to_patch_x(double x, const SliceRect& s) {
  return (x - s.rect.x_min()) * s.resize_scale;
}
double to_patch_y(double y, const SliceRect& s) {
  return (y - s.rect.y_min()) * s.resize_scale;
}

std::optional<Detection> remap_detection(const Detection& det,
                                         const SliceRect& slice, int image_w,
                                         int image_h) {
  const auto& b = det.bbox;
  auto mapped = BBox::make(to_image_x(b.x_min(), slice), to_image_y(b.y_min(), slice),
                           to_image_x(b.x_max(), slice), to_image_y(b.y_max(), slice));
  if (!mapped) return std::nullopt;
  auto clamped = mapped->clamped(image_w, image_h);
  if (!clamped) return std::nullopt;
  Detection out = det;
  out.bbox = *clamped;
  out.source = DetectionSource::patch(slice.index);
  return out;
}

namespace {

struct Job {
  SliceRect slice;
  int target_width;
  bool full_image;
};

}  // namespace

ImageInferenceResult run_sliced_inference(
    const ImageInput& image, const PipelineConfig& config, Detector& detector,
    const std::set<CategoryId>* known_categories) {
  config.validate();
  if (image.width < 1 || image.height < 1) {
    throw ValidationError(fmt::format("image {} has invalid size {}x{}",
                                      image.id, image.width, image.height));
  }

  std::vector<Job> jobs;
  if (config.sliced_inference) {
    const int tw = config.effective_target_width();
    for (auto s : compute_slice_grid(image.width, image.height, config.grid)) {
      s.resize_scale = static_cast<double>(tw) / s.rect.width();
      jobs.push_back(Job{s, tw, false});
    }
  }
  const int patch_jobs = static_cast<int>(jobs.size());
  if (config.full_inference) {
    SliceRect whole{BBox(0, 0, image.width, image.height), patch_jobs,
                    static_cast<double>(config.fi_target_width) / image.width};
    jobs.push_back(Job{whole, config.fi_target_width, true});
  }

  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.patch_order_seed) {
    Rng rng(derive_seed(*config.patch_order_seed, "patch-order"));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(
                                  rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
  }

  std::vector<std::vector<Detection>> per_job(jobs.size());
  std::vector<char> failed(jobs.size(), 0);
  parallel_for(order.size(), config.parallelism, [&](std::size_t k) {
    const std::size_t j = order[k];
    const Job& job = jobs[j];
    DetectRequest req{image.id, image.ref, job.slice.rect, job.target_width,
                      static_cast<std::int64_t>(j)};
    std::vector<Detection> raw;
    try {
      raw = detector.detect(req);
    } catch (const DetectorError& e) {
      if (config.strict) throw;
      spdlog::warn("image {}: patch {} skipped: {}", image.id, j, e.what());
      failed[j] = 1;
      return;
    }
    auto& out = per_job[j];
    out.reserve(raw.size());
    for (const auto& det : raw) {
      auto mapped = remap_detection(det, job.slice, image.width, image.height);
      if (!mapped) {
        spdlog::warn("image {}: degenerate box after remap dropped", image.id);
        continue;
      }
      if (job.full_image) mapped->source = DetectionSource::full_image();
      out.push_back(*mapped);
    }
  });

  // Gather in dispatch order; merge re-sorts canonically.
  std::vector<Detection> patch_dets;
  std::vector<Detection> fi_dets;
  for (std::size_t j : order) {
    auto& dst = jobs[j].full_image ? fi_dets : patch_dets;
    for (auto& d : per_job[j]) {
      if (known_categories != nullptr && !known_categories->contains(d.category_id)) {
        if (config.strict) {
          throw DetectorError(fmt::format(
              "image {}: detector returned unknown category_id {}", image.id,
              d.category_id));
        }
        spdlog::warn("image {}: unknown category_id {} dropped", image.id,
                     d.category_id);
        continue;
      }
      dst.push_back(std::move(d));
    }
  }

  ImageInferenceResult result;
  result.detections = merge_sources(patch_dets, fi_dets, config.merge);
  result.patches = patch_jobs;
  result.failed_patches =
      static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  result.full_inference = config.full_inference;
  return result;
}

std::string DatasetRunReport::to_json() const {
  std::string out = "{\n\"images\": [";
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& s = images[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += fmt::format(
        "{{\"image_id\": {}, \"patches\": {}, \"detections\": {}, "
        "\"failed_patches\": {}, \"millis\": {}}}",
        s.image_id, s.patches, s.detections, s.failed_patches,
        format_fixed(s.millis, 3));
  }
  out += images.empty() ? "],\n" : "\n],\n";
  out += fmt::format(
      "\"total_patches\": {},\n\"total_detections\": {},\n\"total_millis\": "
      "{}\n}}\n",
      total_patches, total_detections, format_fixed(total_millis, 3));
  return out;
}

namespace {

void run_into(const CocoDataset& dataset, const std::filesystem::path& image_root,
              const PipelineConfig& config, Detector& detector,
              DatasetRunOutput& out) {
  config.validate();
  std::set<CategoryId> categories;
  for (const auto& c : dataset.categories) categories.insert(c.id);

  for (const auto& img : dataset.images) {
    const auto t0 = std::chrono::steady_clock::now();
    ImageInput input{img.id, image_root / img.file_name, img.width, img.height};
    auto res = run_sliced_inference(input, config, detector, &categories);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    for (auto& d : res.detections) {
      out.predictions.push_back(ImageDetection{img.id, std::move(d)});
    }
    out.report.images.push_back(ImageRunStats{
        img.id, res.patches, static_cast<int>(res.detections.size()),
        res.failed_patches, ms});
    out.report.total_patches += res.patches;
    out.report.total_detections += static_cast<long>(res.detections.size());
    out.report.total_millis += ms;
  }
}

}  // namespace

DatasetRunOutput run_dataset_inference(const CocoDataset& dataset,
                                       const std::filesystem::path& image_root,
                                       const PipelineConfig& config,
                                       Detector& detector) {
  DatasetRunOutput out;
  run_into(dataset, image_root, config, detector, out);
  return out;
}

DatasetRunReport run_dataset_inference(const CocoDataset& dataset,
                                       const std::filesystem::path& image_root,
                                       const PipelineConfig& config,
                                       Detector& detector,
                                       const std::filesystem::path& out_path,
                                       const std::filesystem::path& report_path) {
  DatasetRunOutput out;
  try {
    run_into(dataset, image_root, config, detector, out);
  } catch (...) {
    spdlog::error("inference aborted; flushing {} predictions to {}",
                  out.predictions.size(), out_path.string());
    save_results(out.predictions, out_path);
    if (!report_path.empty()) write_text_file(report_path, out.report.to_json());
    throw;
  }
  save_results(out.predictions, out_path);
  if (!report_path.empty()) write_text_file(report_path, out.report.to_json());
  return out.report;
}

}  // namespace slicekit
