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
#include "slicekit/dataset_slicer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"
#include "slicekit/image_io.hpp"
#include "slicekit/parallel.hpp"

namespace slicekit {

void SliceJobConfig::validate() const {
  if (dims.m_min < 1 || dims.n_min < 1 || dims.m_min > dims.m_max ||
      dims.n_min > dims.n_max) {
    throw ValidationError(fmt::format(
        "invalid patch dims range M [{}, {}] N [{}, {}]", dims.m_min,
        dims.m_max, dims.n_min, dims.n_max));
  }
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw ValidationError(
        fmt::format("overlap ratio must be in [0, 1), got {}", overlap_ratio));
  }
  if (!(min_area_ratio >= 0.0 && min_area_ratio <= 1.0)) {
    throw ValidationError(fmt::format(
        "min_area_ratio must be in [0, 1], got {}", min_area_ratio));
  }
  if (resize_width_range.first < 1 ||
      resize_width_range.first > resize_width_range.second) {
    throw ValidationError(fmt::format("invalid resize width range [{}, {}]",
                                      resize_width_range.first,
                                      resize_width_range.second));
  }
  if (parallelism < 1) throw ValidationError("parallelism must be >= 1");
}

std::pair<int, int> sample_patch_dims(Rng& rng, const DimsRange& range) {
  const int m = static_cast<int>(rng.uniform_int(range.m_min, range.m_max));
  const int n = static_cast<int>(rng.uniform_int(range.n_min, range.n_max));
  return {m, n};
}

std::vector<Annotation> clip_annotations(std::span<const Annotation> annotations,
                                         const SliceRect& slice,
                                         double min_area_ratio) {
  std::vector<Annotation> out;
  const double ox = slice.rect.x_min();
  const double oy = slice.rect.y_min();
  for (const auto& ann : annotations) {
    const auto inter = ann.bbox.intersect(slice.rect);
    if (!inter) continue;
    if (inter->area() / ann.bbox.area() < min_area_ratio) continue;
    auto local = BBox::make(inter->x_min() - ox, inter->y_min() - oy,
                            inter->x_max() - ox, inter->y_max() - oy);
    if (!local) continue;
    out.push_back(Annotation{static_cast<AnnotationId>(out.size() + 1), 0,
                             ann.category_id, *local, local->area(),
                             ann.iscrowd});
  }
  return out;
}

namespace {

struct OutputImage {
  ImageRecord record;  // id assigned at assembly
  std::vector<Annotation> annotations;
};

struct ImageJobResult {
  std::vector<OutputImage> images;
  int patches = 0;
  std::optional<std::string> skipped;
};

ResizeHint resize_hint(Rng& rng, const SliceJobConfig& config, int w, int h) {
  const int target = static_cast<int>(rng.uniform_int(
      config.resize_width_range.first, config.resize_width_range.second));
  const int height = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(h) * target / w)));
  return ResizeHint{target, height};
}

ImageJobResult slice_one(const ImageRecord& img,
                         const std::vector<const Annotation*>& anns,
                         const std::filesystem::path& image_root,
                         const std::filesystem::path& images_out,
                         const SliceJobConfig& config) {
  ImageJobResult res;
  const auto src_path = image_root / img.file_name;
  ImageBuffer pixels;
  try {
    pixels = read_image(src_path);
    if (pixels.width != img.width || pixels.height != img.height) {
      throw IoError(fmt::format("{} is {}x{} but the dataset says {}x{}",
                                src_path.string(), pixels.width, pixels.height,
                                img.width, img.height));
    }
  } catch (const IoError& e) {
    if (config.strict) throw;
    spdlog::warn("skipping image {}: {}", img.id, e.what());
    res.skipped = src_path.string();
    return res;
  }

  Rng dims_rng(derive_seed(config.seed, "patch-dims",
                           static_cast<std::uint64_t>(img.id)));
  Rng resize_rng(derive_seed(config.seed, "resize-width",
                             static_cast<std::uint64_t>(img.id)));
  const auto [m, n] = sample_patch_dims(dims_rng, config.dims);
  const GridSpec spec{m, n, config.overlap_ratio};
  const auto slices = compute_slice_grid(img.width, img.height, spec);

  std::vector<Annotation> source;
  source.reserve(anns.size());
  for (const auto* a : anns) source.push_back(*a);

  const std::string stem = std::filesystem::path(img.file_name).stem().string();
  for (const auto& s : slices) {
    const std::string name =
        fmt::format("{}_{}_{}_{}_{}.png", stem, s.x(), s.y(), s.width(), s.height());
    write_png(images_out / name, crop(pixels, s.x(), s.y(), s.width(), s.height()));
    OutputImage out;
    out.record.file_name = name;
    out.record.width = s.width();
    out.record.height = s.height();
    out.record.patch_origin = PatchOrigin{img.id, s.x(), s.y()};
    out.record.resize = resize_hint(resize_rng, config, s.width(), s.height());
    out.annotations = clip_annotations(source, s, config.min_area_ratio);
    res.images.push_back(std::move(out));
  }
  res.patches = static_cast<int>(slices.size());

  if (config.include_originals) {
    const std::string name = std::filesystem::path(img.file_name).filename().string();
    std::error_code ec;
    std::filesystem::copy_file(src_path, images_out / name,
                               std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) {
      throw IoError(fmt::format("cannot copy {} to {}: {}", src_path.string(),
                                (images_out / name).string(), ec.message()));
    }
    OutputImage out;
    out.record.file_name = name;
    out.record.width = img.width;
    out.record.height = img.height;
    out.record.resize = resize_hint(resize_rng, config, img.width, img.height);
    out.annotations = std::move(source);
    res.images.push_back(std::move(out));
  }
  return res;
}

}  // namespace

FinetuneResult build_finetune_dataset(const CocoDataset& dataset,
                                      const std::filesystem::path& image_root,
                                      const std::filesystem::path& out_dir,
                                      const SliceJobConfig& config) {
  config.validate();
  dataset.validate();
  const auto images_out = out_dir / "images";
  std::filesystem::create_directories(images_out);

  std::vector<const ImageRecord*> sources;
  for (const auto& img : dataset.images) sources.push_back(&img);
  std::sort(sources.begin(), sources.end(),
            [](const ImageRecord* a, const ImageRecord* b) { return a->id < b->id; });
  std::map<ImageId, std::vector<const Annotation*>> by_image;
  for (const auto& a : dataset.annotations) by_image[a.image_id].push_back(&a);
  std::vector<std::vector<const Annotation*>> anns_for(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (auto it = by_image.find(sources[i]->id); it != by_image.end()) {
      anns_for[i] = it->second;
    }
  }

  std::vector<ImageJobResult> jobs(sources.size());
  parallel_for(sources.size(), config.parallelism, [&](std::size_t i) {
    jobs[i] = slice_one(*sources[i], anns_for[i], image_root,
                        images_out, config);
  });

  FinetuneResult result;
  result.dataset.categories = dataset.categories;
  ImageId next_image = 1;
  AnnotationId next_ann = 1;
  for (auto& job : jobs) {
    if (job.skipped) result.skipped_images.push_back(*job.skipped);
    result.patch_count += job.patches;
    for (auto& out : job.images) {
      out.record.id = next_image++;
      for (auto& a : out.annotations) {
        a.id = next_ann++;
        a.image_id = out.record.id;
        result.dataset.annotations.push_back(a);
      }
      result.dataset.images.push_back(std::move(out.record));
    }
  }
  save_coco(result.dataset, out_dir / "annotations.json");
  return result;
}

}  // namespace slicekit
