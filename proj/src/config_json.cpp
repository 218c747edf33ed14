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
#include "slicekit/config_json.hpp"

#include <functional>
#include <map>
#include <string>

#include <fmt/format.h>

#include "slicekit/error.hpp"

namespace slicekit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

using Setters = std::map<std::string, std::function<void(const json&)>>;

void apply(const json& j, const Setters& setters, std::string_view what) {
  if (!j.is_object()) {
    throw ParseError(fmt::format("{} config must be a JSON object", what));
  }
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ParseError(fmt::format("{} config: unknown key \"{}\"", what, key));
    }
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ParseError(
          fmt::format("{} config: bad value for \"{}\": {}", what, key, e.what()));
    }
  }
}

template <typename T>
std::function<void(const json&)> set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

}  // namespace

ordered_json to_json(const GridSpec& spec) {
  return {{"patch_w", spec.patch_w},
          {"patch_h", spec.patch_h},
          {"overlap", spec.overlap_ratio}};
}

ordered_json to_json(const MergeConfig& config) {
  return {{"tm", config.t_m}, {"td", config.t_d},
          {"class_aware", config.class_aware}};
}

ordered_json to_json(const PipelineConfig& c) {
  ordered_json j;
  j["patch_w"] = c.grid.patch_w;
  j["patch_h"] = c.grid.patch_h;
  j["overlap"] = c.grid.overlap_ratio;
  j["target_width"] = c.effective_target_width();
  j["sliced"] = c.sliced_inference;
  j["fi"] = c.full_inference;
  j["fi_target_width"] = c.fi_target_width;
  j["tm"] = c.merge.t_m;
  j["td"] = c.merge.t_d;
  j["class_aware"] = c.merge.class_aware;
  j["seed"] = c.seed;
  j["parallelism"] = c.parallelism;
  j["strict"] = c.strict;
  return j;
}

ordered_json to_json(const VisibilityModel& m) {
  return {{"min_apparent_px", m.min_apparent_px},
          {"score_saturation_px", m.score_saturation_px},
          {"score_floor", m.score_floor},
          {"localization_noise_px", m.localization_noise_px},
          {"min_visible_fraction", m.min_visible_fraction},
          {"seed", m.seed}};
}

ordered_json to_json(const SceneConfig& c) {
  ordered_json j;
  j["width"] = c.width;
  j["height"] = c.height;
  j["n_images"] = c.n_images;
  j["objects_min"] = c.objects_min;
  j["objects_max"] = c.objects_max;
  j["small_size_range"] = {c.small_size_range.first, c.small_size_range.second};
  j["large_size_range"] = {c.large_size_range.first, c.large_size_range.second};
  j["large_object_fraction"] = c.large_object_fraction;
  j["seam_fraction"] = c.seam_fraction;
  j["seam_period"] = c.seam_period;
  j["seed"] = c.seed;
  j["background"] = c.background == Background::kFlat ? "flat" : "noise";
  j["write_images"] = c.write_images;
  return j;
}

ordered_json to_json(const SliceJobConfig& c) {
  ordered_json j;
  j["patch_min_w"] = c.dims.m_min;
  j["patch_max_w"] = c.dims.m_max;
  j["patch_min_h"] = c.dims.n_min;
  j["patch_max_h"] = c.dims.n_max;
  j["overlap"] = c.overlap_ratio;
  j["min_area_ratio"] = c.min_area_ratio;
  j["include_originals"] = c.include_originals;
  j["resize_width_range"] = {c.resize_width_range.first, c.resize_width_range.second};
  j["seed"] = c.seed;
  j["strict"] = c.strict;
  j["parallelism"] = c.parallelism;
  return j;
}

ordered_json to_json(const EvalConfig& c) {
  return {{"iou", c.iou_threshold}, {"max_dets", c.max_detections}};
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig c) {
  const Setters setters{
      {"patch", [&](const json& v) { c.grid.patch_w = c.grid.patch_h = v.get<int>(); }},
      {"patch_w", set(c.grid.patch_w)},
      {"patch_h", set(c.grid.patch_h)},
      {"overlap", set(c.grid.overlap_ratio)},
      {"target_width",
       [&](const json& v) {
         c.target_width = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
       }},
      {"sliced", set(c.sliced_inference)},
      {"fi", set(c.full_inference)},
      {"fi_target_width", set(c.fi_target_width)},
      {"tm", set(c.merge.t_m)},
      {"td", set(c.merge.t_d)},
      {"class_aware", set(c.merge.class_aware)},
      {"seed", set(c.seed)},
      {"parallelism", set(c.parallelism)},
      {"strict", set(c.strict)},
  };
  apply(j, setters, "pipeline");
  return c;
}

VisibilityModel visibility_from_json(const json& j, VisibilityModel m) {
  const Setters setters{
      {"min_apparent_px", set(m.min_apparent_px)},
      {"score_saturation_px", set(m.score_saturation_px)},
      {"score_floor", set(m.score_floor)},
      {"localization_noise_px", set(m.localization_noise_px)},
      {"min_visible_fraction", set(m.min_visible_fraction)},
      {"seed", set(m.seed)},
  };
  apply(j, setters, "visibility");
  return m;
}

SceneConfig scene_config_from_json(const json& j, SceneConfig c) {
  const auto range = [](std::pair<int, int>& field) {
    return [&field](const json& v) {
      const auto r = v.get<std::vector<int>>();
      if (r.size() != 2) throw ParseError("size range must have 2 entries");
      field = {r[0], r[1]};
    };
  };
  const Setters setters{
      {"width", set(c.width)},
      {"height", set(c.height)},
      {"n_images", set(c.n_images)},
      {"objects_min", set(c.objects_min)},
      {"objects_max", set(c.objects_max)},
      {"small_size_range", range(c.small_size_range)},
      {"large_size_range", range(c.large_size_range)},
      {"large_object_fraction", set(c.large_object_fraction)},
      {"seam_fraction", set(c.seam_fraction)},
      {"seam_period", set(c.seam_period)},
      {"seed", set(c.seed)},
      {"background",
       [&](const json& v) {
         const auto s = v.get<std::string>();
         if (s == "flat") {
           c.background = Background::kFlat;
         } else if (s == "noise") {
           c.background = Background::kNoise;
         } else {
           throw ParseError(fmt::format("unknown background \"{}\"", s));
         }
       }},
      {"write_images", set(c.write_images)},
      {"max_placement_attempts", set(c.max_placement_attempts)},
  };
  apply(j, setters, "scene");
  return c;
}

std::vector<LabeledConfig> labeled_configs_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("configs must be a non-empty JSON array");
  }
  std::vector<LabeledConfig> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("label") || !item["label"].is_string()) {
      throw ParseError("every config needs a string \"label\"");
    }
    json rest = item;
    rest.erase("label");
    out.push_back(LabeledConfig{item["label"].get<std::string>(),
                                pipeline_config_from_json(rest)});
  }
  return out;
}

}  // namespace slicekit
