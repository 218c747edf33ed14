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
#include "slicekit/coco_io.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "slicekit/error.hpp"

namespace slicekit {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(fmt::format("{}: missing key \"{}\"", where, key));
  }
  return *it;
}

template <typename T>
T require_as(const json& obj, const char* key, std::string_view where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: bad value for \"{}\": {}", where, key,
                                 e.what()));
  }
}

std::array<double, 4> read_quad(const json& obj, std::string_view where) {
  const json& v = require(obj, "bbox", where);
  if (!v.is_array() || v.size() != 4) {
    throw ParseError(fmt::format("{}: bbox must be an array of 4 numbers",
                                 where));
  }
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) {
      throw ParseError(fmt::format("{}: bbox entries must be numbers", where));
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed JSON: {}", e.what()));
  }
}

std::string xywh(const BBox& b) {
  return fmt::format("[{}, {}, {}, {}]", format_fixed(b.x_min(), 2),
                     format_fixed(b.y_min(), 2), format_fixed(b.width(), 2),
                     format_fixed(b.height(), 2));
}

std::string quoted(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_fixed(double value, int decimals) {
  std::string s = fmt::format("{:.{}f}", value, decimals);
  if (!s.empty() && s.front() == '-' &&
      s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

void CocoDataset::validate() const {
  std::unordered_set<ImageId> image_ids;
  for (const auto& img : images) {
    if (!image_ids.insert(img.id).second) {
      throw ReferenceError(fmt::format("duplicate image id {}", img.id));
    }
    if (img.width < 1 || img.height < 1) {
      throw ValidationError(fmt::format("image {} has invalid size {}x{}",
                                        img.id, img.width, img.height));
    }
  }
  std::unordered_set<CategoryId> category_ids;
  for (const auto& cat : categories) {
    if (!category_ids.insert(cat.id).second) {
      throw ReferenceError(fmt::format("duplicate category id {}", cat.id));
    }
  }
  std::unordered_set<AnnotationId> ann_ids;
  for (const auto& ann : annotations) {
    if (!ann_ids.insert(ann.id).second) {
      throw ReferenceError(fmt::format("duplicate annotation id {}", ann.id));
    }
    if (!image_ids.contains(ann.image_id)) {
      throw ReferenceError(fmt::format(
          "annotation {} references unknown image_id {}", ann.id,
          ann.image_id));
    }
    if (!category_ids.contains(ann.category_id)) {
      throw ReferenceError(fmt::format(
          "annotation {} references unknown category_id {}", ann.id,
          ann.category_id));
    }
    if (!(ann.area > 0.0)) {
      throw GeometryError(
          fmt::format("annotation {} has non-positive area", ann.id));
    }
  }
}

const ImageRecord* CocoDataset::find_image(ImageId id) const noexcept {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

bool CocoDataset::has_category(CategoryId id) const noexcept {
  for (const auto& cat : categories) {
    if (cat.id == id) return true;
  }
  return false;
}

CocoDataset parse_coco(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("COCO document must be an object");

  CocoDataset ds;
  for (const char* key : {"images", "annotations", "categories"}) {
    if (doc.contains(key) && !doc[key].is_array()) {
      throw ParseError(fmt::format("\"{}\" must be an array", key));
    }
  }

  if (doc.contains("images")) {
    for (const auto& j : doc["images"]) {
      ImageRecord img;
      img.id = require_as<ImageId>(j, "id", "image");
      const auto where = fmt::format("image {}", img.id);
      img.file_name = require_as<std::string>(j, "file_name", where);
      img.width = require_as<int>(j, "width", where);
      img.height = require_as<int>(j, "height", where);
      if (auto it = j.find("slicekit_patch"); it != j.end()) {
        img.patch_origin = PatchOrigin{
            require_as<ImageId>(*it, "source_image_id", where),
            require_as<int>(*it, "x", where), require_as<int>(*it, "y", where)};
      }
      if (auto it = j.find("slicekit_resize"); it != j.end()) {
        img.resize = ResizeHint{require_as<int>(*it, "width", where),
                                require_as<int>(*it, "height", where)};
      }
      ds.images.push_back(std::move(img));
    }
  }
  if (doc.contains("categories")) {
    for (const auto& j : doc["categories"]) {
      Category cat;
      cat.id = require_as<CategoryId>(j, "id", "category");
      if (auto it = j.find("name"); it != j.end() && it->is_string()) {
        cat.name = it->get<std::string>();
      }
      ds.categories.push_back(std::move(cat));
    }
  }
  if (doc.contains("annotations")) {
    for (const auto& j : doc["annotations"]) {
      const auto id = require_as<AnnotationId>(j, "id", "annotation");
      const auto where = fmt::format("annotation {}", id);
      const auto q = read_quad(j, where);
      auto box = BBox::make(q[0], q[1], q[0] + q[2], q[1] + q[3]);
      if (!box) {
        throw GeometryError(fmt::format(
            "annotation {} has non-positive width/height bbox", id));
      }
      Annotation ann{.id = id,
                     .image_id = require_as<ImageId>(j, "image_id", where),
                     .category_id =
                         require_as<CategoryId>(j, "category_id", where),
                     .bbox = *box,
                     .area = box->area(),
                     .iscrowd = false};
      if (auto it = j.find("area"); it != j.end() && it->is_number()) {
        ann.area = it->get<double>();
      }
      if (auto it = j.find("iscrowd"); it != j.end()) {
        ann.iscrowd = it->is_boolean() ? it->get<bool>() : it->get<int>() != 0;
      }
      ds.annotations.push_back(ann);
    }
  }
  ds.validate();
  return ds;
}

CocoDataset load_coco(const std::filesystem::path& path) {
  return parse_coco(read_text_file(path));
}

std::string dump_coco(const CocoDataset& dataset) {
  std::string out = "{\n\"images\": [";
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    const auto& img = dataset.images[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += fmt::format(
        "{{\"id\": {}, \"file_name\": {}, \"width\": {}, \"height\": {}",
        img.id, quoted(img.file_name), img.width, img.height);
    if (img.patch_origin) {
      out += fmt::format(
          ", \"slicekit_patch\": {{\"source_image_id\": {}, \"x\": {}, "
          "\"y\": {}}}",
          img.patch_origin->source_image_id, img.patch_origin->x,
          img.patch_origin->y);
    }
    if (img.resize) {
      out += fmt::format(
          ", \"slicekit_resize\": {{\"width\": {}, \"height\": {}}}",
          img.resize->width, img.resize->height);
    }
    out += "}";
  }
  out += dataset.images.empty() ? "],\n" : "\n],\n";

  out += "\"annotations\": [";
  for (std::size_t i = 0; i < dataset.annotations.size(); ++i) {
    const auto& ann = dataset.annotations[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += fmt::format(
        "{{\"id\": {}, \"image_id\": {}, \"category_id\": {}, \"bbox\": {}, "
        "\"area\": {}, \"iscrowd\": {}}}",
        ann.id, ann.image_id, ann.category_id, xywh(ann.bbox),
        format_fixed(ann.area, 2), ann.iscrowd ? 1 : 0);
  }
  out += dataset.annotations.empty() ? "],\n" : "\n],\n";

  out += "\"categories\": [";
  for (std::size_t i = 0; i < dataset.categories.size(); ++i) {
    const auto& cat = dataset.categories[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += fmt::format("{{\"id\": {}, \"name\": {}}}", cat.id,
                       quoted(cat.name));
  }
  out += dataset.categories.empty() ? "]\n}\n" : "\n]\n}\n";
  return out;
}

void save_coco(const CocoDataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dump_coco(dataset));
}

std::vector<ImageDetection> parse_results(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_array()) throw ParseError("results document must be an array");
  std::vector<ImageDetection> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const auto where = fmt::format("result #{}", i);
    const auto q = read_quad(j, where);
    auto box = BBox::make(q[0], q[1], q[0] + q[2], q[1] + q[3]);
    if (!box) {
      throw GeometryError(fmt::format("{}: non-positive width/height", where));
    }
    const double score = require_as<double>(j, "score", where);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ParseError(fmt::format("{}: score {} outside [0, 1]", where, score));
    }
    out.push_back(ImageDetection{
        require_as<ImageId>(j, "image_id", where),
        Detection{require_as<CategoryId>(j, "category_id", where), score, *box,
                  DetectionSource::full_image()}});
  }
  return out;
}

std::vector<ImageDetection> load_results(const std::filesystem::path& path) {
  return parse_results(read_text_file(path));
}

std::string dump_results(const std::vector<ImageDetection>& detections) {
  std::string out = "[";
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += fmt::format(
        "{{\"image_id\": {}, \"category_id\": {}, \"bbox\": {}, \"score\": "
        "{}}}",
        d.image_id, d.detection.category_id, xywh(d.detection.bbox),
        format_fixed(d.detection.score, 6));
  }
  out += detections.empty() ? "]\n" : "\n]\n";
  return out;
}

void save_results(const std::vector<ImageDetection>& detections,
                  const std::filesystem::path& path) {
  write_text_file(path, dump_results(detections));
}

void check_results_against(const CocoDataset& dataset,
                           const std::vector<ImageDetection>& detections) {
  std::unordered_set<ImageId> images;
  for (const auto& img : dataset.images) images.insert(img.id);
  std::unordered_set<CategoryId> cats;
  for (const auto& c : dataset.categories) cats.insert(c.id);
  for (const auto& d : detections) {
    if (!images.contains(d.image_id)) {
      throw ReferenceError(
          fmt::format("prediction references unknown image_id {}", d.image_id));
    }
    if (!cats.contains(d.detection.category_id)) {
      throw ReferenceError(fmt::format(
          "prediction references unknown category_id {}",
          d.detection.category_id));
    }
  }
}

}  // namespace slicekit
