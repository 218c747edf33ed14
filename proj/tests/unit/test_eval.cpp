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
#include "doctest.h"
#include "json.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"
#include "slicekit/eval.hpp"

using namespace slicekit;

namespace {

CocoDataset two_object_image() {
  CocoDataset ds;
  ds.images.push_back({1, "a.png", 200, 200, {}, {}});
  ds.categories = {{1, "a"}};
  ds.annotations.push_back({1, 1, 1, BBox(0, 0, 10, 10), 100, false});
  ds.annotations.push_back({2, 1, 1, BBox(100, 100, 110, 110), 100, false});
  return ds;
}

ImageDetection pred(ImageId img, CategoryId cat, double score, BBox b) {
  return ImageDetection{img, Detection{cat, score, b, DetectionSource::full_image()}};
}

}  // namespace

TEST_CASE("evaluator trivial cases") {
  CocoDataset ds;
  ds.images.push_back({1, "a.png", 100, 100, {}, {}});
  ds.categories = {{1, "a"}};
  ds.annotations.push_back({1, 1, 1, BBox(0, 0, 10, 10), 100, false});

  // IoU 0.6: (0,0,10,10) vs (0,0,10,6) = 60 / 100.
  const auto hit = evaluate(ds, {pred(1, 1, 0.9, BBox(0, 0, 10, 6))});
  CHECK(hit.ap50 == 1.0);
  CHECK(hit.counts.gt_matched == 1);
  CHECK(hit.counts.pred_true_positive == 1);

  const auto none = evaluate(ds, {});
  CHECK(none.ap50 == 0.0);
  CHECK(none.counts.gt_missed == 1);
}

TEST_CASE("three-prediction example") {
  const auto ds = two_object_image();
  const std::vector<ImageDetection> preds{
      pred(1, 1, 0.9, BBox(0, 0, 10, 10)),
      pred(1, 1, 0.8, BBox(0, 0, 10, 2)),  // IoU 0.2 with the first object
      pred(1, 1, 0.7, BBox(100, 100, 110, 110))};
  const auto r = evaluate(ds, preds);
  REQUIRE(r.ap50);
  // 51 recall points at precision 1 and 50 at precision 2/3.
  CHECK(*r.ap50 == doctest::Approx((51.0 + 50.0 * 2.0 / 3.0) / 101.0).epsilon(1e-12));
  CHECK(*r.ap50 == doctest::Approx(0.834983).epsilon(1e-6));
  CHECK(r.counts.pred_false_positive == 1);
  CHECK(r.counts.pred_true_positive == 2);
  REQUIRE(r.ap50_small);
  CHECK(*r.ap50_small == *r.ap50);
  CHECK_FALSE(r.ap50_medium);
  CHECK_FALSE(r.ap50_large);
}

TEST_CASE("perfect predictions score exactly one") {
  CocoDataset ds;
  ds.categories = {{1, "a"}, {2, "b"}, {3, "unused"}};
  AnnotationId id = 1;
  std::vector<ImageDetection> preds;
  for (ImageId img = 1; img <= 4; ++img) {
    ds.images.push_back({img, "x.png", 1000, 1000, {}, {}});
    for (int k = 0; k < 6; ++k) {
      const double s = 10.0 + 30.0 * k;
      const BBox b(k * 160.0, img * 10.0, k * 160.0 + s, img * 10.0 + s);
      ds.annotations.push_back({id++, img, 1 + k % 2, b, b.area(), false});
      preds.push_back(pred(img, 1 + k % 2, 0.1 + 0.1 * k, b));
    }
  }
  const auto r = evaluate(ds, preds);
  CHECK(r.ap50 == 1.0);
  CHECK(r.ap50_small == 1.0);
  CHECK(r.ap50_medium == 1.0);
  CHECK(r.ap50_large == 1.0);
  CHECK(r.per_category_ap.at(1) == 1.0);
  CHECK_FALSE(r.per_category_ap.at(3));
}

TEST_CASE("max detections cap is per image across categories") {
  auto ds = two_object_image();
  ds.categories.push_back({2, "b"});
  EvalConfig cfg;
  cfg.max_detections = 2;
  const std::vector<ImageDetection> preds{
      pred(1, 2, 0.99, BBox(50, 50, 60, 60)), pred(1, 2, 0.98, BBox(70, 70, 80, 80)),
      pred(1, 1, 0.5, BBox(0, 0, 10, 10)), pred(1, 1, 0.4, BBox(100, 100, 110, 110))};
  const auto capped = evaluate(ds, preds, cfg);
  CHECK(capped.ap50 == 0.0);
  cfg.max_detections = 4;
  CHECK(evaluate(ds, preds, cfg).ap50 == 1.0);
}

TEST_CASE("crowd regions absorb matches without counting") {
  auto ds = two_object_image();
  ds.annotations.push_back({3, 1, 1, BBox(150, 0, 200, 50), 2500, true});
  const std::vector<ImageDetection> preds{
      pred(1, 1, 0.95, BBox(160, 10, 170, 20)), pred(1, 1, 0.9, BBox(0, 0, 10, 10)),
      pred(1, 1, 0.7, BBox(100, 100, 110, 110))};
  CHECK(evaluate(ds, preds).ap50 == 1.0);
}

TEST_CASE("dangling references and invalid config") {
  const auto ds = two_object_image();
  CHECK_THROWS_AS(evaluate(ds, {pred(7, 1, 0.5, BBox(0, 0, 1, 1))}), ReferenceError);
  CHECK_THROWS_AS(evaluate(ds, {pred(1, 4, 0.5, BBox(0, 0, 1, 1))}), ReferenceError);
  EvalConfig cfg;
  cfg.iou_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.max_detections = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("agreement with the frozen pycocotools fixture") {
  const auto fixture =
      nlohmann::json::parse(read_text_file(std::filesystem::path(SLICEKIT_FIXTURE_DIR) /
                                           "coco_reference.json"));
  const auto& instances = fixture.at("instances");
  REQUIRE(instances.size() >= 20);
  int absent_bins = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    CAPTURE(i);
    const auto& inst = instances[i];
    const auto gt = parse_coco(inst.at("gt").dump());
    const auto preds = parse_results(inst.at("preds").dump());
    const auto r = evaluate(gt, preds);
    const auto& want = inst.at("expected");
    const std::array<std::pair<const char*, std::optional<double>>, 4> got{
        {{"ap50", r.ap50},
         {"ap50_small", r.ap50_small},
         {"ap50_medium", r.ap50_medium},
         {"ap50_large", r.ap50_large}}};
    for (const auto& [key, value] : got) {
      CAPTURE(key);
      if (want.at(key).is_null()) {
        CHECK_FALSE(value);
        ++absent_bins;
      } else {
        REQUIRE(value);
        CHECK(std::abs(*value - want.at(key).get<double>()) <= 1e-6);
      }
    }
  }
  CHECK(absent_bins > 0);
}

TEST_CASE("result JSON round trip") {
  const auto ds = two_object_image();
  const auto r = evaluate(ds, {pred(1, 1, 0.9, BBox(0, 0, 10, 10))});
  const auto back = EvalResult::from_json(r.to_json());
  CHECK(back.ap50 == r.ap50);
  CHECK(back.ap50_small == r.ap50_small);
  CHECK_FALSE(back.ap50_large);
  CHECK(back.per_category_ap == r.per_category_ap);
  CHECK(back.to_json() == r.to_json());
}

TEST_CASE("comparison table") {
  EvalResult base;
  base.ap50 = 0.258;
  base.ap50_small = 0.1;
  EvalResult run;
  run.ap50 = 0.290;
  run.ap50_small = 0.1;

  const auto single = compare_runs_table({{"baseline", base}});
  CHECK(single.find("config") != std::string::npos);
  CHECK(single.find("dAP50") == std::string::npos);
  CHECK(single.find("0.258") != std::string::npos);

  const auto two = compare_runs_table({{"baseline", base}, {"sliced+po", run}});
  CHECK(two.find("dAP50") != std::string::npos);
  CHECK(two.find("+0.032") != std::string::npos);
  CHECK(two.find("+0.000") != std::string::npos);
  CHECK(two.find("-") != std::string::npos);  // absent medium and large bins

  const auto csv = compare_runs_csv({{"baseline", base}, {"sliced+po", run}});
  CHECK(csv.rfind("config,AP50,AP50s,AP50m,AP50l,dAP50", 0) == 0);
  CHECK(csv.find("sliced+po,0.290") != std::string::npos);
}
