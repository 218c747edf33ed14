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
#include <algorithm>
#include <random>
#include <thread>

#include "doctest.h"
#include "slicekit/error.hpp"
#include "slicekit/external_detector.hpp"
#include "slicekit/oracle_detector.hpp"
#include "slicekit/replay_detector.hpp"
#include "test_support.hpp"

using namespace slicekit;

namespace {

CocoDataset scene_with(std::vector<BBox> boxes, int w = 2048, int h = 2048) {
  CocoDataset ds;
  ds.images.push_back({1, "scene.png", w, h, {}, {}});
  ds.categories = {{1, "a"}, {2, "b"}};
  AnnotationId id = 1;
  for (const auto& b : boxes) {
    ds.annotations.push_back({id, 1, 1 + (id % 2), b, b.area(), false});
    ++id;
  }
  return ds;
}

DetectRequest request(BBox region, int target_width, ImageId image = 1) {
  return DetectRequest{image, std::filesystem::path("scene.png"), region, target_width, 0};
}

std::string echo_command(const std::string& extra = "") {
  return std::string("python3 -u ") + SLICEKIT_ECHO_DETECTOR + " " + extra;
}

}  // namespace

TEST_CASE("oracle: small object invisible at full-image scale, visible in a patch") {
  const GroundTruthIndex gt(scene_with({BBox(700, 700, 716, 716)}));
  VisibilityModel vis;
  vis.min_apparent_px = 32;
  // 16 * (1024 / 2048) = 8 < 32
  CHECK(oracle_detect(request(BBox(0, 0, 2048, 2048), 1024), gt, vis).empty());
  // 16 * (1024 / 512) = 32 >= 32
  const auto dets = oracle_detect(request(BBox(512, 512, 1024, 1024), 1024), gt, vis);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].bbox == BBox(376, 376, 408, 408));  // (700 - 512) * 2
  CHECK(dets[0].score == doctest::Approx(vis.score_for(32.0)));
}

TEST_CASE("oracle: identity configuration returns ground truth") {
  const std::vector<BBox> boxes{BBox(10, 10, 20, 30), BBox(100.5, 40, 300, 41),
                                BBox(0, 0, 2048, 5)};
  const GroundTruthIndex gt(scene_with(boxes));
  VisibilityModel vis;
  vis.min_apparent_px = 0;
  vis.localization_noise_px = 0;
  const auto dets = oracle_detect(request(BBox(0, 0, 2048, 2048), 2048), gt, vis);
  REQUIRE(dets.size() == boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    CHECK(dets[i].bbox == boxes[i]);
    CHECK(dets[i].category_id == static_cast<CategoryId>(1 + (i + 1) % 2));
  }
}

TEST_CASE("oracle: truncation, clipping and unknown images") {
  const GroundTruthIndex gt(scene_with({BBox(90, 0, 130, 40)}));
  VisibilityModel vis;
  vis.min_apparent_px = 1;
  // Region cuts the object at x = 100: a 10 x 40 sliver survives.
  auto dets = oracle_detect(request(BBox(0, 0, 100, 100), 100), gt, vis);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].bbox == BBox(90, 0, 100, 40));
  vis.min_visible_fraction = 0.5;  // sliver is 25% of the object
  CHECK(oracle_detect(request(BBox(0, 0, 100, 100), 100), gt, vis).empty());
  CHECK_THROWS_AS(oracle_detect(request(BBox(0, 0, 100, 100), 100, 99), gt, vis),
                  DetectorError);
}

TEST_CASE("oracle: deterministic, call-order independent, scale monotone") {
  std::mt19937_64 gen(3);
  std::vector<BBox> boxes;
  for (int i = 0; i < 60; ++i) {
    const double x = std::uniform_int_distribution<int>(0, 1900)(gen);
    const double y = std::uniform_int_distribution<int>(0, 1900)(gen);
    const double s = std::uniform_int_distribution<int>(4, 120)(gen);
    boxes.emplace_back(x, y, x + s, y + s);
  }
  const GroundTruthIndex gt(scene_with(boxes));
  VisibilityModel vis;
  vis.localization_noise_px = 1.5;
  vis.seed = 42;

  std::vector<DetectRequest> reqs;
  for (int i = 0; i < 20; ++i) {
    const double x = std::uniform_int_distribution<int>(0, 1500)(gen);
    const double y = std::uniform_int_distribution<int>(0, 1500)(gen);
    reqs.push_back(request(BBox(x, y, x + 512, y + 512), 1024));
  }
  std::vector<std::vector<Detection>> first;
  for (const auto& r : reqs) first.push_back(oracle_detect(r, gt, vis));
  for (int i = 19; i >= 0; --i) {
    CHECK(oracle_detect(reqs[static_cast<std::size_t>(i)], gt, vis) ==
          first[static_cast<std::size_t>(i)]);
  }

  vis.localization_noise_px = 0;
  for (const auto& r : reqs) {
    std::size_t prev = 0;
    for (int tw : {128, 256, 512, 1024, 2048}) {
      auto rr = r;
      rr.target_width = tw;
      const auto n = oracle_detect(rr, gt, vis).size();
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("replay store lookup") {
  PredictionStore store;
  const auto req = request(BBox(0, 0, 512, 512), 1024);
  CHECK(replay_key(req) == "1:0:0:512:512:1024");
  const std::vector<Detection> three{
      {1, 0.9, BBox(1, 1, 5, 5), DetectionSource::full_image()},
      {2, 0.5, BBox(10, 10, 50, 50), DetectionSource::full_image()},
      {1, 0.25, BBox(100, 100, 101, 102), DetectionSource::full_image()}};
  store.put(replay_key(req), three);
  const auto reloaded = PredictionStore::parse(store.dump());

  ReplayDetector lenient(reloaded, false);
  CHECK(lenient.detect(req) == three);
  CHECK(lenient.detect(request(BBox(0, 0, 256, 256), 1024)).empty());

  ReplayDetector strict(reloaded, true);
  try {
    strict.detect(request(BBox(0, 0, 256, 256), 1024));
    FAIL("expected DetectorError");
  } catch (const DetectorError& e) {
    CHECK(std::string(e.what()).find("1:0:0:256:256:1024") != std::string::npos);
  }
  CHECK_THROWS_AS(PredictionStore::parse("[1, 2]"), ParseError);
  CHECK_THROWS_AS(PredictionStore::parse(R"({"k": [{"bbox": [0, 0, 1]}]})"), ParseError);
}

TEST_CASE("recording then replaying reproduces the oracle") {
  const GroundTruthIndex gt(scene_with({BBox(10, 10, 60, 60), BBox(300, 300, 400, 380)}));
  VisibilityModel vis;
  vis.min_apparent_px = 4;
  OracleDetector oracle(gt, vis);
  RecordingDetector rec(oracle);
  const auto req = request(BBox(0, 0, 512, 512), 512);
  const auto live = rec.detect(req);
  ReplayDetector replay(PredictionStore::parse(rec.store().dump()), true);
  CHECK(replay.detect(req) == live);
}

TEST_CASE("request and response encoding") {
  DetectRequest req{3, std::filesystem::path("img dir/a \"b\".png"), BBox(0, 10, 512, 522), 1024, 17};
  CHECK(encode_request(req) ==
        R"({"id": 17, "image": "img dir/a \"b\".png", "region": [0, 10, 512, 522], "target_width": 1024})");

  int clamped = 0;
  int dropped = 0;
  const auto dets = decode_response(
      R"({"id": 17, "detections": [{"bbox": [10, 10, 1026, 20], "score": 0.7, "category_id": 2},)"
      R"( {"bbox": [1030, 10, 1040, 20], "score": 0.7, "category_id": 2}]})",
      req, &clamped, &dropped);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].bbox == BBox(10, 10, 1024, 20));
  CHECK(clamped == 2);
  CHECK(dropped == 1);

  CHECK(decode_response(R"({"id": 17, "detections": []})", req).empty());
  CHECK_THROWS_AS(decode_response(R"({"id": 18, "detections": []})", req), ProtocolError);
  CHECK_THROWS_AS(decode_response("garbage", req), ProtocolError);
  CHECK_THROWS_AS(
      decode_response(R"({"id": 17, "detections": [{"bbox": [0, 0, 1, 1], "score": 2, "category_id": 1}]})", req),
      ProtocolError);

  DetectRequest in_memory = req;
  in_memory.image = std::make_shared<const ImageBuffer>();
  CHECK_THROWS_AS(encode_request(in_memory), DetectorError);
}

TEST_CASE("external backend talks to the echo detector") {
  SUBCASE("empty responses") {
    ExternalDetector ext({echo_command("--empty"), 1, std::chrono::seconds(30)});
    CHECK(ext.detect(request(BBox(0, 0, 512, 512), 1024)).empty());
  }
  SUBCASE("out-of-bounds box is clamped") {
    ExternalDetector ext({echo_command("--oob-every 1"), 1, std::chrono::seconds(30)});
    const auto dets = ext.detect(request(BBox(0, 0, 512, 256), 1024));
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].bbox == BBox(256, 128, 1024, 384));
    CHECK(ext.stats().clamped_boxes == 1);
  }
  SUBCASE("child closing stdout is fatal and names the command") {
    ExternalDetector ext({echo_command("--die-after 1"), 1, std::chrono::seconds(30)});
    CHECK(ext.detect(request(BBox(0, 0, 512, 512), 512)).size() == 1);
    try {
      ext.detect(request(BBox(0, 0, 512, 512), 512));
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(std::string(e.what()).find("echo_detector.py") != std::string::npos);
    }
  }
  SUBCASE("malformed line is fatal and echoed") {
    ExternalDetector ext({echo_command("--garbage-after 0"), 1, std::chrono::seconds(30)});
    try {
      ext.detect(request(BBox(0, 0, 512, 512), 512));
      FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
      CHECK(std::string(e.what()).find("this is not json") != std::string::npos);
    }
  }
  SUBCASE("bad handshake") {
    CHECK_THROWS_AS(ExternalDetector({"echo hello", 1, std::chrono::seconds(5)}), ProtocolError);
    CHECK_THROWS_AS(ExternalDetector({"true", 1, std::chrono::seconds(5)}), ProtocolError);
  }
  SUBCASE("timeout") {
    const std::string cmd =
        R"(printf '{"protocol": "slicekit-detect", "version": 1}\n'; sleep 5)";
    ExternalDetector ext({cmd, 1, std::chrono::milliseconds(200)});
    CHECK_THROWS_AS(ext.detect(request(BBox(0, 0, 10, 10), 10)), ProtocolError);
  }
  SUBCASE("several workers serve concurrent requests") {
    ExternalDetector ext({echo_command(), 3, std::chrono::seconds(30)});
    std::vector<std::jthread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 6; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 10; ++i) {
          auto req = request(BBox(0, 0, 100 + t, 100), 200);
          req.request_id = t * 100 + i;
          if (ext.detect(req).size() == 1) ++ok;
        }
      });
    }
    threads.clear();
    CHECK(ok == 60);
    CHECK(ext.stats().requests == 60);
  }
}
