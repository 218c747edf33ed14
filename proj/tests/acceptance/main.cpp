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
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "reference_oracles.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/dataset_slicer.hpp"
#include "slicekit/error.hpp"
#include "slicekit/eval.hpp"
#include "slicekit/external_detector.hpp"
#include "slicekit/image_io.hpp"
#include "slicekit/merge.hpp"
#include "slicekit/oracle_detector.hpp"
#include "slicekit/pipeline.hpp"
#include "slicekit/slice_grid.hpp"
#include "slicekit/synthbench.hpp"

namespace fs = std::filesystem;
using namespace slicekit;

namespace {

struct Outcome {
  bool pass = true;
  std::string failures;
  std::string notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (!failures.empty()) failures += "; ";
    failures += what;
    pass = false;
  }
  void note(const std::string& what) {
    if (!notes.empty()) notes += "; ";
    notes += what;
  }
  std::string detail() const {
    if (failures.empty()) return notes;
    if (notes.empty()) return failures;
    return failures + " | " + notes;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) ++count_b;
  }
  if (files.size() != count_b) return false;
  for (const auto& f : files) {
    if (slurp(a / f) != slurp(b / f)) return false;
  }
  return true;
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag)
      : path_(fs::temp_directory_path() /
              fmt::format("slicekit_acceptance_{}_{}", tag, ::getpid())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Outcome grid_coverage_fuzz() {
  Outcome out;
  std::mt19937_64 gen(20260101);
  const auto t0 = Clock::now();
  const int cases = 1500;
  int failures = 0;
  for (int i = 0; i < cases; ++i) {
    const int w = std::uniform_int_distribution<int>(1, 5000)(gen);
    const int h = std::uniform_int_distribution<int>(1, 5000)(gen);
    const int m = std::uniform_int_distribution<int>(16, 1024)(gen);
    const int n = std::uniform_int_distribution<int>(16, 1024)(gen);
    const double ov = std::uniform_int_distribution<int>(0, 75)(gen) / 100.0;
    const GridSpec spec{m, n, ov};
    const auto grid = compute_slice_grid(w, h, spec);
    bool ok = coverage_check(w, h, grid);
    const BBox image(0, 0, w, h);
    for (const auto& s : grid) {
      ok = ok && image.contains(s.rect);
      ok = ok && s.width() == std::min(m, w) && s.height() == std::min(n, h);
    }
    for (const auto& [extent, patch] : {std::pair{w, m}, std::pair{h, n}}) {
      const auto offs = axis_offsets(extent, patch, ov);
      const int step = std::max(1, patch - static_cast<int>(std::ceil(patch * ov - 1e-9)));
      ok = ok && !offs.empty() && offs.front() == 0 &&
           offs.back() == std::max(0, extent - patch);
      for (std::size_t k = 1; k < offs.size(); ++k) {
        const int d = offs[k] - offs[k - 1];
        ok = ok && d > 0 && d <= step;
      }
    }
    ok = ok && grid.size() == axis_offsets(w, m, ov).size() * axis_offsets(h, n, ov).size();
    if (!ok) ++failures;
  }
  const double secs = seconds_since(t0);
  out.expect(failures == 0, fmt::format("{} of {} cases violate an invariant", failures, cases));
  out.expect(secs < 5.0, fmt::format("took {:.2f} s (limit 5 s)", secs));
  out.note(fmt::format("{} cases in {:.2f} s", cases, secs));
  return out;
}

Outcome remap_round_trip() {
  Outcome out;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int cases = 2000;
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const int w = std::uniform_int_distribution<int>(64, 6000)(gen);
    const int h = std::uniform_int_distribution<int>(64, 6000)(gen);
    const int m = std::uniform_int_distribution<int>(16, 1024)(gen);
    const int tw = std::uniform_int_distribution<int>(16, 2048)(gen);
    const auto grid = compute_slice_grid(w, h, GridSpec{m, m, 0.2});
    SliceRect s = grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(gen)];
    s.resize_scale = static_cast<double>(tw) / s.width();
    const double px = u(gen) * s.width() * s.resize_scale;
    const double py = u(gen) * s.height() * s.resize_scale;
    worst = std::max(worst, std::abs(to_patch_x(to_image_x(px, s), s) - px));
    worst = std::max(worst, std::abs(to_patch_y(to_image_y(py, s), s) - py));
    const double ix = s.rect.x_min() + u(gen) * s.width();
    const double iy = s.rect.y_min() + u(gen) * s.height();
    worst = std::max(worst, std::abs(to_image_x(to_patch_x(ix, s), s) - ix));
    worst = std::max(worst, std::abs(to_image_y(to_patch_y(iy, s), s) - iy));

    // A box inside the slice comes back where it started.
    const double bw = 1 + u(gen) * (s.width() - 1) / 2;
    const double bh = 1 + u(gen) * (s.height() - 1) / 2;
    const BBox original(s.rect.x_min(), s.rect.y_min(), s.rect.x_min() + bw,
                        s.rect.y_min() + bh);
    const Detection in_patch{1, 0.5,
                             BBox(to_patch_x(original.x_min(), s), to_patch_y(original.y_min(), s),
                                  to_patch_x(original.x_max(), s), to_patch_y(original.y_max(), s)),
                             DetectionSource::full_image()};
    const auto back = remap_detection(in_patch, s, w, h);
    if (!back) {
      worst = std::max(worst, 1.0);
      continue;
    }
    worst = std::max({worst, std::abs(back->bbox.x_min() - original.x_min()),
                      std::abs(back->bbox.y_min() - original.y_min()),
                      std::abs(back->bbox.x_max() - original.x_max()),
                      std::abs(back->bbox.y_max() - original.y_max())});
  }
  out.expect(worst <= 1e-6, fmt::format("worst error {:.3g} exceeds 1e-6", worst));
  out.note(fmt::format("{} cases, worst error {:.3g}", cases, worst));
  return out;
}

std::vector<Detection> random_detections(std::mt19937_64& gen) {
  const int n = std::uniform_int_distribution<int>(0, 50)(gen);
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    const double x = 4 * std::uniform_int_distribution<int>(0, 20)(gen);
    const double y = 4 * std::uniform_int_distribution<int>(0, 20)(gen);
    const double w = 4 * std::uniform_int_distribution<int>(1, 10)(gen);
    const double h = 4 * std::uniform_int_distribution<int>(1, 10)(gen);
    const double score = std::uniform_int_distribution<int>(1, 10)(gen) / 10.0;
    const CategoryId cat = std::uniform_int_distribution<int>(1, 3)(gen);
    dets.push_back({cat, score, BBox(x, y, x + w, y + h),
                    DetectionSource::patch(std::uniform_int_distribution<int>(0, 3)(gen))});
  }
  return dets;
}

Outcome nms_equivalence() {
  Outcome out;
  std::mt19937_64 gen(4242);
  int cases = 0;
  int mismatches = 0;
  int not_idempotent = 0;
  for (int i = 0; i < 600; ++i) {
    const auto dets = random_detections(gen);
    const double t_m = std::uniform_int_distribution<int>(1, 10)(gen) / 10.0;
    const double t_d = std::uniform_int_distribution<int>(0, 5)(gen) / 10.0;
    for (bool aware : {true, false}) {
      const MergeConfig cfg{t_m, t_d, aware};
      const auto got = nms(dets, cfg);
      if (got != reference::brute_force_nms(dets, t_m, t_d, aware)) ++mismatches;
      if (nms(got, cfg) != got) ++not_idempotent;
      ++cases;
    }
  }
  // IoU exactly t_m: (0,0,30,10) and (0,0,15,10) have IoU 0.5 and both stay.
  const std::vector<Detection> boundary{
      {1, 0.9, BBox(0, 0, 30, 10), DetectionSource::full_image()},
      {1, 0.8, BBox(0, 0, 15, 10), DetectionSource::full_image()}};
  const bool boundary_ok = nms(boundary, MergeConfig{0.5, 0.0, true}).size() == 2 &&
                           nms(boundary, MergeConfig{0.49, 0.0, true}).size() == 1 &&
                           reference::brute_force_nms(boundary, 0.5, 0.0, true).size() == 2;
  out.expect(mismatches == 0, fmt::format("{} of {} cases differ from the reference", mismatches, cases));
  out.expect(not_idempotent == 0, fmt::format("{} cases not idempotent", not_idempotent));
  out.expect(boundary_ok, "IoU == t_m boundary case not kept");
  out.note(fmt::format("{} cases (class-aware on and off), boundary case kept", cases));
  return out;
}

Outcome evaluator_correctness() {
  Outcome out;
  CocoDataset ds;
  ds.images.push_back({1, "a.png", 200, 200, {}, {}});
  ds.categories = {{1, "a"}};
  ds.annotations.push_back({1, 1, 1, BBox(0, 0, 10, 10), 100, false});
  ds.annotations.push_back({2, 1, 1, BBox(100, 100, 110, 110), 100, false});
  const auto pd = [](double score, BBox b) {
    return ImageDetection{1, Detection{1, score, b, DetectionSource::full_image()}};
  };
  const auto three = evaluate(ds, {pd(0.9, BBox(0, 0, 10, 10)), pd(0.8, BBox(0, 0, 10, 2)),
                                   pd(0.7, BBox(100, 100, 110, 110))});
  const double ap = three.ap50.value_or(-1);
  out.expect(std::abs(ap - 0.8337) <= 1e-4,
             fmt::format("3-prediction example gives AP50 {:.6f}, stated target 0.8337 +- 1e-4 "
                         "(101-point interpolation: (51 + 50 * 2/3) / 101 = 0.834983)",
                         ap));

  const auto perfect = evaluate(ds, {pd(0.9, BBox(0, 0, 10, 10)), pd(0.5, BBox(100, 100, 110, 110))});
  out.expect(perfect.ap50 == 1.0, "perfect predictions do not give exactly 1.0");

  const auto fixture = nlohmann::json::parse(
      slurp(fs::path(SLICEKIT_FIXTURE_DIR) / "coco_reference.json"));
  int matched = 0;
  int total = 0;
  double worst = 0.0;
  for (const auto& inst : fixture.at("instances")) {
    ++total;
    const auto r = evaluate(parse_coco(inst.at("gt").dump()), parse_results(inst.at("preds").dump()));
    bool ok = true;
    const auto& want = inst.at("expected");
    for (const auto& [key, value] :
         {std::pair{"ap50", r.ap50}, std::pair{"ap50_small", r.ap50_small},
          std::pair{"ap50_medium", r.ap50_medium}, std::pair{"ap50_large", r.ap50_large}}) {
      if (want.at(key).is_null()) {
        ok = ok && !value;
      } else {
        const double diff = value ? std::abs(*value - want.at(key).get<double>()) : 1.0;
        worst = std::max(worst, diff);
        ok = ok && diff <= 1e-6;
      }
    }
    if (ok) ++matched;
  }
  out.expect(total >= 20 && matched == total,
             fmt::format("{} of {} reference instances match", matched, total));
  out.note(fmt::format("3-prediction AP50 {:.6f}; perfect = {}; {}/{} pycocotools instances within 1e-6 (worst {:.2g})",
                       ap, perfect.ap50.value_or(-1), matched, total, worst));
  return out;
}

Outcome dataset_slicer_checks() {
  Outcome out;
  ScratchDir src("slicer_src");
  CocoDataset ds;
  ds.categories = {{1, "a"}, {2, "b"}};
  auto img = make_image(1024, 1024, 10, 20, 30);
  std::mt19937_64 gen(5);
  for (int k = 0; k < 40; ++k) {
    const int x = std::uniform_int_distribution<int>(0, 980)(gen);
    const int y = std::uniform_int_distribution<int>(0, 980)(gen);
    const int s = std::uniform_int_distribution<int>(4, 44)(gen);
    const BBox b(x, y, x + s, y + s);
    fill_rect(img, x, y, x + s, y + s, 250, 120, 20);
    ds.annotations.push_back({k + 1, 1, 1 + k % 2, b, b.area(), false});
  }
  write_png(src.path() / "fixture.png", img);
  ds.images.push_back({1, "fixture.png", 1024, 1024, {}, {}});

  SliceJobConfig cfg;
  cfg.dims = DimsRange{512, 512, 512, 512};
  cfg.overlap_ratio = 0.25;
  cfg.seed = 11;
  ScratchDir a("slicer_a");
  ScratchDir b("slicer_b");
  const auto ra = build_finetune_dataset(ds, src.path(), a.path(), cfg);
  build_finetune_dataset(ds, src.path(), b.path(), cfg);
  out.expect(ra.patch_count == 9, fmt::format("{} patches instead of 9", ra.patch_count));

  bool contained = true;
  for (const auto& ann : ra.dataset.annotations) {
    const auto* rec = ra.dataset.find_image(ann.image_id);
    contained = contained && rec != nullptr &&
                BBox(0, 0, rec->width, rec->height).contains(ann.bbox);
  }
  out.expect(contained, "an output box leaves its image");

  bool conserved = true;
  for (const auto& s : compute_slice_grid(1024, 1024, GridSpec{512, 512, 0.25})) {
    std::size_t overlapping = 0;
    std::size_t inside = 0;
    for (const auto& ann : ds.annotations) {
      if (ann.bbox.intersect(s.rect)) ++overlapping;
      if (s.rect.contains(ann.bbox)) ++inside;
    }
    conserved = conserved && clip_annotations(ds.annotations, s, 0.0).size() == overlapping &&
                clip_annotations(ds.annotations, s, 1.0).size() == inside;
  }
  out.expect(conserved, "conservation at min_area_ratio 0 or 1 fails");
  out.expect(same_tree(a.path(), b.path()), "two runs with the same seed differ");
  out.note(fmt::format("9 patches + original, {} annotations, containment, conservation, "
                       "byte-identical reruns",
                       ra.dataset.annotations.size()));
  return out;
}

std::optional<double> ap_of(const BenchmarkReport& r, const std::string& label,
                            std::optional<double> EvalResult::*field) {
  for (const auto& run : r.runs) {
    if (run.label == label) return run.result.*field;
  }
  return std::nullopt;
}

std::string fmt_ap(std::optional<double> v) { return v ? fmt::format("{:.3f}", *v) : "-"; }

Outcome synthetic_benchmark() {
  Outcome out;
  ScratchDir dir("bench");
  const auto t0 = Clock::now();
  const auto vis = default_bench_visibility();
  const auto configs = default_bench_configs();

  const auto def = run_benchmark(scene_preset("default"), configs, vis, dir.path() / "default");
  const auto fi_s = ap_of(def, "FI", &EvalResult::ap50_small);
  const auto po_s = ap_of(def, "SAHI+PO", &EvalResult::ap50_small);
  const auto fi = ap_of(def, "FI", &EvalResult::ap50);
  const auto po = ap_of(def, "SAHI+PO", &EvalResult::ap50);
  out.expect(po_s && *po_s >= 0.90, "AP50s(SAHI+PO) = " + fmt_ap(po_s) + " < 0.90");
  out.expect(fi_s && *fi_s <= 0.05, "AP50s(FI) = " + fmt_ap(fi_s) + " > 0.05");
  out.expect(po && fi && *po - *fi >= 0.5, "AP50(SAHI+PO) - AP50(FI) < 0.5");

  // FI on top of slicing, with and without overlap.
  std::vector<LabeledConfig> large_cfgs;
  for (const auto& lc : configs) {
    if (lc.label == "SAHI" || lc.label == "SAHI+PO" || lc.label == "SAHI+FI+PO") {
      large_cfgs.push_back(lc);
    }
  }
  auto sahi_fi = large_cfgs.front();
  sahi_fi.label = "SAHI+FI";
  sahi_fi.config.full_inference = true;
  large_cfgs.push_back(sahi_fi);
  auto large_scene = scene_preset("large");
  large_scene.write_images = false;
  const auto lg = run_benchmark(large_scene, large_cfgs, vis, dir.path() / "large");
  const auto l_sahi = ap_of(lg, "SAHI", &EvalResult::ap50_large);
  const auto l_sahi_fi = ap_of(lg, "SAHI+FI", &EvalResult::ap50_large);
  const auto l_po = ap_of(lg, "SAHI+PO", &EvalResult::ap50_large);
  const auto l_po_fi = ap_of(lg, "SAHI+FI+PO", &EvalResult::ap50_large);
  out.expect(l_sahi && l_sahi_fi && *l_sahi_fi >= *l_sahi,
             "AP50l(SAHI+FI) = " + fmt_ap(l_sahi_fi) + " < AP50l(SAHI) = " + fmt_ap(l_sahi));
  out.expect(l_po && l_po_fi && *l_po_fi >= *l_po,
             "AP50l(SAHI+FI+PO) = " + fmt_ap(l_po_fi) + " < AP50l(SAHI+PO) = " + fmt_ap(l_po));

  auto seam_scene = scene_preset("seam");
  seam_scene.write_images = false;
  const std::vector<LabeledConfig> seam_cfgs{configs[1], configs[2]};
  const auto sm = run_benchmark(seam_scene, seam_cfgs, vis, dir.path() / "seam");
  const auto s0 = ap_of(sm, "SAHI", &EvalResult::ap50_small);
  const auto s25 = ap_of(sm, "SAHI+PO", &EvalResult::ap50_small);
  out.expect(s0 && s25 && *s25 >= *s0,
             "seam scene AP50s overlap 25% = " + fmt_ap(s25) + " < overlap 0% = " + fmt_ap(s0));

  const double secs = seconds_since(t0);
  out.expect(secs < 300.0, fmt::format("benchmark took {:.1f} s (limit 300 s)", secs));
  out.note(fmt::format("default: AP50s SAHI+PO {} vs FI {}, AP50 {} vs {}; large: AP50l SAHI+FI {} "
                       "vs SAHI {}; seam: AP50s ov25 {} vs ov0 {}; {:.1f} s",
                       fmt_ap(po_s), fmt_ap(fi_s), fmt_ap(po), fmt_ap(fi), fmt_ap(l_sahi_fi),
                       fmt_ap(l_sahi), fmt_ap(s25), fmt_ap(s0), secs));
  return out;
}

Outcome order_invariance() {
  Outcome out;
  ScratchDir dir("order");
  auto scene = scene_preset("large");
  scene.n_images = 20;
  scene.write_images = false;
  const auto data = generate_scene_dataset(scene, dir.path() / "scene");
  auto vis = default_bench_visibility();
  OracleDetector oracle(GroundTruthIndex(data.dataset), vis);
  auto base = default_bench_configs().back().config;  // SAHI+FI+PO

  struct Variant {
    int parallelism;
    std::optional<std::uint64_t> order;
  };
  const std::vector<Variant> variants{{1, std::nullopt}, {8, std::nullopt}, {1, 1}, {8, 2}, {3, 99}};
  std::string reference_bytes;
  int differing = 0;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    auto cfg = base;
    cfg.parallelism = variants[i].parallelism;
    cfg.patch_order_seed = variants[i].order;
    const auto path = dir.path() / fmt::format("preds_{}.json", i);
    run_dataset_inference(data.dataset, data.image_root, cfg, oracle, path,
                          dir.path() / fmt::format("report_{}.json", i));
    const auto bytes = slurp(path);
    if (i == 0) {
      reference_bytes = bytes;
    } else if (bytes != reference_bytes) {
      ++differing;
    }
  }
  out.expect(differing == 0, fmt::format("{} variants differ from the serial run", differing));
  out.expect(reference_bytes.size() > 100, "prediction file unexpectedly empty");
  out.note(fmt::format("{} variants (parallelism 1/3/8, shuffled orders) byte-identical, {} bytes",
                       variants.size(), reference_bytes.size()));
  return out;
}

Outcome external_conformance() {
  Outcome out;
  int protocol_errors = 0;
  int answered = 0;
  ExternalStats stats;
  try {
    ExternalDetector ext({std::string("python3 -u ") + SLICEKIT_ECHO_DETECTOR + " --oob-every 10",
                          2, std::chrono::seconds(30)});
    for (int i = 1; i <= 100; ++i) {
      DetectRequest req{1, fs::path("scene.png"),
                        BBox(8.0 * i, 0, 8.0 * i + 256, 192), 512, i};
      try {
        const auto dets = ext.detect(req);
        const bool inside = dets.size() == 1 && dets[0].bbox.x_max() <= 512 &&
                            dets[0].bbox.y_max() <= 384;
        if (inside) ++answered;
      } catch (const ProtocolError&) {
        ++protocol_errors;
      }
    }
    stats = ext.stats();
  } catch (const Error& e) {
    out.expect(false, std::string("handshake failed: ") + e.what());
    return out;
  }
  out.expect(protocol_errors == 0, fmt::format("{} protocol errors", protocol_errors));
  out.expect(answered == 100, fmt::format("{} of 100 requests answered in bounds", answered));
  out.expect(stats.clamped_boxes == 10,
             fmt::format("{} boxes clamped, expected 10", stats.clamped_boxes));
  out.note(fmt::format("handshake ok, {} requests, {} out-of-bounds boxes clamped, 0 protocol errors",
                       stats.requests, stats.clamped_boxes));
  return out;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"grid coverage fuzz", grid_coverage_fuzz},
      {"remap round trip", remap_round_trip},
      {"NMS reference equivalence", nms_equivalence},
      {"evaluator correctness", evaluator_correctness},
      {"dataset slicer", dataset_slicer_checks},
      {"synthetic benchmark", synthetic_benchmark},
      {"pipeline order invariance", order_invariance},
      {"external backend conformance", external_conformance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    fmt::print("criterion {} [{}] {}: {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
               o.detail());
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
