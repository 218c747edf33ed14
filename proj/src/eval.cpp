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
#include "slicekit/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "json.hpp"
#include "slicekit/coco_io.hpp"
#include "slicekit/error.hpp"

namespace slicekit {

using nlohmann::json;

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError(
        fmt::format("iou threshold must be in (0, 1], got {}", iou_threshold));
  }
  if (max_detections < 1) {
    throw ValidationError(
        fmt::format("max detections must be >= 1, got {}", max_detections));
  }
}

namespace {

constexpr int kRecallPoints = 101;

// Matches numpy.linspace(0, 1, 101).
const std::array<double, kRecallPoints>& recall_thresholds() {
  static const auto thresholds = [] {
    std::array<double, kRecallPoints> t{};
    const double step = 1.0 / (kRecallPoints - 1);
    for (int i = 0; i < kRecallPoints; ++i) t[i] = i * step;
    t[kRecallPoints - 1] = 1.0;
    return t;
  }();
  return thresholds;
}

struct GtBox {
  BBox bbox;
  double area;
  bool crowd;
};

struct PredBox {
  BBox bbox;
  double score;
};

// Outcome of matching one (image, category) cell for one area range.
struct CellResult {
  std::vector<double> scores;
  std::vector<char> matched;
  std::vector<char> ignored;
  long positives = 0;  // non-ignored ground truth
  long gt_matched = 0;
};

CellResult match_cell(const std::vector<GtBox>& gts,
                      const std::vector<PredBox>& preds, const AreaRange& range,
                      double threshold) {
  CellResult out;
  // Non-ignored ground truth first, original order otherwise.
  std::vector<std::size_t> g_order(gts.size());
  std::iota(g_order.begin(), g_order.end(), std::size_t{0});
  std::vector<char> g_ignore(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    g_ignore[i] = gts[i].crowd || !range.contains(gts[i].area);
  }
  std::stable_sort(g_order.begin(), g_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return g_ignore[a] < g_ignore[b];
                   });
  for (std::size_t i = 0; i < gts.size(); ++i) out.positives += !g_ignore[i];

  std::vector<char> g_taken(gts.size(), 0);
  const double start = std::min(threshold, 1.0 - 1e-10);
  for (const auto& p : preds) {
    double best = start;
    long m = -1;
    for (std::size_t gi : g_order) {
      if (g_taken[gi] && !gts[gi].crowd) continue;
      if (m > -1 && !g_ignore[static_cast<std::size_t>(m)] && g_ignore[gi]) break;
      double overlap;
      if (gts[gi].crowd) {
        overlap = intersection_area(p.bbox, gts[gi].bbox) / p.bbox.area();
      } else {
        overlap = iou(p.bbox, gts[gi].bbox);
      }
      if (overlap < best) continue;
      best = overlap;
      m = static_cast<long>(gi);
    }
    bool ignored = false;
    bool matched = false;
    if (m > -1) {
      const auto gi = static_cast<std::size_t>(m);
      g_taken[gi] = 1;
      matched = true;
      ignored = g_ignore[gi];
      if (!ignored) ++out.gt_matched;
    } else {
      ignored = !range.contains(p.bbox.area());
    }
    out.scores.push_back(p.score);
    out.matched.push_back(matched);
    out.ignored.push_back(ignored);
  }
  return out;
}

// 101-point interpolated AP over the concatenated cells of one category.
std::optional<double> category_ap(const std::vector<const CellResult*>& cells) {
  long positives = 0;
  std::vector<double> scores;
  std::vector<char> tp;
  std::vector<char> ignored;
  for (const auto* c : cells) {
    positives += c->positives;
    scores.insert(scores.end(), c->scores.begin(), c->scores.end());
    tp.insert(tp.end(), c->matched.begin(), c->matched.end());
    ignored.insert(ignored.end(), c->ignored.begin(), c->ignored.end());
  }
  if (positives == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  std::vector<double> recall;
  std::vector<double> precision;
  double tps = 0.0;
  double fps = 0.0;
  for (std::size_t k : order) {
    if (ignored[k]) continue;
    if (tp[k]) {
      tps += 1.0;
    } else {
      fps += 1.0;
    }
    recall.push_back(tps / static_cast<double>(positives));
    precision.push_back(tps / (tps + fps));
  }
  for (std::size_t i = precision.size(); i > 1; --i) {
    precision[i - 2] = std::max(precision[i - 2], precision[i - 1]);
  }
  double sum = 0.0;
  for (double r : recall_thresholds()) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it == recall.end()) break;
    sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

std::optional<double> mean_of_present(const std::vector<std::optional<double>>& v) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

EvalResult evaluate(const CocoDataset& gt,
                    const std::vector<ImageDetection>& predictions,
                    const EvalConfig& config) {
  config.validate();
  check_results_against(gt, predictions);

  std::vector<ImageId> image_ids;
  for (const auto& img : gt.images) image_ids.push_back(img.id);
  std::sort(image_ids.begin(), image_ids.end());
  std::vector<CategoryId> cat_ids;
  for (const auto& c : gt.categories) cat_ids.push_back(c.id);
  std::sort(cat_ids.begin(), cat_ids.end());

  std::unordered_map<ImageId, std::size_t> image_index;
  for (std::size_t i = 0; i < image_ids.size(); ++i) image_index[image_ids[i]] = i;
  std::unordered_map<CategoryId, std::size_t> cat_index;
  for (std::size_t i = 0; i < cat_ids.size(); ++i) cat_index[cat_ids[i]] = i;

  const std::size_t n_img = image_ids.size();
  const std::size_t n_cat = cat_ids.size();
  std::vector<std::vector<GtBox>> gt_cells(n_img * n_cat);
  for (const auto& a : gt.annotations) {
    gt_cells[image_index.at(a.image_id) * n_cat + cat_index.at(a.category_id)]
        .push_back(GtBox{a.bbox, a.area, a.iscrowd});
  }

  // Per image: keep the top max_detections by score across categories.
  std::vector<std::vector<const Detection*>> per_image(n_img);
  for (const auto& p : predictions) {
    per_image[image_index.at(p.image_id)].push_back(&p.detection);
  }
  std::vector<std::vector<PredBox>> pred_cells(n_img * n_cat);
  for (std::size_t i = 0; i < n_img; ++i) {
    auto& dets = per_image[i];
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection* a, const Detection* b) {
                       return a->score > b->score;
                     });
    if (dets.size() > static_cast<std::size_t>(config.max_detections)) {
      dets.resize(static_cast<std::size_t>(config.max_detections));
    }
    for (const auto* d : dets) {
      pred_cells[i * n_cat + cat_index.at(d->category_id)].push_back(
          PredBox{d->bbox, d->score});
    }
  }

  const AreaRange all{};
  const std::array<const AreaRange*, 4> ranges{&all, &config.small,
                                               &config.medium, &config.large};
  std::array<std::vector<std::optional<double>>, 4> ap_by_range;
  EvalResult result;

  for (std::size_t r = 0; r < ranges.size(); ++r) {
    std::vector<CellResult> cells(n_img * n_cat);
    for (std::size_t i = 0; i < n_img; ++i) {
      for (std::size_t c = 0; c < n_cat; ++c) {
        const std::size_t k = i * n_cat + c;
        if (gt_cells[k].empty() && pred_cells[k].empty()) continue;
        cells[k] = match_cell(gt_cells[k], pred_cells[k], *ranges[r],
                              config.iou_threshold);
      }
    }
    for (std::size_t c = 0; c < n_cat; ++c) {
      std::vector<const CellResult*> column;
      for (std::size_t i = 0; i < n_img; ++i) column.push_back(&cells[i * n_cat + c]);
      ap_by_range[r].push_back(category_ap(column));
    }
    if (r == 0) {
      for (const auto& cell : cells) {
        result.counts.gt_matched += cell.gt_matched;
        result.counts.gt_missed += cell.positives - cell.gt_matched;
        for (std::size_t d = 0; d < cell.scores.size(); ++d) {
          if (cell.ignored[d]) continue;
          if (cell.matched[d]) {
            ++result.counts.pred_true_positive;
          } else {
            ++result.counts.pred_false_positive;
          }
        }
      }
      for (std::size_t c = 0; c < n_cat; ++c) {
        result.per_category_ap[cat_ids[c]] = ap_by_range[0][c];
      }
    }
  }
  result.ap50 = mean_of_present(ap_by_range[0]);
  result.ap50_small = mean_of_present(ap_by_range[1]);
  result.ap50_medium = mean_of_present(ap_by_range[2]);
  result.ap50_large = mean_of_present(ap_by_range[3]);
  return result;
}

std::string EvalResult::to_json() const {
  json j;
  j["ap50"] = optional_json(ap50);
  j["ap50_small"] = optional_json(ap50_small);
  j["ap50_medium"] = optional_json(ap50_medium);
  j["ap50_large"] = optional_json(ap50_large);
  json per_cat = json::object();
  for (const auto& [id, ap] : per_category_ap) {
    per_cat[std::to_string(id)] = optional_json(ap);
  }
  j["per_category_ap"] = per_cat;
  j["counts"] = {{"gt_matched", counts.gt_matched},
                 {"gt_missed", counts.gt_missed},
                 {"pred_true_positive", counts.pred_true_positive},
                 {"pred_false_positive", counts.pred_false_positive}};
  return j.dump(2) + "\n";
}

EvalResult EvalResult::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("eval result: malformed JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ParseError("eval result must be a JSON object");
  EvalResult r;
  try {
    r.ap50 = optional_from(j, "ap50");
    r.ap50_small = optional_from(j, "ap50_small");
    r.ap50_medium = optional_from(j, "ap50_medium");
    r.ap50_large = optional_from(j, "ap50_large");
    if (j.contains("per_category_ap")) {
      for (const auto& [k, v] : j["per_category_ap"].items()) {
        r.per_category_ap[std::stoll(k)] =
            v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      }
    }
    if (j.contains("counts")) {
      const auto& c = j["counts"];
      r.counts.gt_matched = c.value("gt_matched", 0L);
      r.counts.gt_missed = c.value("gt_missed", 0L);
      r.counts.pred_true_positive = c.value("pred_true_positive", 0L);
      r.counts.pred_false_positive = c.value("pred_false_positive", 0L);
    }
  } catch (const std::exception& e) {
    throw ParseError(fmt::format("eval result: {}", e.what()));
  }
  return r;
}

namespace {

using Metric = std::optional<double> EvalResult::*;
constexpr std::array<std::pair<const char*, Metric>, 4> kMetrics{{
    {"AP50", &EvalResult::ap50},
    {"AP50s", &EvalResult::ap50_small},
    {"AP50m", &EvalResult::ap50_medium},
    {"AP50l", &EvalResult::ap50_large},
}};

std::string cell(const std::optional<double>& v) {
  return v ? format_fixed(*v, 3) : "-";
}

std::string delta_cell(const std::optional<double>& v,
                       const std::optional<double>& base) {
  if (!v || !base) return "-";
  const double d = *v - *base;
  const std::string mag = format_fixed(std::fabs(d), 3);
  const bool zero = mag.find_first_not_of("0.") == std::string::npos;
  return (d < 0.0 && !zero ? "-" : "+") + mag;
}

std::vector<std::vector<std::string>> table_rows(
    const std::vector<std::pair<std::string, EvalResult>>& runs) {
  const bool deltas = runs.size() > 1;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"config"};
  for (const auto& [name, m] : kMetrics) header.emplace_back(name);
  if (deltas) {
    for (const auto& [name, m] : kMetrics) header.push_back(std::string("d") + name);
  }
  rows.push_back(header);
  for (const auto& [label, res] : runs) {
    std::vector<std::string> row{label};
    for (const auto& [name, m] : kMetrics) row.push_back(cell(res.*m));
    if (deltas) {
      for (const auto& [name, m] : kMetrics) {
        row.push_back(delta_cell(res.*m, runs.front().second.*m));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string compare_runs_table(
    const std::vector<std::pair<std::string, EvalResult>>& runs) {
  if (runs.empty()) throw ValidationError("compare needs at least one run");
  const auto rows = table_rows(runs);
  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i == 0) {
        line += fmt::format("{:<{}}", rows[r][i], widths[i]);
      } else {
        line += fmt::format("  {:>{}}", rows[r][i], widths[i]);
      }
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

std::string compare_runs_csv(
    const std::vector<std::pair<std::string, EvalResult>>& runs) {
  if (runs.empty()) throw ValidationError("compare needs at least one run");
  std::string out;
  for (const auto& row : table_rows(runs)) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ",";
      out += row[i] == "-" ? "" : row[i];
    }
    out += "\n";
  }
  return out;
}

}  // namespace slicekit
