// Copyright 2026 The FastMap Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fastmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fastmap {

namespace {

constexpr int kInterpPoints = 101;

// Prediction order for greedy matching: descending score, ties toward the
// lower index.
std::vector<int> score_order(const PredictionSet& preds, const std::vector<int>& subset) {
  std::vector<int> order = subset;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds.instances[a].score > preds.instances[b].score;
  });
  return order;
}

double interpolated_ap(const std::vector<bool>& tp_in_rank_order, int gt_count) {
  if (gt_count == 0) return 0.0;
  std::vector<double> precision, recall;
  int tp = 0;
  for (std::size_t k = 0; k < tp_in_rank_order.size(); ++k) {
    if (tp_in_rank_order[k]) ++tp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    recall.push_back(static_cast<double>(tp) / gt_count);
  }
  // Right-to-left running max gives the interpolated precision envelope.
  std::vector<double> envelope(precision.size());
  double run = 0.0;
  for (std::size_t k = precision.size(); k-- > 0;) {
    run = std::max(run, precision[k]);
    envelope[k] = run;
  }
  double ap = 0.0;
  for (int i = 0; i < kInterpPoints; ++i) {
    const double r = static_cast<double>(i) / (kInterpPoints - 1);
    double best = 0.0;
    for (std::size_t k = 0; k < recall.size(); ++k) {
      if (recall[k] >= r - 1e-12) {
        best = envelope[k];
        break;
      }
    }
    ap += best;
  }
  return ap / kInterpPoints;
}

}  // namespace

double chamfer_distance(const MapInstance& a, const MapInstance& b, int densify) {
  if (densify < 2) throw Error("chamfer_distance: densify must be >= 2");
  const MapInstance da = resample_polyline(a, densify);
  const MapInstance db = resample_polyline(b, densify);

  const auto directed = [](const MapInstance& from, const MapInstance& to) {
    double sum = 0.0;
    for (const Point2& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point2& q : to.points) best = std::min(best, l2_dist(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.points.size());
  };
  return (directed(da, db) + directed(db, da)) / 2.0;
}

std::vector<int> greedy_chamfer_match(const PredictionSet& preds, const Scene& gts,
                                      double threshold, int densify) {
  std::vector<int> match(preds.instances.size(), -1);
  std::vector<bool> gt_taken(gts.instances.size(), false);

  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<int> pred_idx, gt_idx;
    for (std::size_t i = 0; i < preds.instances.size(); ++i)
      if (static_cast<int>(preds.instances[i].instance.cls) == c)
        pred_idx.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < gts.instances.size(); ++j)
      if (static_cast<int>(gts.instances[j].cls) == c) gt_idx.push_back(static_cast<int>(j));
    if (pred_idx.empty() || gt_idx.empty()) continue;

    for (int i : score_order(preds, pred_idx)) {
      double best = std::numeric_limits<double>::infinity();
      int best_j = -1;
      for (int j : gt_idx) {
        if (gt_taken[j]) continue;
        const double d = chamfer_distance(preds.instances[i].instance, gts.instances[j], densify);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      if (best_j >= 0 && best < threshold) {
        match[i] = best_j;
        gt_taken[best_j] = true;
      }
    }
  }
  return match;
}

ApReport average_precision(const PredictionSet& preds, const Scene& gts,
                           const std::vector<double>& thresholds, int densify,
                           const std::string& set_id) {
  ApReport report;
  report.set_id = set_id;
  report.thresholds = thresholds;

  int present = 0;
  double map_sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<int> pred_idx, gt_idx;
    for (std::size_t i = 0; i < preds.instances.size(); ++i)
      if (static_cast<int>(preds.instances[i].instance.cls) == c)
        pred_idx.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < gts.instances.size(); ++j)
      if (static_cast<int>(gts.instances[j].cls) == c) gt_idx.push_back(static_cast<int>(j));

    report.class_present[c] = !gt_idx.empty();
    if (gt_idx.empty()) continue;

    const std::vector<int> order = score_order(preds, pred_idx);
    // Chamfer matrix in rank order, shared across thresholds.
    std::vector<std::vector<double>> dist(order.size(), std::vector<double>(gt_idx.size()));
    for (std::size_t a = 0; a < order.size(); ++a)
      for (std::size_t b = 0; b < gt_idx.size(); ++b)
        dist[a][b] =
            chamfer_distance(preds.instances[order[a]].instance, gts.instances[gt_idx[b]], densify);

    double class_sum = 0.0;
    for (double t : thresholds) {
      std::vector<bool> taken(gt_idx.size(), false);
      std::vector<bool> tp(order.size(), false);
      for (std::size_t a = 0; a < order.size(); ++a) {
        double best = std::numeric_limits<double>::infinity();
        int best_b = -1;
        for (std::size_t b = 0; b < gt_idx.size(); ++b) {
          if (!taken[b] && dist[a][b] < best) {
            best = dist[a][b];
            best_b = static_cast<int>(b);
          }
        }
        if (best_b >= 0 && best < t) {
          tp[a] = true;
          taken[best_b] = true;
        }
      }
      const double ap = interpolated_ap(tp, static_cast<int>(gt_idx.size()));
      report.ap_per_threshold[c].push_back(ap);
      class_sum += ap;
    }
    report.ap[c] = thresholds.empty() ? 0.0 : class_sum / thresholds.size();
    map_sum += report.ap[c];
    ++present;
  }
  report.map = present > 0 ? map_sum / present : 0.0;
  return report;
}

std::vector<PrPoint> pr_curve(const PredictionSet& preds, const Scene& gts, MapClass cls,
                              double threshold, int densify) {
  std::vector<int> pred_idx, gt_idx;
  for (std::size_t i = 0; i < preds.instances.size(); ++i)
    if (preds.instances[i].instance.cls == cls) pred_idx.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < gts.instances.size(); ++j)
    if (gts.instances[j].cls == cls) gt_idx.push_back(static_cast<int>(j));

  std::vector<PrPoint> points;
  if (gt_idx.empty()) return points;
  std::vector<bool> taken(gt_idx.size(), false);
  int tp = 0, rank = 0;
  for (int i : score_order(preds, pred_idx)) {
    double best = std::numeric_limits<double>::infinity();
    int best_b = -1;
    for (std::size_t b = 0; b < gt_idx.size(); ++b) {
      if (taken[b]) continue;
      const double d = chamfer_distance(preds.instances[i].instance, gts.instances[gt_idx[b]],
                                        densify);
      if (d < best) {
        best = d;
        best_b = static_cast<int>(b);
      }
    }
    PrPoint point;
    point.rank = ++rank;
    point.score = preds.instances[i].score;
    if (best_b >= 0 && best < threshold) {
      point.tp = true;
      taken[best_b] = true;
      ++tp;
    }
    point.precision = static_cast<double>(tp) / rank;
    point.recall = static_cast<double>(tp) / static_cast<double>(gt_idx.size());
    points.push_back(point);
  }
  return points;
}

std::vector<MatchedInstancePair> positive_samples(const PredictionSet& preds, const Scene& gts,
                                                  double threshold, int densify) {
  const std::vector<int> match = greedy_chamfer_match(preds, gts, threshold, densify);
  std::vector<MatchedInstancePair> pairs;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (match[i] < 0) continue;
    const MapInstance& pred = preds.instances[i].instance;
    MapInstance gt = gts.instances[match[i]];
    if (gt.num_points() != pred.num_points()) gt = resample_polyline(gt, pred.num_points());
    pairs.push_back({pred, gt});
  }
  return pairs;
}

double turn_angle(const MapInstance& inst, int j) {
  if (j < 1 || j > inst.num_points() - 2) throw IndexError("turn_angle: not an interior vertex");
  const Point2 a = inst.points[j] - inst.points[j - 1];
  const Point2 b = inst.points[j + 1] - inst.points[j];
  const double na = std::hypot(a.x, a.y), nb = std::hypot(b.x, b.y);
  if (na <= 1e-12 || nb <= 1e-12)
    throw DegenerateGeometryError("turn_angle: zero-length segment");
  const double c = std::clamp((a.x * b.x + a.y * b.y) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

double acd(std::span<const MatchedInstancePair> pairs, int densify) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& pair : pairs) sum += chamfer_distance(pair.pred, pair.gt, densify);
  return sum / static_cast<double>(pairs.size());
}

double ard(std::span<const MatchedInstancePair> pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const int m = pair.pred.num_points();
    for (int j = 1; j <= m - 2; ++j)
      sum += std::abs(turn_angle(pair.pred, j) - turn_angle(pair.gt, j));
  }
  return sum / static_cast<double>(pairs.size());
}

double ajp(std::span<const MatchedInstancePair> pairs) {
  if (pairs.empty()) return 0.0;
  constexpr double kPredThreshold = 30.0 * std::numbers::pi / 180.0;
  constexpr double kGtThreshold = 5.0 * std::numbers::pi / 180.0;
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const int m = pair.pred.num_points();
    int count = 0;
    for (int j = 1; j <= m - 2; ++j)
      if (turn_angle(pair.pred, j) > kPredThreshold && turn_angle(pair.gt, j) < kGtThreshold)
        ++count;
    sum += count;
  }
  return sum / static_cast<double>(pairs.size());
}

DiagnosticsReport diagnostics(const PredictionSet& preds, const Scene& gts,
                              double match_threshold, int densify) {
  const std::vector<MatchedInstancePair> pairs =
      positive_samples(preds, gts, match_threshold, densify);
  DiagnosticsReport report;
  report.matched_pairs = static_cast<int>(pairs.size());
  report.acd = acd(pairs, densify);
  report.ard = ard(pairs);
  report.ajp = ajp(pairs);
  return report;
}

}  // namespace fastmap
