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

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fastmap/geometry.hpp"

namespace fastmap {

inline const std::vector<double> kStrictThresholds = {0.2, 0.5, 1.0};
inline const std::vector<double> kStandardThresholds = {0.5, 1.0, 1.5};

struct ApReport {
  std::string set_id;               // "strict", "standard" or "custom"
  std::vector<double> thresholds;   // meters
  /// ap_per_threshold[class][threshold index]; valid when class_present.
  std::array<std::vector<double>, kNumClasses> ap_per_threshold;
  std::array<double, kNumClasses> ap{};  // mean over thresholds
  std::array<bool, kNumClasses> class_present{};
  double map = 0.0;  // mean over classes present in the ground truth
};

struct DiagnosticsReport {
  double acd = 0.0;  // meters
  double ard = 0.0;  // radians, summed over interior vertices per pair
  double ajp = 0.0;  // jitter points per instance
  int matched_pairs = 0;
};

/// Symmetric mean nearest-neighbor distance between the two polylines, each
/// first resampled to `densify` points by arc length.
double chamfer_distance(const MapInstance& a, const MapInstance& b, int densify = 100);

/// Greedy chamfer matching per class at threshold t: predictions in
/// descending score order each take the nearest unmatched same-class gt if
/// its chamfer distance is below t. Returns per-pred matched gt index or -1.
std::vector<int> greedy_chamfer_match(const PredictionSet& preds, const Scene& gts,
                                      double threshold, int densify = 100);

/// Chamfer-distance AP with 101-point interpolated precision per class and
/// threshold; per-class AP averages over thresholds, mAP over classes
/// present in the ground truth.
ApReport average_precision(const PredictionSet& preds, const Scene& gts,
                           const std::vector<double>& thresholds, int densify = 100,
                           const std::string& set_id = "custom");

/// One PR point per prediction of the class, in rank (descending score)
/// order under greedy chamfer matching at the given threshold.
struct PrPoint {
  int rank = 0;
  double score = 0.0;
  bool tp = false;
  double precision = 0.0;
  double recall = 0.0;
};

std::vector<PrPoint> pr_curve(const PredictionSet& preds, const Scene& gts, MapClass cls,
                              double threshold, int densify = 100);

/// A matched (pred, gt) pair; gt is resampled to the pred's point count for
/// the vertex-wise angle diagnostics.
struct MatchedInstancePair {
  MapInstance pred;
  MapInstance gt;
};

/// Positive samples for the diagnostics: predictions matched greedily under
/// the given chamfer threshold (use the largest threshold of the active set).
std::vector<MatchedInstancePair> positive_samples(const PredictionSet& preds, const Scene& gts,
                                                  double threshold, int densify = 100);

/// Unsigned turn angle at interior vertex j, in [0, pi].
double turn_angle(const MapInstance& inst, int j);

/// Mean chamfer distance over matched pairs (0 when there are none).
double acd(std::span<const MatchedInstancePair> pairs, int densify = 100);

/// Mean over pairs of the summed |pred turn angle - gt turn angle| over
/// interior vertices.
double ard(std::span<const MatchedInstancePair> pairs);

/// Mean over pairs of the count of interior vertices where the pred turn
/// angle exceeds 30 degrees while the gt turn angle stays below 5 degrees.
double ajp(std::span<const MatchedInstancePair> pairs);

DiagnosticsReport diagnostics(const PredictionSet& preds, const Scene& gts,
                              double match_threshold, int densify = 100);

}  // namespace fastmap
