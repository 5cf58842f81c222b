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

#include <vector>

#include "fastmap/geometry.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap {

struct MatchedPair {
  int pred = 0;
  int gt = 0;
  int perm = 0;        // index into point_permutations(gt)
  double cost = 0.0;   // class penalty + permutation-minimal mean L1
};

struct Assignment {
  std::vector<MatchedPair> pairs;  // sorted by pred index
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_gts;
};

struct HungarianResult {
  /// pred_to_gt[i] = matched gt index, or -1.
  std::vector<int> pred_to_gt;
  double total_cost = 0.0;
};

/// Minimum-cost one-to-one assignment of size min(rows, cols) for a dense
/// rows x cols cost matrix (row-major). O(n^2 m) shortest-augmenting-path
/// with potentials; deterministic.
HungarianResult hungarian(const DenseArray& cost);

/// Equivalent point orderings of an instance: {identity, reversal} for open
/// polylines, all m cyclic shifts x {forward, reversed} for closed polygons.
/// Each permutation maps output slot j to source index perm[j].
std::vector<std::vector<int>> point_permutations(const MapInstance& inst);

/// Reorders inst.points by perm (out[j] = points[perm[j]]).
MapInstance apply_permutation(const MapInstance& inst, const std::vector<int>& perm);

/// Pairwise cost = class_weight on class mismatch + min over
/// point_permutations(gt) of the mean L1 point distance, then Hungarian.
/// All instances must share the same point count m.
Assignment match_instances(const PredictionSet& preds, const Scene& gts,
                           double class_weight = 1.0);

}  // namespace fastmap
