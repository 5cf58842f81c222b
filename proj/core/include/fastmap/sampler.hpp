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
#include <vector>

#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap {

/// A heatmap cell that cleared the confidence threshold, one per
/// (class, cell) pair.
struct Candidate {
  GridCell cell;
  MapClass cls = MapClass::Divider;
  double score = 0.0;
  double radial_distance = 0.0;  // meters from the BEV range center
};

/// The M geometric priors feeding coarse-grained cross-attention.
struct SampledPriors {
  DenseArray p_sam;  // M x 2, normalized (x, y) in [0,1]^2
  DenseArray f_sam;  // M x C_feat, gathered BEV feature rows
  std::vector<MapClass> cls;
  std::vector<GridCell> cells;

  int count() const { return static_cast<int>(cls.size()); }
};

/// One candidate per (class, cell) with value >= tau. tau must be in (0,1).
std::vector<Candidate> threshold_candidates(const Heatmap& hm, double tau,
                                            const BevGridSpec& spec);

/// Quota for ring i (1-based) out of M under the 1:2:3 outer-radius split.
/// Rings 1 and 2 round; ring 3 absorbs the residue.
std::array<int, 3> csm_quotas(int total);

/// Ring index (0..2) for a radial distance given the maximum cell-center
/// radius of the grid.
int csm_ring(double radial_distance, double max_radius);

/// Maximum distance from any cell center to the range center, in meters.
double max_cell_radius(const BevGridSpec& spec);

/// Circular Sampling Method: splits the BEV plane into three concentric
/// rings of equal radial width, fills each ring's quota by descending score
/// (ties by row, col, class), then tops up short rings from the best unused
/// candidates anywhere, and finally with zero-score placeholders at the BEV
/// center, so the output length is always exactly M.
std::vector<Candidate> csm_sample(const std::vector<Candidate>& cands, int M,
                                  const BevGridSpec& spec);

/// Extracts feature rows and normalized cell-center coordinates for the
/// selected candidates from a C_feat x H x W BEV feature array.
SampledPriors gather_priors(const DenseArray& bev, const std::vector<Candidate>& selected,
                            const BevGridSpec& spec);

}  // namespace fastmap
