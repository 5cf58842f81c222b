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

#include "fastmap/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace fastmap {

namespace {

// Descending score, ties toward lower (row, col, class) for determinism.
bool candidate_order(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.cell.row != b.cell.row) return a.cell.row < b.cell.row;
  if (a.cell.col != b.cell.col) return a.cell.col < b.cell.col;
  return static_cast<int>(a.cls) < static_cast<int>(b.cls);
}

}  // namespace

std::vector<Candidate> threshold_candidates(const Heatmap& hm, double tau,
                                            const BevGridSpec& spec) {
  if (tau <= 0.0 || tau >= 1.0) throw Error("threshold_candidates: tau must be in (0,1)");
  if (hm.h != spec.h || hm.w != spec.w)
    throw ShapeError("threshold_candidates: heatmap does not match grid spec");
  if (hm.channels > kNumClasses)
    throw ShapeError("threshold_candidates: heatmap has more channels than map classes");

  const Point2 center = spec.range.center();
  std::vector<Candidate> out;
  for (int c = 0; c < hm.channels; ++c) {
    for (int r = 0; r < hm.h; ++r) {
      for (int col = 0; col < hm.w; ++col) {
        const double v = hm.at(c, r, col);
        if (v >= tau) {
          const Point2 p = grid_to_world({r, col}, spec);
          out.push_back({{r, col}, static_cast<MapClass>(c), v, l2_dist(p, center)});
        }
      }
    }
  }
  return out;
}

std::array<int, 3> csm_quotas(int total) {
  // Outer radii are R/3, 2R/3, R, so the quota weights are 1:2:3.
  const int q1 = static_cast<int>(std::lround(total * 1.0 / 6.0));
  const int q2 = static_cast<int>(std::lround(total * 2.0 / 6.0));
  return {q1, q2, total - q1 - q2};
}

int csm_ring(double radial_distance, double max_radius) {
  if (max_radius <= 0.0) return 0;
  if (radial_distance <= max_radius / 3.0) return 0;
  if (radial_distance <= 2.0 * max_radius / 3.0) return 1;
  return 2;
}

double max_cell_radius(const BevGridSpec& spec) {
  const Point2 center = spec.range.center();
  double r = 0.0;
  for (int row : {0, spec.h - 1})
    for (int col : {0, spec.w - 1})
      r = std::max(r, l2_dist(grid_to_world({row, col}, spec), center));
  return r;
}

std::vector<Candidate> csm_sample(const std::vector<Candidate>& cands, int M,
                                  const BevGridSpec& spec) {
  if (M < 3) throw Error("csm_sample: M must be >= 3");

  const double R = max_cell_radius(spec);
  std::array<std::vector<Candidate>, 3> rings;
  for (const Candidate& c : cands) rings[csm_ring(c.radial_distance, R)].push_back(c);
  for (auto& ring : rings) std::sort(ring.begin(), ring.end(), candidate_order);

  const std::array<int, 3> quotas = csm_quotas(M);

  std::vector<Candidate> selected;
  selected.reserve(M);
  std::vector<Candidate> unused;
  for (int i = 0; i < 3; ++i) {
    const int take = std::min<int>(quotas[i], static_cast<int>(rings[i].size()));
    selected.insert(selected.end(), rings[i].begin(), rings[i].begin() + take);
    unused.insert(unused.end(), rings[i].begin() + take, rings[i].end());
  }

  // Spill the best unused candidates into short rings, then pad with
  // zero-score placeholders at the BEV center; CGCA needs a fixed M.
  if (static_cast<int>(selected.size()) < M) {
    std::sort(unused.begin(), unused.end(), candidate_order);
    const int need = M - static_cast<int>(selected.size());
    const int take = std::min<int>(need, static_cast<int>(unused.size()));
    selected.insert(selected.end(), unused.begin(), unused.begin() + take);
  }
  if (static_cast<int>(selected.size()) < M) {
    const Point2 center = spec.range.center();
    const GridCell center_cell = world_to_grid(center, spec);
    const double center_radius = l2_dist(grid_to_world(center_cell, spec), center);
    const Candidate placeholder{center_cell, MapClass::Divider, 0.0, center_radius};
    selected.resize(M, placeholder);
  }
  return selected;
}

SampledPriors gather_priors(const DenseArray& bev, const std::vector<Candidate>& selected,
                            const BevGridSpec& spec) {
  if (bev.rank() != 3) throw ShapeError("gather_priors: BEV array must be C x H x W");
  if (bev.dim(1) != spec.h || bev.dim(2) != spec.w)
    throw ShapeError("gather_priors: BEV array does not match grid spec");

  const int c_feat = bev.dim(0);
  const int m = static_cast<int>(selected.size());
  SampledPriors priors;
  priors.p_sam = DenseArray({m, 2});
  priors.f_sam = DenseArray({m, c_feat});
  priors.cls.reserve(m);
  priors.cells.reserve(m);

  for (int k = 0; k < m; ++k) {
    const GridCell cell = selected[k].cell;
    if (cell.row < 0 || cell.row >= spec.h || cell.col < 0 || cell.col >= spec.w)
      throw IndexError("gather_priors: candidate cell out of bounds");
    const Point2 p = grid_to_world(cell, spec);
    priors.p_sam.at2(k, 0) = (p.x - spec.range.x_min) / spec.range.x_extent();
    priors.p_sam.at2(k, 1) = (p.y - spec.range.y_min) / spec.range.y_extent();
    for (int f = 0; f < c_feat; ++f) priors.f_sam.at2(k, f) = bev.at3(f, cell.row, cell.col);
    priors.cls.push_back(selected[k].cls);
    priors.cells.push_back(cell);
  }
  return priors;
}

}  // namespace fastmap
