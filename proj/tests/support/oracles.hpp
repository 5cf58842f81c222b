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
//
// Independent reference implementations used only to verify the library.
// Everything here is deliberately written the slow, obvious way and must not
// call the code path it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "fastmap/geometry.hpp"
#include "fastmap/rng.hpp"
#include "fastmap/sampler.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap::testing {

// Exhaustive minimum-cost assignment by enumerating all column orderings;
// usable up to ~7x7.
inline double brute_force_assignment_cost(const DenseArray& cost) {
  const int np = cost.dim(0), ng = cost.dim(1);
  std::vector<int> cols(ng);
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (np <= ng) {
    do {
      double total = 0.0;
      for (int i = 0; i < np; ++i) total += cost.at2(i, cols[i]);
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<int> rows(np);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      double total = 0.0;
      for (int j = 0; j < ng; ++j) total += cost.at2(rows[j], j);
      best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

// Arc-length resampling written independently of resample_polyline: walks
// the cumulative-length table with straightforward scanning.
inline std::vector<Point2> oracle_resample(const MapInstance& inst, int m) {
  const int k = inst.num_points();
  const int nseg = inst.closed ? k : k - 1;
  std::vector<double> cum(nseg + 1, 0.0);
  for (int j = 0; j < nseg; ++j)
    cum[j + 1] = cum[j] + l2_dist(inst.points[j], inst.points[(j + 1) % k]);
  const double total = cum[nseg];
  const double step = inst.closed ? total / m : total / (m - 1);

  std::vector<Point2> out;
  for (int i = 0; i < m; ++i) {
    double target = std::min(i * step, total);
    int seg = 0;
    while (seg < nseg - 1 && cum[seg + 1] < target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    const Point2 a = inst.points[seg];
    const Point2 b = inst.points[(seg + 1) % k];
    out.push_back(a + t * (b - a));
  }
  return out;
}

// Symmetric chamfer by exhaustive double loop over independently resampled
// point sets.
inline double oracle_chamfer(const MapInstance& a, const MapInstance& b, int densify) {
  const std::vector<Point2> pa =
      a.num_points() == densify ? a.points : oracle_resample(a, densify);
  const std::vector<Point2> pb =
      b.num_points() == densify ? b.points : oracle_resample(b, densify);
  double sum_ab = 0.0;
  for (const Point2& p : pa) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& q : pb) best = std::min(best, l2_dist(p, q));
    sum_ab += best;
  }
  double sum_ba = 0.0;
  for (const Point2& q : pb) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& p : pa) best = std::min(best, l2_dist(q, p));
    sum_ba += best;
  }
  return (sum_ab / pa.size() + sum_ba / pb.size()) / 2.0;
}

// Cells touched by a segment, decided exactly per cell with a Liang-Barsky
// slab clip against the cell rectangle (a dense-sampling oracle misses
// arbitrarily thin corner slivers).
inline std::set<std::pair<int, int>> oracle_segment_cells(Point2 a, Point2 b,
                                                          const BevGridSpec& spec) {
  const GridCell ca = world_to_grid(a, spec);
  const GridCell cb = world_to_grid(b, spec);
  const int r0 = std::min(ca.row, cb.row), r1 = std::max(ca.row, cb.row);
  const int c0 = std::min(ca.col, cb.col), c1 = std::max(ca.col, cb.col);

  const auto axis_interval = [](double p, double d, double lo, double hi, double& t0,
                                double& t1) {
    if (d == 0.0) return p >= lo && p <= hi;
    double ta = (lo - p) / d, tb = (hi - p) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return true;
  };

  std::set<std::pair<int, int>> cells;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double x_lo = spec.range.x_min + c * spec.resolution;
      const double y_lo = spec.range.y_min + r * spec.resolution;
      double t0 = 0.0, t1 = 1.0;
      if (!axis_interval(a.x, b.x - a.x, x_lo, x_lo + spec.resolution, t0, t1)) continue;
      if (!axis_interval(a.y, b.y - a.y, y_lo, y_lo + spec.resolution, t0, t1)) continue;
      if (t0 <= t1) cells.insert({r, c});
    }
  }
  return cells;
}

// Per-ring CSM selection: independent ring classification, sort, quota.
// Valid when no ring runs short (no spill/padding).
inline std::vector<Candidate> oracle_csm(const std::vector<Candidate>& cands, int M,
                                         const BevGridSpec& spec) {
  Point2 center{(spec.range.x_min + spec.range.x_max) / 2,
                (spec.range.y_min + spec.range.y_max) / 2};
  double R = 0.0;
  for (int r : {0, spec.h - 1})
    for (int c : {0, spec.w - 1})
      R = std::max(R, l2_dist(grid_to_world({r, c}, spec), center));

  std::vector<std::vector<Candidate>> rings(3);
  for (const Candidate& c : cands) {
    int ring = c.radial_distance <= R / 3 ? 0 : (c.radial_distance <= 2 * R / 3 ? 1 : 2);
    rings[ring].push_back(c);
  }
  const auto order = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.cell.row != b.cell.row) return a.cell.row < b.cell.row;
    if (a.cell.col != b.cell.col) return a.cell.col < b.cell.col;
    return static_cast<int>(a.cls) < static_cast<int>(b.cls);
  };
  const int q1 = static_cast<int>(std::lround(M / 6.0));
  const int q2 = static_cast<int>(std::lround(M / 3.0));
  const int quotas[3] = {q1, q2, M - q1 - q2};
  std::vector<Candidate> out;
  for (int i = 0; i < 3; ++i) {
    std::sort(rings[i].begin(), rings[i].end(), order);
    for (int k = 0; k < quotas[i] && k < static_cast<int>(rings[i].size()); ++k)
      out.push_back(rings[i][k]);
  }
  return out;
}

inline double spearman_correlation(std::vector<double> a, std::vector<double> b) {
  const auto ranks = [](std::vector<double>& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(ra.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// Minimal well-formedness scan of an XML document: balanced, properly nested
// tags and nothing after the root closes.
inline bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_closed = false;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (root_closed) return false;
    if (tag[0] == '/') {
      if (stack.empty()) return false;
      const std::string name = tag.substr(1);
      if (stack.back() != name) return false;
      stack.pop_back();
      if (stack.empty()) root_closed = true;
      continue;
    }
    const bool self_closing = tag.back() == '/';
    if (self_closing) tag.pop_back();
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n\r"));
    if (name.empty()) return false;
    if (!self_closing) {
      stack.push_back(name);
    } else if (stack.empty()) {
      return false;  // self-closing root is not expected here
    }
  }
  return stack.empty() && root_closed;
}

// Generic random open polyline with noncoincident points, inside the range.
inline MapInstance random_open_instance(SplitMix64& rng, int m, MapClass cls,
                                        const BevRange& range = {}) {
  MapInstance inst;
  inst.cls = cls;
  inst.closed = false;
  const double margin = 2.0;
  Point2 p{rng.next_uniform(range.x_min + margin, range.x_max - margin),
           rng.next_uniform(range.y_min + margin, range.y_max - margin)};
  inst.points.push_back(p);
  for (int j = 1; j < m; ++j) {
    for (int tries = 0; tries < 64; ++tries) {
      Point2 q{std::clamp(p.x + rng.next_uniform(-4.0, 4.0), range.x_min, range.x_max),
               std::clamp(p.y + rng.next_uniform(-4.0, 4.0), range.y_min, range.y_max)};
      if (l2_dist(p, q) > 0.5) {
        p = q;
        break;
      }
    }
    inst.points.push_back(p);
  }
  return inst;
}

}  // namespace fastmap::testing
