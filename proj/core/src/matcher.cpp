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

#include "fastmap/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastmap {

namespace {

// Shortest-augmenting-path Hungarian for rows <= cols; returns, for each
// column, the assigned row (-1 if none). Every row ends up matched.
std::vector<int> solve_rows_le_cols(const DenseArray& a) {
  const int n = a.dim(0), m = a.dim(1);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);  // 1-based; p[j] = row matched to col j

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a.at2(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_to_row(m, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) col_to_row[j - 1] = p[j] - 1;
  return col_to_row;
}

}  // namespace

HungarianResult hungarian(const DenseArray& cost) {
  HungarianResult result;
  if (cost.size() == 0) return result;
  if (cost.rank() != 2) throw ShapeError("hungarian: cost must be 2-D");
  if (!cost.all_finite()) throw Error("hungarian: costs must be finite");

  const int np = cost.dim(0), ng = cost.dim(1);
  result.pred_to_gt.assign(np, -1);

  if (np <= ng) {
    const std::vector<int> col_to_row = solve_rows_le_cols(cost);
    for (int j = 0; j < ng; ++j)
      if (col_to_row[j] >= 0) result.pred_to_gt[col_to_row[j]] = j;
  } else {
    DenseArray t({ng, np});
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < ng; ++j) t.at2(j, i) = cost.at2(i, j);
    const std::vector<int> col_to_row = solve_rows_le_cols(t);
    for (int i = 0; i < np; ++i)
      if (col_to_row[i] >= 0) result.pred_to_gt[i] = col_to_row[i];
  }

  for (int i = 0; i < np; ++i)
    if (result.pred_to_gt[i] >= 0) result.total_cost += cost.at2(i, result.pred_to_gt[i]);
  return result;
}

std::vector<std::vector<int>> point_permutations(const MapInstance& inst) {
  const int m = inst.num_points();
  std::vector<std::vector<int>> perms;
  if (!inst.closed) {
    std::vector<int> identity(m), reversed(m);
    for (int j = 0; j < m; ++j) {
      identity[j] = j;
      reversed[j] = m - 1 - j;
    }
    perms.push_back(std::move(identity));
    perms.push_back(std::move(reversed));
    return perms;
  }
  perms.reserve(2 * m);
  for (int shift = 0; shift < m; ++shift) {
    std::vector<int> fwd(m), rev(m);
    for (int j = 0; j < m; ++j) {
      fwd[j] = (shift + j) % m;
      rev[j] = (shift - j + m) % m;
    }
    perms.push_back(std::move(fwd));
    perms.push_back(std::move(rev));
  }
  return perms;
}

MapInstance apply_permutation(const MapInstance& inst, const std::vector<int>& perm) {
  if (perm.size() != inst.points.size())
    throw ShapeError("apply_permutation: size mismatch");
  MapInstance out;
  out.cls = inst.cls;
  out.closed = inst.closed;
  out.points.resize(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) out.points[j] = inst.points[perm[j]];
  return out;
}

Assignment match_instances(const PredictionSet& preds, const Scene& gts, double class_weight) {
  const int np = static_cast<int>(preds.instances.size());
  const int ng = static_cast<int>(gts.instances.size());

  Assignment assignment;
  if (np == 0 || ng == 0) {
    for (int i = 0; i < np; ++i) assignment.unmatched_preds.push_back(i);
    for (int j = 0; j < ng; ++j) assignment.unmatched_gts.push_back(j);
    return assignment;
  }

  int m = -1;
  const auto check_m = [&](const MapInstance& inst) {
    if (m < 0) m = inst.num_points();
    if (inst.num_points() != m)
      throw ShapeError("match_instances: instances must share a common point count");
  };
  for (const auto& p : preds.instances) check_m(p.instance);
  for (const auto& g : gts.instances) check_m(g);

  DenseArray cost({np, ng});
  std::vector<std::vector<int>> best_perm(np, std::vector<int>(ng, 0));
  std::vector<std::vector<std::vector<int>>> gt_perms(ng);
  for (int j = 0; j < ng; ++j) gt_perms[j] = point_permutations(gts.instances[j]);

  for (int i = 0; i < np; ++i) {
    const MapInstance& pred = preds.instances[i].instance;
    for (int j = 0; j < ng; ++j) {
      const MapInstance& gt = gts.instances[j];
      double best = std::numeric_limits<double>::infinity();
      int best_id = 0;
      for (std::size_t pid = 0; pid < gt_perms[j].size(); ++pid) {
        const std::vector<int>& perm = gt_perms[j][pid];
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += l1_dist(pred.points[k], gt.points[perm[k]]);
        const double mean = sum / m;
        if (mean < best) {
          best = mean;
          best_id = static_cast<int>(pid);
        }
      }
      const double penalty = preds.instances[i].instance.cls == gt.cls ? 0.0 : class_weight;
      cost.at2(i, j) = penalty + best;
      best_perm[i][j] = best_id;
    }
  }

  const HungarianResult hr = hungarian(cost);
  std::vector<bool> gt_used(ng, false);
  for (int i = 0; i < np; ++i) {
    const int j = hr.pred_to_gt[i];
    if (j >= 0) {
      assignment.pairs.push_back({i, j, best_perm[i][j], cost.at2(i, j)});
      gt_used[j] = true;
    } else {
      assignment.unmatched_preds.push_back(i);
    }
  }
  for (int j = 0; j < ng; ++j)
    if (!gt_used[j]) assignment.unmatched_gts.push_back(j);
  return assignment;
}

}  // namespace fastmap
