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

#include "fastmap/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastmap {

std::vector<GridCell> supercover_cells(Point2 a, Point2 b, const BevGridSpec& spec) {
  if (!spec.range.contains(a) || !spec.range.contains(b))
    throw RangeError("supercover_cells: endpoint outside range");

  // Continuous grid coordinates: cell c spans [c, c+1). Max-edge points
  // clamp into the last cell, matching world_to_grid.
  const auto to_grid_x = [&](double x) {
    return std::min((x - spec.range.x_min) / spec.resolution,
                    spec.w - 1e-12 * std::max(1, spec.w));
  };
  const auto to_grid_y = [&](double y) {
    return std::min((y - spec.range.y_min) / spec.resolution,
                    spec.h - 1e-12 * std::max(1, spec.h));
  };
  const double gx0 = to_grid_x(a.x), gy0 = to_grid_y(a.y);
  const double gx1 = to_grid_x(b.x), gy1 = to_grid_y(b.y);

  int col = static_cast<int>(std::floor(gx0));
  int row = static_cast<int>(std::floor(gy0));
  const int col_end = static_cast<int>(std::floor(gx1));
  const int row_end = static_cast<int>(std::floor(gy1));

  const double dx = gx1 - gx0, dy = gy1 - gy0;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

  const double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf, t_delta_x = inf;
  double t_max_y = inf, t_delta_y = inf;
  if (step_x != 0) {
    const double boundary = col + (step_x > 0 ? 1.0 : 0.0);
    t_max_x = (boundary - gx0) / dx;
    t_delta_x = 1.0 / std::abs(dx);
  }
  if (step_y != 0) {
    const double boundary = row + (step_y > 0 ? 1.0 : 0.0);
    t_max_y = (boundary - gy0) / dy;
    t_delta_y = 1.0 / std::abs(dy);
  }

  std::vector<GridCell> cells;
  const auto mark = [&](int r, int c) {
    if (r >= 0 && r < spec.h && c >= 0 && c < spec.w) cells.push_back({r, c});
  };
  mark(row, col);

  const int max_steps = std::abs(col_end - col) + std::abs(row_end - row) + 4;
  for (int i = 0; i < max_steps && (col != col_end || row != row_end); ++i) {
    if (t_max_x < t_max_y) {
      col += step_x;
      t_max_x += t_delta_x;
      mark(row, col);
    } else if (t_max_y < t_max_x) {
      row += step_y;
      t_max_y += t_delta_y;
      mark(row, col);
    } else {
      // Exact corner crossing: the segment touches both side cells.
      mark(row, col + step_x);
      mark(row + step_y, col);
      col += step_x;
      row += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
      mark(row, col);
    }
  }
  return cells;
}

Heatmap rasterize_gt(const Scene& scene, const BevGridSpec& spec, int kernel_size,
                     double sigma) {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw Error("rasterize_gt: kernel_size must be odd and >= 1");
  validate_scene(scene);
  spec.validate();
  if (sigma <= 0.0) sigma = kernel_size / 3.0;

  Heatmap hm(kNumClasses, spec.h, spec.w);

  // Core pass: every cell touched by a segment becomes 1.0.
  std::vector<std::vector<GridCell>> core(kNumClasses);
  for (const MapInstance& inst : scene.instances) {
    const int c = static_cast<int>(inst.cls);
    const int m = inst.num_points();
    const int nseg = inst.closed ? m : m - 1;
    for (int j = 0; j < nseg; ++j) {
      for (GridCell cell : supercover_cells(inst.points[j], inst.points[(j + 1) % m], spec)) {
        double& v = hm.at(c, cell.row, cell.col);
        if (v != 1.0) {
          v = 1.0;
          core[c].push_back(cell);
        }
      }
    }
  }

  if (kernel_size == 1) return hm;

  // Dilation pass: Gaussian stamp around each core cell, max-combined so
  // core cells keep exactly 1.0.
  const int half = kernel_size / 2;
  std::vector<double> kernel(static_cast<std::size_t>(kernel_size) * kernel_size);
  for (int dr = -half; dr <= half; ++dr)
    for (int dc = -half; dc <= half; ++dc)
      kernel[static_cast<std::size_t>(dr + half) * kernel_size + (dc + half)] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));

  for (int c = 0; c < kNumClasses; ++c) {
    for (GridCell cell : core[c]) {
      const int r0 = std::max(0, cell.row - half), r1 = std::min(spec.h - 1, cell.row + half);
      const int c0 = std::max(0, cell.col - half), c1 = std::min(spec.w - 1, cell.col + half);
      for (int r = r0; r <= r1; ++r) {
        for (int col = c0; col <= c1; ++col) {
          const double k = kernel[static_cast<std::size_t>(r - cell.row + half) * kernel_size +
                                  (col - cell.col + half)];
          double& v = hm.at(c, r, col);
          v = std::max(v, k);
        }
      }
    }
  }
  return hm;
}

double gaussian_weight_at(double dr, double dc, int h, int w, double alpha_gauss,
                          double beta_gauss) {
  if (alpha_gauss < 0.0) throw Error("gaussian_weight_at: alpha_gauss must be >= 0");
  if (beta_gauss <= 0.0) throw Error("gaussian_weight_at: beta_gauss must be > 0");
  const double sigma_r = h / beta_gauss;
  const double sigma_c = w / beta_gauss;
  return (1.0 - std::exp(-(dr * dr + dc * dc) / (2.0 * sigma_r * sigma_c))) * alpha_gauss + 1.0;
}

GaussianWeightField gaussian_weight_field(const BevGridSpec& spec, double alpha_gauss,
                                          double beta_gauss) {
  spec.validate();
  GaussianWeightField field;
  field.h = spec.h;
  field.w = spec.w;
  field.values.resize(static_cast<std::size_t>(spec.h) * spec.w);
  const double cr = (spec.h - 1) / 2.0;
  const double cc = (spec.w - 1) / 2.0;
  for (int r = 0; r < spec.h; ++r)
    for (int c = 0; c < spec.w; ++c)
      field.values[static_cast<std::size_t>(r) * spec.w + c] =
          gaussian_weight_at(r - cr, c - cc, spec.h, spec.w, alpha_gauss, beta_gauss);
  return field;
}

}  // namespace fastmap
