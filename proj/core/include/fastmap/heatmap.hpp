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

namespace fastmap {

/// Per-class score raster over a BEV grid. Channel index follows the
/// MapClass enum order. Values in [0,1]; serves both as ground truth and as
/// the heatmap head's prediction.
struct Heatmap {
  int channels = 0;
  int h = 0;
  int w = 0;
  std::vector<double> values;  // channel-major, then row-major

  Heatmap() = default;
  Heatmap(int channels_, int h_, int w_)
      : channels(channels_), h(h_), w(w_),
        values(static_cast<std::size_t>(channels_) * h_ * w_, 0.0) {}

  double& at(int c, int r, int col) { return values[idx(c, r, col)]; }
  double at(int c, int r, int col) const { return values[idx(c, r, col)]; }

  std::size_t idx(int c, int r, int col) const {
    return (static_cast<std::size_t>(c) * h + r) * w + col;
  }
};

/// Radial loss weight over the grid, 1.0 at the center rising toward
/// alpha_gauss + 1.0 at the periphery.
struct GaussianWeightField {
  int h = 0;
  int w = 0;
  std::vector<double> values;  // row-major

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * w + c]; }
};

/// All cells a metric segment touches, in traversal order (supercover: a
/// crossing exactly through a cell corner marks both adjacent cells).
/// Endpoints must lie inside spec.range.
std::vector<GridCell> supercover_cells(Point2 a, Point2 b, const BevGridSpec& spec);

/// Rasterizes scene annotations into per-class ground truth. Cells traversed
/// by each instance's segments (closing segment included for closed
/// instances) get 1.0 in the instance's class channel; each such core cell is
/// then dilated by a kernel_size x kernel_size Gaussian, exp(-(dr^2+dc^2) /
/// (2 sigma^2)), combined per cell by maximum so core cells stay exactly 1.0.
/// sigma <= 0 selects the default kernel_size / 3.
Heatmap rasterize_gt(const Scene& scene, const BevGridSpec& spec, int kernel_size,
                     double sigma = 0.0);

/// Weight formula at signed cell offsets (dr, dc) from the grid center, with
/// sigma_r = h / beta_gauss and sigma_c = w / beta_gauss:
///   w = (1 - exp(-(dr^2 + dc^2) / (2 sigma_r sigma_c))) * alpha_gauss + 1
double gaussian_weight_at(double dr, double dc, int h, int w, double alpha_gauss,
                          double beta_gauss);

/// Evaluates gaussian_weight_at over every cell, offsets measured from the
/// continuous grid center ((h-1)/2, (w-1)/2) so the field is exactly
/// symmetric under reflection about both center axes.
GaussianWeightField gaussian_weight_field(const BevGridSpec& spec, double alpha_gauss,
                                          double beta_gauss);

}  // namespace fastmap
