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

#include "fastmap/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fastmap {

namespace {
constexpr double kCoincidenceEps = 1e-9;  // meters
}

const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::Divider: return "divider";
    case MapClass::PedCrossing: return "ped_crossing";
    case MapClass::Boundary: return "boundary";
  }
  throw Error("unknown MapClass");
}

MapClass map_class_from_string(const std::string& s) {
  if (s == "divider") return MapClass::Divider;
  if (s == "ped_crossing") return MapClass::PedCrossing;
  if (s == "boundary") return MapClass::Boundary;
  throw Error("unknown map class string: " + s);
}

void validate_scene(const Scene& scene) {
  if (scene.range.x_extent() <= 0.0 || scene.range.y_extent() <= 0.0)
    throw RangeError("scene range has non-positive extent");
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const MapInstance& inst = scene.instances[i];
    const std::string tag = "instance " + std::to_string(i);
    if (inst.num_points() < 2) throw DegenerateGeometryError(tag + ": fewer than 2 points");
    if (inst.closed != (inst.cls == MapClass::PedCrossing))
      throw Error(tag + ": closed flag must hold exactly for ped_crossing");
    for (const Point2& p : inst.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw RangeError(tag + ": non-finite coordinate");
      if (!scene.range.contains(p)) throw RangeError(tag + ": point outside scene range");
    }
    const int m = inst.num_points();
    const int last = inst.closed ? m : m - 1;
    for (int j = 0; j < last; ++j) {
      const Point2 a = inst.points[j];
      const Point2 b = inst.points[(j + 1) % m];
      if (l2_dist(a, b) <= kCoincidenceEps)
        throw DegenerateGeometryError(tag + ": coincident consecutive points");
    }
  }
}

BevGridSpec BevGridSpec::from_resolution(const BevRange& range, double resolution) {
  if (resolution <= 0.0) throw RangeError("resolution must be positive");
  BevGridSpec spec;
  spec.range = range;
  spec.resolution = resolution;
  spec.h = static_cast<int>(std::llround(range.y_extent() / resolution));
  spec.w = static_cast<int>(std::llround(range.x_extent() / resolution));
  spec.validate();
  return spec;
}

void BevGridSpec::validate() const {
  if (h < 2 || w < 2) throw ShapeError("BevGridSpec: h and w must be >= 2");
  if (resolution <= 0.0) throw RangeError("BevGridSpec: resolution must be positive");
  const double tol = 1e-9;
  if (std::abs(h * resolution - range.y_extent()) > tol * std::max(1.0, range.y_extent()))
    throw ShapeError("BevGridSpec: h * resolution != y extent");
  if (std::abs(w * resolution - range.x_extent()) > tol * std::max(1.0, range.x_extent()))
    throw ShapeError("BevGridSpec: w * resolution != x extent");
}

GridCell world_to_grid(Point2 p, const BevGridSpec& spec) {
  if (!spec.range.contains(p)) throw RangeError("world_to_grid: point outside range");
  int row = static_cast<int>(std::floor((p.y - spec.range.y_min) / spec.resolution));
  int col = static_cast<int>(std::floor((p.x - spec.range.x_min) / spec.resolution));
  row = std::clamp(row, 0, spec.h - 1);
  col = std::clamp(col, 0, spec.w - 1);
  return {row, col};
}

Point2 grid_to_world(GridCell cell, const BevGridSpec& spec) {
  if (cell.row < 0 || cell.row >= spec.h || cell.col < 0 || cell.col >= spec.w)
    throw IndexError("grid_to_world: cell out of bounds");
  return {spec.range.x_min + (cell.col + 0.5) * spec.resolution,
          spec.range.y_min + (cell.row + 0.5) * spec.resolution};
}

double arc_length(const MapInstance& inst) {
  const int m = inst.num_points();
  if (m < 2) return 0.0;
  double len = 0.0;
  const int last = inst.closed ? m : m - 1;
  for (int j = 0; j < last; ++j) len += l2_dist(inst.points[j], inst.points[(j + 1) % m]);
  return len;
}

MapInstance resample_polyline(const MapInstance& inst, int m) {
  if (m < 2) throw Error("resample_polyline: m must be >= 2");
  if (inst.num_points() < 2) throw DegenerateGeometryError("resample_polyline: need >= 2 points");
  if (inst.num_points() == m) return inst;

  const int k = inst.num_points();
  const int nseg = inst.closed ? k : k - 1;
  std::vector<double> cum(nseg + 1, 0.0);
  for (int j = 0; j < nseg; ++j)
    cum[j + 1] = cum[j] + l2_dist(inst.points[j], inst.points[(j + 1) % k]);
  const double total = cum[nseg];
  if (total <= kCoincidenceEps)
    throw DegenerateGeometryError("resample_polyline: zero-length polyline");

  MapInstance out;
  out.cls = inst.cls;
  out.closed = inst.closed;
  out.points.resize(m);

  const double step = inst.closed ? total / m : total / (m - 1);
  int seg = 0;
  for (int i = 0; i < m; ++i) {
    if (!inst.closed && i == m - 1) {
      out.points[i] = inst.points.back();  // exact endpoint, no fp drift
      break;
    }
    const double target = i * step;
    while (seg < nseg - 1 && cum[seg + 1] < target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    const Point2 a = inst.points[seg];
    const Point2 b = inst.points[(seg + 1) % k];
    out.points[i] = a + t * (b - a);
  }
  return out;
}

}  // namespace fastmap
