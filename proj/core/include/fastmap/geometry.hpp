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
#include <cmath>
#include <string>
#include <vector>

#include "fastmap/error.hpp"

namespace fastmap {

/// Metric BEV point: x lateral (right), y longitudinal (forward), in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double l1_dist(Point2 a, Point2 b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
inline double l2_dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class MapClass : int { Divider = 0, PedCrossing = 1, Boundary = 2 };

inline constexpr int kNumClasses = 3;
/// Index of the background column in (kNumClasses + 1)-way class logits.
inline constexpr int kBackgroundClass = kNumClasses;

const char* to_string(MapClass c);
MapClass map_class_from_string(const std::string& s);

/// One vectorized road element: an ordered polyline of m metric points.
/// Closed elements (pedestrian crossings) store the cycle without repeating
/// the first vertex; closure is the flag.
struct MapInstance {
  MapClass cls = MapClass::Divider;
  std::vector<Point2> points;
  bool closed = false;

  int num_points() const { return static_cast<int>(points.size()); }
};

/// Metric extent of the BEV frame.
struct BevRange {
  double x_min = -15.0, x_max = 15.0;
  double y_min = -30.0, y_max = 30.0;

  double x_extent() const { return x_max - x_min; }
  double y_extent() const { return y_max - y_min; }
  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Point2 center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
};

struct Scene {
  std::vector<MapInstance> instances;
  BevRange range;
};

/// Throws on the first violated invariant: m >= 2, closed iff ped_crossing,
/// points inside range, no coincident consecutive points (cyclically for
/// closed instances).
void validate_scene(const Scene& scene);

/// Discretization contract between metric BEV space and the H x W raster.
/// Rows index y (row 0 at y_min), columns index x.
struct BevGridSpec {
  int h = 0;
  int w = 0;
  BevRange range;
  double resolution = 0.0;  // meters per cell, both axes

  /// Derives h and w from range and resolution; the extents must be integer
  /// multiples of the resolution.
  static BevGridSpec from_resolution(const BevRange& range, double resolution);

  void validate() const;
};

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

/// Cell containing p. Points exactly on the max edge clamp into the last
/// cell. Throws RangeError if p is outside spec.range.
GridCell world_to_grid(Point2 p, const BevGridSpec& spec);

/// Metric center of the cell. Throws IndexError if out of bounds.
Point2 grid_to_world(GridCell cell, const BevGridSpec& spec);

/// Resamples to m points equally spaced by arc length. Open instances keep
/// their endpoints; closed instances are walked as a cycle starting at vertex
/// 0. An instance that already has m points is returned unchanged, which
/// makes repeated application a no-op. Throws DegenerateGeometryError on a
/// zero-length polyline.
MapInstance resample_polyline(const MapInstance& inst, int m);

/// Chordal arc length; includes the closing segment for closed instances.
double arc_length(const MapInstance& inst);

struct ScoredInstance {
  MapInstance instance;
  double score = 0.0;
  /// (kNumClasses + 1)-way logits, background last.
  std::array<double, kNumClasses + 1> logits{};
};

/// Decoder/synth output container. Instances here are not scene-validated;
/// they carry whatever geometry the producer emitted.
struct PredictionSet {
  std::vector<ScoredInstance> instances;
  BevRange range;
};

}  // namespace fastmap
