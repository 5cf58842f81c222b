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

#include <cstdint>

#include "fastmap/geometry.hpp"

namespace fastmap {

struct SynthConfig {
  std::uint64_t seed = 42;
  int num_dividers = 2;
  int num_crossings = 1;
  int num_boundaries = 2;
  double curvature_min = 0.0;   // 1/m
  double curvature_max = 0.05;  // 1/m
  double noise = 0.0;           // meters, for perturb()
  int m = 8;                    // points per instance
  BevRange range;
};

/// Deterministic synthetic BEV scene: dividers and boundaries are quadratic
/// curves inside the range, pedestrian crossings are axis-aligned rectangles;
/// everything resampled to m points. Instances are emitted in class order
/// (dividers, crossings, boundaries).
Scene generate_scene(const SynthConfig& cfg);

/// Simulated predictions: each gt point displaced by seeded uniform noise in
/// [-noise, +noise] per axis and clamped to the range; per-instance scores in
/// [0.5, 1.0); classes preserved.
PredictionSet perturb(const Scene& scene, const SynthConfig& cfg);

}  // namespace fastmap
