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

#include "fastmap/synth.hpp"

#include <algorithm>
#include <cmath>

#include "fastmap/rng.hpp"

namespace fastmap {

namespace {

constexpr double kMargin = 1.5;      // meters kept clear of the range edge
constexpr int kCurveSamples = 64;    // dense samples before resampling
constexpr double kMinSpan = 12.0;    // minimum endpoint separation, meters

Point2 clamp_to(const Point2& p, double x_min, double x_max, double y_min, double y_max) {
  return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
}

// Quadratic curve from p0 to p2 whose bend is set by a curvature draw; the
// middle control point is offset along the chord normal by the circular-arc
// sagitta kappa * chord^2 / 8. Control points stay inside the inset box, so
// the curve does too (convex hull property).
MapInstance make_curve(SplitMix64& rng, MapClass cls, const SynthConfig& cfg) {
  const BevRange& rg = cfg.range;
  const double x0 = rg.x_min + kMargin, x1 = rg.x_max - kMargin;
  const double y0 = rg.y_min + kMargin, y1 = rg.y_max - kMargin;

  Point2 a{rng.next_uniform(x0, x1), rng.next_uniform(y0, y1)};
  Point2 b{rng.next_uniform(x0, x1), rng.next_uniform(y0, y1)};
  for (int tries = 0; tries < 32 && l2_dist(a, b) < kMinSpan; ++tries)
    b = {rng.next_uniform(x0, x1), rng.next_uniform(y0, y1)};

  const double chord = l2_dist(a, b);
  const double kappa = rng.next_uniform(cfg.curvature_min, cfg.curvature_max);
  const double side = rng.next_unit() < 0.5 ? -1.0 : 1.0;
  const double sagitta = side * kappa * chord * chord / 8.0;
  const Point2 dir = (1.0 / chord) * (b - a);
  const Point2 normal{-dir.y, dir.x};
  Point2 mid = 0.5 * (a + b) + sagitta * normal;
  mid = clamp_to(mid, x0, x1, y0, y1);

  MapInstance inst;
  inst.cls = cls;
  inst.closed = false;
  inst.points.reserve(kCurveSamples);
  for (int i = 0; i < kCurveSamples; ++i) {
    const double t = static_cast<double>(i) / (kCurveSamples - 1);
    const double u = 1.0 - t;
    inst.points.push_back((u * u) * a + (2.0 * u * t) * mid + (t * t) * b);
  }
  return resample_polyline(inst, cfg.m);
}

MapInstance make_crossing(SplitMix64& rng, const SynthConfig& cfg) {
  const BevRange& rg = cfg.range;
  const double w = rng.next_uniform(2.0, 5.0);
  const double h = rng.next_uniform(3.0, 8.0);
  const double cx = rng.next_uniform(rg.x_min + kMargin + w / 2, rg.x_max - kMargin - w / 2);
  const double cy = rng.next_uniform(rg.y_min + kMargin + h / 2, rg.y_max - kMargin - h / 2);

  MapInstance inst;
  inst.cls = MapClass::PedCrossing;
  inst.closed = true;
  inst.points = {{cx - w / 2, cy - h / 2},
                 {cx + w / 2, cy - h / 2},
                 {cx + w / 2, cy + h / 2},
                 {cx - w / 2, cy + h / 2}};
  return resample_polyline(inst, cfg.m);
}

}  // namespace

Scene generate_scene(const SynthConfig& cfg) {
  if (cfg.num_dividers < 0 || cfg.num_crossings < 0 || cfg.num_boundaries < 0)
    throw Error("generate_scene: counts must be >= 0");
  if (cfg.m < 2) throw Error("generate_scene: m must be >= 2");

  SplitMix64 rng(cfg.seed);
  Scene scene;
  scene.range = cfg.range;
  for (int i = 0; i < cfg.num_dividers; ++i)
    scene.instances.push_back(make_curve(rng, MapClass::Divider, cfg));
  for (int i = 0; i < cfg.num_crossings; ++i)
    scene.instances.push_back(make_crossing(rng, cfg));
  for (int i = 0; i < cfg.num_boundaries; ++i)
    scene.instances.push_back(make_curve(rng, MapClass::Boundary, cfg));
  validate_scene(scene);
  return scene;
}

PredictionSet perturb(const Scene& scene, const SynthConfig& cfg) {
  if (cfg.noise < 0.0) throw Error("perturb: noise must be >= 0");

  SplitMix64 rng(cfg.seed ^ 0x7065727475726221ULL);  // independent stream
  PredictionSet preds;
  preds.range = scene.range;
  for (const MapInstance& gt : scene.instances) {
    ScoredInstance scored;
    scored.instance = gt;
    for (Point2& p : scored.instance.points) {
      p.x += rng.next_uniform(-cfg.noise, cfg.noise);
      p.y += rng.next_uniform(-cfg.noise, cfg.noise);
      p = clamp_to(p, scene.range.x_min, scene.range.x_max, scene.range.y_min,
                   scene.range.y_max);
    }
    scored.score = rng.next_uniform(0.5, 1.0);
    // One-hot-style logits whose max softmax probability equals the score.
    scored.logits.fill(0.0);
    scored.logits[static_cast<int>(gt.cls)] =
        std::log(kNumClasses * scored.score / (1.0 - scored.score));
    preds.instances.push_back(std::move(scored));
  }
  return preds;
}

}  // namespace fastmap
