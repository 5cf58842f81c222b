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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fastmap/metrics.hpp"
#include "fastmap/synth.hpp"
#include "support/oracles.hpp"

using namespace fastmap;

TEST_CASE("generate_scene is deterministic and honors counts") {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.num_dividers = 2;
  cfg.num_crossings = 1;
  cfg.num_boundaries = 2;

  const Scene a = generate_scene(cfg);
  const Scene b = generate_scene(cfg);
  REQUIRE(a.instances.size() == 5);
  REQUIRE(b.instances.size() == 5);
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].cls == b.instances[i].cls);
    REQUIRE(a.instances[i].num_points() == b.instances[i].num_points());
    for (int j = 0; j < a.instances[i].num_points(); ++j) {
      CHECK(a.instances[i].points[j].x == b.instances[i].points[j].x);
      CHECK(a.instances[i].points[j].y == b.instances[i].points[j].y);
    }
  }

  int dividers = 0, crossings = 0, boundaries = 0;
  for (const MapInstance& inst : a.instances) {
    if (inst.cls == MapClass::Divider) ++dividers;
    if (inst.cls == MapClass::PedCrossing) ++crossings;
    if (inst.cls == MapClass::Boundary) ++boundaries;
  }
  CHECK(dividers == 2);
  CHECK(crossings == 1);
  CHECK(boundaries == 2);
}

TEST_CASE("generated scenes validate and stay inside the range") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 40ULL, 500ULL}) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.num_dividers = 3;
    cfg.num_crossings = 2;
    cfg.num_boundaries = 3;
    const Scene scene = generate_scene(cfg);
    CHECK_NOTHROW(validate_scene(scene));
    for (const MapInstance& inst : scene.instances) {
      CHECK(inst.num_points() == cfg.m);
      for (const Point2& p : inst.points) {
        CHECK(p.x >= -15.0);
        CHECK(p.x <= 15.0);
        CHECK(p.y >= -30.0);
        CHECK(p.y <= 30.0);
      }
    }
  }
}

TEST_CASE("perturb with zero noise is the identity on geometry") {
  SynthConfig cfg;
  cfg.seed = 21;
  const Scene scene = generate_scene(cfg);
  cfg.noise = 0.0;
  const PredictionSet preds = perturb(scene, cfg);
  REQUIRE(preds.instances.size() == scene.instances.size());
  for (std::size_t i = 0; i < preds.instances.size(); ++i) {
    const MapInstance& p = preds.instances[i].instance;
    const MapInstance& g = scene.instances[i];
    CHECK(p.cls == g.cls);
    for (int j = 0; j < p.num_points(); ++j) {
      CHECK(p.points[j].x == g.points[j].x);
      CHECK(p.points[j].y == g.points[j].y);
    }
    CHECK(preds.instances[i].score >= 0.5);
    CHECK(preds.instances[i].score <= 1.0);
  }
  CHECK(average_precision(preds, scene, kStandardThresholds).map == doctest::Approx(1.0));
}

TEST_CASE("small perturbations keep mAP at 1 under the standard set") {
  SynthConfig cfg;
  cfg.seed = 22;
  cfg.num_dividers = 2;
  cfg.num_crossings = 1;
  cfg.num_boundaries = 2;
  const Scene scene = generate_scene(cfg);
  cfg.noise = 0.05;  // every chamfer distance <= 0.05 * sqrt(2) < 0.5
  const PredictionSet preds = perturb(scene, cfg);

  for (std::size_t i = 0; i < preds.instances.size(); ++i)
    CHECK(chamfer_distance(preds.instances[i].instance, scene.instances[i]) < 0.5);
  CHECK(average_precision(preds, scene, kStandardThresholds).map == doctest::Approx(1.0));
}

TEST_CASE("perturb is deterministic per seed") {
  SynthConfig cfg;
  cfg.seed = 23;
  cfg.noise = 0.3;
  const Scene scene = generate_scene(cfg);
  const PredictionSet a = perturb(scene, cfg);
  const PredictionSet b = perturb(scene, cfg);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].score == b.instances[i].score);
    for (int j = 0; j < a.instances[i].instance.num_points(); ++j) {
      CHECK(a.instances[i].instance.points[j].x == b.instances[i].instance.points[j].x);
      CHECK(a.instances[i].instance.points[j].y == b.instances[i].instance.points[j].y);
    }
  }
}

TEST_CASE("mean chamfer grows monotonically with noise over 50 seeds") {
  std::vector<double> noise_levels, mean_chamfers;
  for (int s = 0; s < 50; ++s) {
    SynthConfig cfg;
    cfg.seed = 1000 + s;
    cfg.num_dividers = 2;
    cfg.num_crossings = 0;
    cfg.num_boundaries = 1;
    const Scene scene = generate_scene(cfg);
    cfg.noise = 0.02 + 0.015 * s;
    const PredictionSet preds = perturb(scene, cfg);
    double mean = 0.0;
    for (std::size_t i = 0; i < preds.instances.size(); ++i)
      mean += chamfer_distance(preds.instances[i].instance, scene.instances[i], 50);
    noise_levels.push_back(cfg.noise);
    mean_chamfers.push_back(mean / preds.instances.size());
  }
  CHECK(testing::spearman_correlation(noise_levels, mean_chamfers) > 0.9);
}
