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
// Wires decoder outputs into the full two-stage loss composition, closing
// the loop between the forward pass, the matcher, and every loss term.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fastmap/decoder.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/losses.hpp"
#include "fastmap/rng.hpp"
#include "fastmap/synth.hpp"

using namespace fastmap;

namespace {

struct PipelineFixture {
  DecoderConfig cfg;
  BevGridSpec spec;
  Scene scene;
  DenseArray bev;
  DecoderWeights weights;
  PipelineResult result;

  PipelineFixture()
      : cfg{},
        spec(BevGridSpec::from_resolution(BevRange{}, 1.0)),  // 60 x 30
        scene(generate_scene({.seed = 71, .num_dividers = 2, .num_crossings = 1,
                              .num_boundaries = 2})),
        weights(DecoderWeights::seeded(make_config())) {
    cfg = make_config();
    // Scene-aware BEV features through a seeded lift of the gt heatmap.
    const Heatmap hm = rasterize_gt(scene, spec, 3);
    SplitMix64 rng(71);
    DenseArray lift({kNumClasses, cfg.d});
    for (double& v : lift.values()) v = rng.next_uniform(-0.6, 0.6);
    bev = DenseArray({cfg.d, spec.h, spec.w});
    for (int c = 0; c < cfg.d; ++c)
      for (int r = 0; r < spec.h; ++r)
        for (int col = 0; col < spec.w; ++col) {
          double acc = 0.0;
          for (int k = 0; k < kNumClasses; ++k) acc += hm.at(k, r, col) * lift.at2(k, c);
          bev.at3(c, r, col) = acc;
        }
    result = pipeline_forward(bev, weights, cfg, spec, 0.1);
  }

  static DecoderConfig make_config() {
    DecoderConfig cfg;
    cfg.n = 6;
    cfg.m = 8;
    cfg.d = 32;
    cfg.num_priors = 96;
    cfg.seed = 71;
    return cfg;
  }
};

StageLossValues stage_values(const PredictionSet& preds, const Scene& gts,
                             const ScenePointLosses& spl) {
  StageLossValues values;
  values.pp = spl.pp;
  values.pl = spl.pl;
  values.al = spl.al;
  DenseArray logits({static_cast<int>(preds.instances.size()), kNumClasses + 1});
  for (std::size_t i = 0; i < preds.instances.size(); ++i)
    for (int c = 0; c < kNumClasses + 1; ++c)
      logits.at2(static_cast<int>(i), c) = preds.instances[i].logits[c];
  values.cls =
      classification_loss(logits, classification_targets(
                                      spl.assignment,
                                      static_cast<int>(preds.instances.size()), gts))
          .value;
  return values;
}

}  // namespace

TEST_CASE("both decoder stages feed the total loss with finite gradients") {
  const PipelineFixture fx;

  // Stage predictions resample the gt implicitly via the common m = 8.
  const PredictionSet stage1 = stage_predictions(fx.result.coarse, fx.cfg, fx.spec);
  const PredictionSet stage2 = fx.result.predictions;
  REQUIRE(stage1.instances.size() == static_cast<std::size_t>(fx.cfg.n));
  REQUIRE(stage2.instances.size() == static_cast<std::size_t>(fx.cfg.n));

  // Independent matching per stage.
  const ScenePointLosses spl1 = scene_point_losses(stage1, fx.scene);
  const ScenePointLosses spl2 = scene_point_losses(stage2, fx.scene);
  const StageLossValues s1 = stage_values(stage1, fx.scene, spl1);
  const StageLossValues s2 = stage_values(stage2, fx.scene, spl2);

  // Heatmap term against the rasterized gt with the radial weight field.
  const Heatmap gt_hm = rasterize_gt(fx.scene, fx.spec, 3);
  const LossWeights w;
  const GaussianWeightField field =
      gaussian_weight_field(fx.spec, w.alpha_gauss, w.beta_gauss);
  const HeatmapLossResult heat = heatmap_focal_loss(fx.result.heatmap, gt_hm, field);

  const LossBreakdown breakdown = total_loss(s1, s2, heat.value, w);
  const double expected =
      w.gamma * (w.alpha_cls * s1.cls + w.alpha_pl * s1.pl + w.alpha_pp * s1.pp +
                 w.alpha_al * s1.al) +
      w.beta * (w.alpha_cls * s2.cls + w.alpha_pl * s2.pl + w.alpha_pp * s2.pp +
                w.alpha_al * s2.al) +
      w.alpha_heat * heat.value;
  CHECK(std::abs(breakdown.total - expected) < 1e-12);
  CHECK(breakdown.total > 0.0);
  CHECK(std::isfinite(breakdown.total));

  // Every per-term value and gradient is finite.
  for (double v : {s1.cls, s1.pl, s1.pp, s1.al, s2.cls, s2.pl, s2.pp, s2.al, heat.value})
    CHECK(std::isfinite(v));
  for (const auto& g : spl1.grad_pl) {
    CHECK(std::isfinite(g[0]));
    CHECK(std::isfinite(g[1]));
  }
  for (double g : heat.grad) CHECK(std::isfinite(g));

  // The predicted heatmap is a valid focal input by construction.
  for (double v : fx.result.heatmap.values) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("stage predictions stay inside the range with valid classes") {
  const PipelineFixture fx;
  for (const PredictionSet& preds :
       {stage_predictions(fx.result.coarse, fx.cfg, fx.spec), fx.result.predictions}) {
    for (const ScoredInstance& scored : preds.instances) {
      CHECK(scored.instance.num_points() == fx.cfg.m);
      CHECK(scored.instance.closed == (scored.instance.cls == MapClass::PedCrossing));
      CHECK(scored.score > 0.0);
      CHECK(scored.score < 1.0);
      for (const Point2& p : scored.instance.points) CHECK(fx.spec.range.contains(p));
    }
  }
}

TEST_CASE("gradcheck holds on live decoder outputs against the scene") {
  const PipelineFixture fx;
  const ScenePointLosses spl = scene_point_losses(fx.result.predictions, fx.scene);
  double worst = 0.0;
  for (const MatchedPair& pair : spl.assignment.pairs) {
    const MapInstance& pred = fx.result.predictions.instances[pair.pred].instance;
    const MapInstance gt = apply_permutation(
        fx.scene.instances[pair.gt], point_permutations(fx.scene.instances[pair.gt])[pair.perm]);
    worst = std::max(worst, gradcheck_points_points(pred, gt, 1e-6).max_rel_err);
    worst = std::max(worst, gradcheck_point_line(pred, gt, 1e-6).max_rel_err);
    worst = std::max(worst, gradcheck_auxiliary_line(pred, gt, 1e-6).max_rel_err);
  }
  REQUIRE(!spl.assignment.pairs.empty());
  CHECK(worst < 1e-4);

  const Heatmap gt_hm = rasterize_gt(fx.scene, fx.spec, 3);
  const LossWeights w;
  const GaussianWeightField field =
      gaussian_weight_field(fx.spec, w.alpha_gauss, w.beta_gauss);
  CHECK(gradcheck_heatmap_focal(fx.result.heatmap, gt_hm, field, 1e-6).max_rel_err < 1e-4);
}
