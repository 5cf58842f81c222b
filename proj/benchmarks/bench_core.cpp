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

#include <benchmark/benchmark.h>

#include "fastmap/decoder.hpp"
#include "fastmap/fit.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/matcher.hpp"
#include "fastmap/metrics.hpp"
#include "fastmap/rng.hpp"
#include "fastmap/sampler.hpp"
#include "fastmap/synth.hpp"

using namespace fastmap;

namespace {

Scene bench_scene(std::uint64_t seed, int dividers = 4, int crossings = 2, int boundaries = 4) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.num_dividers = dividers;
  cfg.num_crossings = crossings;
  cfg.num_boundaries = boundaries;
  return generate_scene(cfg);
}

void BM_RasterizeGt(benchmark::State& state) {
  const Scene scene = bench_scene(1);
  const BevGridSpec spec = BevGridSpec::from_resolution(BevRange{}, 0.3);
  const int kernel = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_gt(scene, spec, kernel));
}
BENCHMARK(BM_RasterizeGt)->Arg(1)->Arg(3)->Arg(5);

void BM_GaussianWeightField(benchmark::State& state) {
  const BevGridSpec spec = BevGridSpec::from_resolution(BevRange{}, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_weight_field(spec, 0.8, 8.0));
}
BENCHMARK(BM_GaussianWeightField);

void BM_CsmSample(benchmark::State& state) {
  const BevGridSpec spec = BevGridSpec::from_resolution(BevRange{}, 0.3);
  SplitMix64 rng(2);
  const Point2 center = spec.range.center();
  std::vector<Candidate> cands;
  for (int k = 0; k < state.range(0); ++k) {
    const GridCell cell{rng.next_int(0, spec.h - 1), rng.next_int(0, spec.w - 1)};
    cands.push_back({cell, static_cast<MapClass>(rng.next_int(0, kNumClasses - 1)),
                     rng.next_uniform(0.1, 1.0), l2_dist(grid_to_world(cell, spec), center)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(csm_sample(cands, 256, spec));
}
BENCHMARK(BM_CsmSample)->Arg(1000)->Arg(20000);

MapInstance random_polyline(SplitMix64& rng, int m) {
  MapInstance inst;
  Point2 p{rng.next_uniform(-12, 12), rng.next_uniform(-25, 25)};
  inst.points.push_back(p);
  for (int j = 1; j < m; ++j) {
    p = {std::clamp(p.x + rng.next_uniform(-4.0, 4.0), -15.0, 15.0),
         std::clamp(p.y + rng.next_uniform(-4.0, 4.0), -30.0, 30.0)};
    inst.points.push_back(p);
  }
  return inst;
}

void BM_ChamferDistance(benchmark::State& state) {
  SplitMix64 rng(3);
  const MapInstance a = random_polyline(rng, 8);
  const MapInstance b = random_polyline(rng, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(chamfer_distance(a, b, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ChamferDistance)->Arg(50)->Arg(100);

void BM_Hungarian(benchmark::State& state) {
  SplitMix64 rng(4);
  const int n = static_cast<int>(state.range(0));
  DenseArray cost({n, n});
  for (double& v : cost.values()) v = rng.next_uniform(0.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(hungarian(cost));
}
BENCHMARK(BM_Hungarian)->Arg(10)->Arg(50);

void BM_MatchInstances(benchmark::State& state) {
  const Scene scene = bench_scene(5);
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.noise = 0.4;
  const PredictionSet preds = perturb(scene, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(match_instances(preds, scene));
}
BENCHMARK(BM_MatchInstances);

// Coarse attention cost against the prior count, up to the published 3500.
void BM_CgcaForward(benchmark::State& state) {
  DecoderConfig cfg;
  cfg.seed = 9;
  cfg.num_priors = static_cast<int>(state.range(0));
  const BevGridSpec spec = BevGridSpec::from_resolution(BevRange{}, 0.3);
  const DecoderWeights w = DecoderWeights::seeded(cfg);
  const DenseArray bev = synth_bev_features(cfg.d, spec, 9);

  SplitMix64 rng(9);
  const Point2 center = spec.range.center();
  std::vector<Candidate> selected;
  for (int k = 0; k < cfg.num_priors; ++k) {
    const GridCell cell{rng.next_int(0, spec.h - 1), rng.next_int(0, spec.w - 1)};
    selected.push_back({cell, static_cast<MapClass>(rng.next_int(0, kNumClasses - 1)),
                        rng.next_uniform(0.1, 1.0),
                        l2_dist(grid_to_world(cell, spec), center)});
  }
  const SampledPriors priors = gather_priors(bev, selected, spec);
  for (auto _ : state) benchmark::DoNotOptimize(cgca_forward(w.queries, priors, w, cfg));
}
BENCHMARK(BM_CgcaForward)->Arg(256)->Arg(3500)->Unit(benchmark::kMillisecond);

void BM_PipelineForward(benchmark::State& state) {
  DecoderConfig cfg;
  cfg.seed = 6;
  const BevGridSpec spec =
      BevGridSpec::from_resolution(BevRange{}, static_cast<double>(state.range(0)) / 10.0);
  const DecoderWeights w = DecoderWeights::seeded(cfg);
  const DenseArray bev = synth_bev_features(cfg.d, spec, 6);
  for (auto _ : state) benchmark::DoNotOptimize(pipeline_forward(bev, w, cfg, spec, 0.1));
}
BENCHMARK(BM_PipelineForward)->Arg(15)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_AveragePrecision(benchmark::State& state) {
  const Scene scene = bench_scene(7);
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.noise = 0.4;
  const PredictionSet preds = perturb(scene, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(average_precision(preds, scene, kStandardThresholds));
}
BENCHMARK(BM_AveragePrecision)->Unit(benchmark::kMillisecond);

void BM_FitStep(benchmark::State& state) {
  const Scene scene = bench_scene(8, 3, 0, 2);
  SynthConfig cfg;
  cfg.seed = 8;
  cfg.noise = 0.5;
  const PredictionSet preds = perturb(scene, cfg);
  FitOptions opt;
  opt.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_points(preds, scene, opt));
}
BENCHMARK(BM_FitStep)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
