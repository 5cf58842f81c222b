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

#include <string>

#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/sampler.hpp"

namespace fastmap {

/// BEV drawing options. Ground truth renders solid, predictions dashed; both
/// color-coded by class over a frame with a 5 m grid. Optional heatmap
/// underlay and prior-point markers.
struct SvgOptions {
  double scale = 10.0;      // pixels per meter
  double grid_step = 5.0;   // meters
  const Heatmap* heatmap = nullptr;        // underlay, needs heatmap_spec
  const BevGridSpec* heatmap_spec = nullptr;
  const SampledPriors* priors = nullptr;   // normalized coords over `range`
};

/// Deterministic byte output for fixed inputs. Either scene or preds may be
/// null.
std::string render_svg(const Scene* scene, const PredictionSet* preds, const BevRange& range,
                       const SvgOptions& opt = {});

const char* class_color(MapClass c);

}  // namespace fastmap
