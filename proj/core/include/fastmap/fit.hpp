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

#include "fastmap/geometry.hpp"
#include "fastmap/losses.hpp"

namespace fastmap {

struct FitOptions {
  int steps = 500;
  double lr = 0.01;  // maximum step size; each step backtracks (halves) until
                     // the weighted loss stops increasing
  bool cosine_decay = true;
  LossWeights weights;
  double class_weight = 1.0;
};

struct FitTraceRow {
  int step = 0;
  double lr = 0.0;
  double pp = 0.0, pl = 0.0, al = 0.0;
  double weighted = 0.0;  // beta * (a_pl pl + a_pp pp + a_al al)
};

struct FitResult {
  PredictionSet predictions;
  std::vector<FitTraceRow> trace;  // one row per step plus the final state
  bool diverged = false;
};

/// Gradient descent on predicted point coordinates under the stage-2 point
/// losses; predictions are re-matched to the ground truth every step.
FitResult fit_points(const PredictionSet& initial, const Scene& gts, const FitOptions& opt);

}  // namespace fastmap
