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

#include "fastmap/fit.hpp"

#include <cmath>
#include <numbers>

namespace fastmap {

namespace {

double weighted_point_loss(const ScenePointLosses& spl, const LossWeights& w) {
  return w.beta * (w.alpha_pl * spl.pl + w.alpha_pp * spl.pp + w.alpha_al * spl.al);
}

FitTraceRow make_row(int step, double lr, const ScenePointLosses& spl, const LossWeights& w) {
  FitTraceRow row;
  row.step = step;
  row.lr = lr;
  row.pp = spl.pp;
  row.pl = spl.pl;
  row.al = spl.al;
  row.weighted = weighted_point_loss(spl, w);
  return row;
}

PredictionSet stepped(const PredictionSet& preds, const ScenePointLosses& spl,
                      const LossWeights& w, double lr) {
  PredictionSet out = preds;
  std::size_t idx = 0;
  for (ScoredInstance& scored : out.instances) {
    for (Point2& p : scored.instance.points) {
      p.x -= lr * w.beta * (w.alpha_pl * spl.grad_pl[idx][0] + w.alpha_pp * spl.grad_pp[idx][0] +
                            w.alpha_al * spl.grad_al[idx][0]);
      p.y -= lr * w.beta * (w.alpha_pl * spl.grad_pl[idx][1] + w.alpha_pp * spl.grad_pp[idx][1] +
                            w.alpha_al * spl.grad_al[idx][1]);
      ++idx;
    }
  }
  return out;
}

}  // namespace

FitResult fit_points(const PredictionSet& initial, const Scene& gts, const FitOptions& opt) {
  if (opt.steps < 0) throw Error("fit_points: steps must be >= 0");
  FitResult result;
  result.predictions = initial;
  const LossWeights& w = opt.weights;

  ScenePointLosses spl = scene_point_losses(result.predictions, gts, opt.class_weight);

  for (int step = 0; step < opt.steps; ++step) {
    double current = weighted_point_loss(spl, w);
    if (!std::isfinite(current)) {
      result.diverged = true;
      return result;
    }
    double lr = opt.cosine_decay
                    ? opt.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * step / opt.steps))
                    : opt.lr;

    // Subgradient steps on these piecewise-linear losses bounce across the
    // kinks near the optimum; halving until the loss stops increasing keeps
    // the trace monotone. A fully rejected step leaves the state unchanged.
    PredictionSet candidate;
    ScenePointLosses candidate_losses;
    bool accepted = false;
    for (int attempt = 0; attempt < 13 && lr > 0.0; ++attempt) {
      candidate = stepped(result.predictions, spl, w, lr);
      candidate_losses = scene_point_losses(candidate, gts, opt.class_weight);
      if (weighted_point_loss(candidate_losses, w) <= current + 1e-15) {
        accepted = true;
        break;
      }
      lr /= 2.0;
    }

    result.trace.push_back(make_row(step, accepted ? lr : 0.0, spl, w));
    if (accepted) {
      result.predictions = std::move(candidate);
      spl = std::move(candidate_losses);
    }
  }

  result.trace.push_back(make_row(opt.steps, 0.0, spl, w));
  if (!std::isfinite(result.trace.back().weighted)) result.diverged = true;
  return result;
}

}  // namespace fastmap
