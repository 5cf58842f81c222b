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
#include <functional>
#include <span>
#include <vector>

#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/matcher.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap {

/// Total-loss coefficients. Point/class/heat weights and alpha_gauss carry
/// the published defaults; gamma and beta are the stage-1/stage-2 weights.
struct LossWeights {
  double alpha_cls = 2.0;
  double alpha_pl = 2.5;
  double alpha_pp = 2.5;
  double alpha_al = 2.5;
  double alpha_heat = 0.6;
  double gamma = 0.5;  // stage-1 weight
  double beta = 1.0;   // stage-2 weight
  double alpha_gauss = 0.8;
  double beta_gauss = 8.0;
};

/// Scalar loss for one (pred, gt) instance pair plus d(loss)/d(pred point).
struct InstanceLoss {
  double value = 0.0;
  std::vector<std::array<double, 2>> grad;  // per pred point, (d/dx, d/dy)
};

/// L1 distance between corresponding start points and end points. Closed
/// instances return 0 with zero gradient: a cycle has no start or end.
/// Subgradient at exact coordinate equality is 0.
InstanceLoss points_points_loss(const MapInstance& pred, const MapInstance& gt);

/// For j = 1..m-2, the perpendicular distance from pred point j to the
/// infinite line through gt segment (j-1, j): |2-D cross| / segment length.
/// Subgradient exactly on the line is 0. `printed_form` switches to the
/// projection-difference variant kept for comparison; it is not a
/// point-to-line distance (nonzero on the line).
InstanceLoss point_line_loss(const MapInstance& pred, const MapInstance& gt,
                             bool printed_form = false);

/// For j = 1..m-2, L1 distance from pred point j to both endpoints of gt
/// segment (j-1, j); confines the point to the segment's span.
InstanceLoss auxiliary_line_loss(const MapInstance& pred, const MapInstance& gt);

struct HeatmapLossResult {
  double value = 0.0;
  std::vector<double> grad;  // d(loss)/d(pred cell), same layout as Heatmap
};

/// Penalty-reduced pixel-wise focal loss against a Gaussian-dilated target:
///   core cells (gt == 1):  -(1-p)^2 log p
///   other cells:           -(1-gt)^4 p^2 log(1-p)
/// each cell scaled by the Gaussian weight field, sum normalized by the
/// number of core cells (at least 1). Pred values must lie strictly in (0,1).
HeatmapLossResult heatmap_focal_loss(const Heatmap& pred, const Heatmap& gt,
                                     const GaussianWeightField& weight);

struct ClassificationLossResult {
  double value = 0.0;
  DenseArray grad;  // n x (kNumClasses + 1), d(loss)/d(logit)
};

/// Softmax focal loss (gamma_f = 2, alpha_f = 0.25) over (kNumClasses+1)-way
/// logits, mean over prediction instances; targets index the gt class or
/// kBackgroundClass for unmatched predictions.
ClassificationLossResult classification_loss(const DenseArray& logits,
                                             const std::vector<int>& targets);

/// Per-prediction class targets from an assignment (background when
/// unmatched).
std::vector<int> classification_targets(const Assignment& assignment, int num_preds,
                                        const Scene& gts);

struct StageLossValues {
  double cls = 0.0;
  double pl = 0.0;
  double pp = 0.0;
  double al = 0.0;
};

struct LossBreakdown {
  StageLossValues stage1, stage2;
  double heat = 0.0;
  double total = 0.0;
  /// d(total)/d(pred point) per stage, flattened instance-major; filled by
  /// scene-level drivers, empty when only scalars were composed.
  std::vector<std::array<double, 2>> point_grads_stage1, point_grads_stage2;
  std::vector<double> heat_grad;
};

/// Weighted sum of the stage components and the heatmap term:
///   gamma * (a_cls L1_cls + a_pl L1_pl + a_pp L1_pp + a_al L1_al)
/// + beta  * (a_cls L2_cls + a_pl L2_pl + a_pp L2_pp + a_al L2_al)
/// + a_heat * L_heat
LossBreakdown total_loss(const StageLossValues& stage1, const StageLossValues& stage2,
                         double heat, const LossWeights& w);

/// Point-loss terms of one stage over a whole scene: matches predictions to
/// ground truth, applies the chosen gt permutations, and sums the three
/// point losses over matched pairs. Gradients are unweighted per-term sums,
/// laid out pred instance-major (index i*m + k).
struct ScenePointLosses {
  double pp = 0.0, pl = 0.0, al = 0.0;
  std::vector<std::array<double, 2>> grad_pp, grad_pl, grad_al;
  Assignment assignment;
};

ScenePointLosses scene_point_losses(const PredictionSet& preds, const Scene& gts,
                                    double class_weight = 1.0, bool printed_form = false);

// ---------------------------------------------------------------------------
// Finite-difference verification

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
  int excluded = 0;
};

/// Central differences (f(x+eps) - f(x-eps)) / 2 eps per coordinate against
/// an analytic gradient. Coordinates failing `exclude` or with analytic
/// magnitude <= 1e-8 are skipped.
GradCheckResult finite_difference_check(
    const std::function<double(std::span<const double>)>& f, std::span<const double> x,
    std::span<const double> analytic, double eps,
    const std::function<bool(std::size_t)>& exclude = {});

// Per-loss drivers with the documented non-smooth-locus exclusions
// (L1 kinks where a pred coordinate meets its target, on-line loci for the
// point-line loss, probabilities within 10 eps of {0,1} for the focal loss).
GradCheckResult gradcheck_points_points(const MapInstance& pred, const MapInstance& gt,
                                        double eps);
GradCheckResult gradcheck_point_line(const MapInstance& pred, const MapInstance& gt,
                                     double eps);
GradCheckResult gradcheck_auxiliary_line(const MapInstance& pred, const MapInstance& gt,
                                         double eps);
GradCheckResult gradcheck_heatmap_focal(const Heatmap& pred, const Heatmap& gt,
                                        const GaussianWeightField& weight, double eps);
GradCheckResult gradcheck_classification(const DenseArray& logits,
                                         const std::vector<int>& targets, double eps);

}  // namespace fastmap
