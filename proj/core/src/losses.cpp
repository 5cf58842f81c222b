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

#include "fastmap/losses.hpp"

#include <algorithm>
#include <cmath>

namespace fastmap {

namespace {

constexpr double kFocalGamma = 2.0;
constexpr double kFocalAlpha = 0.25;

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_m(const MapInstance& pred, const MapInstance& gt) {
  if (pred.num_points() != gt.num_points())
    throw ShapeError("loss: pred and gt point counts differ");
}

}  // namespace

InstanceLoss points_points_loss(const MapInstance& pred, const MapInstance& gt) {
  require_same_m(pred, gt);
  InstanceLoss out;
  out.grad.assign(pred.points.size(), {0.0, 0.0});
  if (pred.closed || gt.closed) return out;  // no start/end on a cycle

  const int m = pred.num_points();
  for (int j : {0, m - 1}) {
    const Point2 p = pred.points[j];
    const Point2 g = gt.points[j];
    out.value += l1_dist(p, g);
    out.grad[j][0] += sign0(p.x - g.x);
    out.grad[j][1] += sign0(p.y - g.y);
  }
  return out;
}

InstanceLoss point_line_loss(const MapInstance& pred, const MapInstance& gt,
                             bool printed_form) {
  require_same_m(pred, gt);
  const int m = pred.num_points();
  InstanceLoss out;
  out.grad.assign(m, {0.0, 0.0});

  for (int j = 1; j <= m - 2; ++j) {
    const Point2 p = pred.points[j];
    const Point2 g0 = gt.points[j - 1];
    const Point2 g1 = gt.points[j];
    const double ex = g1.x - g0.x, ey = g1.y - g0.y;
    const double len = std::hypot(ex, ey);
    if (len <= 1e-12) throw DegenerateGeometryError("point_line_loss: zero-length gt segment");

    if (printed_form) {
      const double inner = ((p.x - g0.x) * ex - (p.y - g0.y) * ey) / len;
      const double s = sign0(inner);
      out.value += std::abs(inner);
      out.grad[j][0] += s * ex / len;
      out.grad[j][1] += -s * ey / len;
    } else {
      const double cross = (p.x - g0.x) * ey - (p.y - g0.y) * ex;
      const double s = sign0(cross);
      out.value += std::abs(cross) / len;
      out.grad[j][0] += s * ey / len;
      out.grad[j][1] += -s * ex / len;
    }
  }
  return out;
}

InstanceLoss auxiliary_line_loss(const MapInstance& pred, const MapInstance& gt) {
  require_same_m(pred, gt);
  const int m = pred.num_points();
  InstanceLoss out;
  out.grad.assign(m, {0.0, 0.0});

  for (int j = 1; j <= m - 2; ++j) {
    const Point2 p = pred.points[j];
    for (const Point2& g : {gt.points[j], gt.points[j - 1]}) {
      out.value += l1_dist(p, g);
      out.grad[j][0] += sign0(p.x - g.x);
      out.grad[j][1] += sign0(p.y - g.y);
    }
  }
  return out;
}

HeatmapLossResult heatmap_focal_loss(const Heatmap& pred, const Heatmap& gt,
                                     const GaussianWeightField& weight) {
  if (pred.channels != gt.channels || pred.h != gt.h || pred.w != gt.w)
    throw ShapeError("heatmap_focal_loss: pred/gt shape mismatch");
  if (weight.h != pred.h || weight.w != pred.w)
    throw ShapeError("heatmap_focal_loss: weight field shape mismatch");

  std::size_t n_core = 0;
  for (double g : gt.values)
    if (g == 1.0) ++n_core;
  const double norm = static_cast<double>(std::max<std::size_t>(n_core, 1));

  HeatmapLossResult out;
  out.grad.assign(pred.values.size(), 0.0);

  for (int c = 0; c < pred.channels; ++c) {
    for (int r = 0; r < pred.h; ++r) {
      for (int col = 0; col < pred.w; ++col) {
        const std::size_t i = pred.idx(c, r, col);
        const double p = pred.values[i];
        if (p <= 0.0 || p >= 1.0)
          throw Error("heatmap_focal_loss: pred values must lie strictly in (0,1)");
        const double g = gt.values[i];
        const double w = weight.at(r, col);
        double term, dterm;
        if (g == 1.0) {
          const double q = 1.0 - p;
          term = -q * q * std::log(p);
          dterm = 2.0 * q * std::log(p) - q * q / p;
        } else {
          const double k = std::pow(1.0 - g, 4.0);
          term = -k * p * p * std::log1p(-p);
          dterm = -k * (2.0 * p * std::log1p(-p) - p * p / (1.0 - p));
        }
        out.value += w * term / norm;
        out.grad[i] = w * dterm / norm;
      }
    }
  }
  return out;
}

ClassificationLossResult classification_loss(const DenseArray& logits,
                                             const std::vector<int>& targets) {
  ClassificationLossResult out;
  if (logits.size() == 0 && targets.empty()) return out;
  if (logits.rank() != 2 || logits.dim(1) != kNumClasses + 1)
    throw ShapeError("classification_loss: logits must be n x (C+1)");
  const int n = logits.dim(0);
  if (static_cast<int>(targets.size()) != n)
    throw ShapeError("classification_loss: target count mismatch");

  out.grad = DenseArray({n, kNumClasses + 1});
  const int cols = kNumClasses + 1;

  for (int i = 0; i < n; ++i) {
    const int t = targets[i];
    if (t < 0 || t > kNumClasses) throw IndexError("classification_loss: bad target class");

    std::array<double, kNumClasses + 1> p{};
    const auto row = logits.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (int k = 0; k < cols; ++k) {
      p[k] = std::exp(row[k] - mx);
      sum += p[k];
    }
    for (int k = 0; k < cols; ++k) p[k] /= sum;

    const double pt = p[t];
    const double q = 1.0 - pt;
    out.value += -kFocalAlpha * q * q * std::log(pt) / n;
    // dL/dpt, then chain through the softmax jacobian.
    const double dl_dpt = kFocalAlpha * (kFocalGamma * q * std::log(pt) - q * q / pt);
    for (int k = 0; k < cols; ++k) {
      const double dpt_dzk = pt * ((k == t ? 1.0 : 0.0) - p[k]);
      out.grad.at2(i, k) = dl_dpt * dpt_dzk / n;
    }
  }
  return out;
}

std::vector<int> classification_targets(const Assignment& assignment, int num_preds,
                                        const Scene& gts) {
  std::vector<int> targets(num_preds, kBackgroundClass);
  for (const MatchedPair& pair : assignment.pairs)
    targets[pair.pred] = static_cast<int>(gts.instances[pair.gt].cls);
  return targets;
}

LossBreakdown total_loss(const StageLossValues& stage1, const StageLossValues& stage2,
                         double heat, const LossWeights& w) {
  LossBreakdown out;
  out.stage1 = stage1;
  out.stage2 = stage2;
  out.heat = heat;
  const auto stage_sum = [&](const StageLossValues& s) {
    return w.alpha_cls * s.cls + w.alpha_pl * s.pl + w.alpha_pp * s.pp + w.alpha_al * s.al;
  };
  out.total = w.gamma * stage_sum(stage1) + w.beta * stage_sum(stage2) + w.alpha_heat * heat;
  return out;
}

ScenePointLosses scene_point_losses(const PredictionSet& preds, const Scene& gts,
                                    double class_weight, bool printed_form) {
  ScenePointLosses out;
  out.assignment = match_instances(preds, gts, class_weight);

  int m = 0;
  for (const auto& p : preds.instances) m = p.instance.num_points();
  const std::size_t total = preds.instances.size() * static_cast<std::size_t>(m);
  out.grad_pp.assign(total, {0.0, 0.0});
  out.grad_pl.assign(total, {0.0, 0.0});
  out.grad_al.assign(total, {0.0, 0.0});

  for (const MatchedPair& pair : out.assignment.pairs) {
    const MapInstance& pred = preds.instances[pair.pred].instance;
    const MapInstance gt =
        apply_permutation(gts.instances[pair.gt], point_permutations(gts.instances[pair.gt])[pair.perm]);

    const InstanceLoss pp = points_points_loss(pred, gt);
    const InstanceLoss pl = point_line_loss(pred, gt, printed_form);
    const InstanceLoss al = auxiliary_line_loss(pred, gt);
    out.pp += pp.value;
    out.pl += pl.value;
    out.al += al.value;
    const std::size_t base = static_cast<std::size_t>(pair.pred) * m;
    for (int k = 0; k < m; ++k) {
      out.grad_pp[base + k][0] += pp.grad[k][0];
      out.grad_pp[base + k][1] += pp.grad[k][1];
      out.grad_pl[base + k][0] += pl.grad[k][0];
      out.grad_pl[base + k][1] += pl.grad[k][1];
      out.grad_al[base + k][0] += al.grad[k][0];
      out.grad_al[base + k][1] += al.grad[k][1];
    }
  }
  return out;
}

GradCheckResult finite_difference_check(
    const std::function<double(std::span<const double>)>& f, std::span<const double> x,
    std::span<const double> analytic, double eps,
    const std::function<bool(std::size_t)>& exclude) {
  if (x.size() != analytic.size())
    throw ShapeError("finite_difference_check: gradient size mismatch");
  std::vector<double> buf(x.begin(), x.end());
  GradCheckResult out;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (exclude && exclude(i)) {
      ++out.excluded;
      continue;
    }
    const double saved = buf[i];
    buf[i] = saved + eps;
    const double fp = f(buf);
    buf[i] = saved - eps;
    const double fm = f(buf);
    buf[i] = saved;
    if (std::abs(analytic[i]) <= 1e-8) continue;
    const double fd = (fp - fm) / (2.0 * eps);
    out.max_rel_err = std::max(out.max_rel_err, std::abs(fd - analytic[i]) / std::abs(analytic[i]));
    ++out.checked;
  }
  return out;
}

namespace {

// Shared packing for the three point losses: x = flattened pred coordinates.
GradCheckResult gradcheck_point_loss(
    const MapInstance& pred, const MapInstance& gt,
    const std::function<InstanceLoss(const MapInstance&, const MapInstance&)>& op, double eps,
    const std::function<bool(std::size_t)>& exclude) {
  const int m = pred.num_points();
  std::vector<double> x(2 * m);
  for (int j = 0; j < m; ++j) {
    x[2 * j] = pred.points[j].x;
    x[2 * j + 1] = pred.points[j].y;
  }
  const InstanceLoss at_x = op(pred, gt);
  std::vector<double> analytic(2 * m);
  for (int j = 0; j < m; ++j) {
    analytic[2 * j] = at_x.grad[j][0];
    analytic[2 * j + 1] = at_x.grad[j][1];
  }
  const auto f = [&](std::span<const double> coords) {
    MapInstance moved = pred;
    for (int j = 0; j < m; ++j) moved.points[j] = {coords[2 * j], coords[2 * j + 1]};
    return op(moved, gt).value;
  };
  return finite_difference_check(f, x, analytic, eps, exclude);
}

}  // namespace

GradCheckResult gradcheck_points_points(const MapInstance& pred, const MapInstance& gt,
                                        double eps) {
  const int m = pred.num_points();
  const auto exclude = [&](std::size_t i) {
    const int j = static_cast<int>(i / 2);
    if (j != 0 && j != m - 1) return false;
    const double pv = i % 2 == 0 ? pred.points[j].x : pred.points[j].y;
    const double gv = i % 2 == 0 ? gt.points[j].x : gt.points[j].y;
    return std::abs(pv - gv) < 10.0 * eps;
  };
  return gradcheck_point_loss(
      pred, gt, [](const MapInstance& p, const MapInstance& g) { return points_points_loss(p, g); },
      eps, exclude);
}

GradCheckResult gradcheck_point_line(const MapInstance& pred, const MapInstance& gt,
                                     double eps) {
  const int m = pred.num_points();
  const auto exclude = [&](std::size_t i) {
    const int j = static_cast<int>(i / 2);
    if (j < 1 || j > m - 2) return false;
    const Point2 p = pred.points[j];
    const Point2 g0 = gt.points[j - 1], g1 = gt.points[j];
    const double len = std::hypot(g1.x - g0.x, g1.y - g0.y);
    const double cross = (p.x - g0.x) * (g1.y - g0.y) - (p.y - g0.y) * (g1.x - g0.x);
    return std::abs(cross) / len < 10.0 * eps;
  };
  return gradcheck_point_loss(
      pred, gt, [](const MapInstance& p, const MapInstance& g) { return point_line_loss(p, g); },
      eps, exclude);
}

GradCheckResult gradcheck_auxiliary_line(const MapInstance& pred, const MapInstance& gt,
                                         double eps) {
  const int m = pred.num_points();
  const auto exclude = [&](std::size_t i) {
    const int j = static_cast<int>(i / 2);
    if (j < 1 || j > m - 2) return false;
    const double pv = i % 2 == 0 ? pred.points[j].x : pred.points[j].y;
    for (const Point2& g : {gt.points[j], gt.points[j - 1]}) {
      const double gv = i % 2 == 0 ? g.x : g.y;
      if (std::abs(pv - gv) < 10.0 * eps) return true;
    }
    return false;
  };
  return gradcheck_point_loss(
      pred, gt,
      [](const MapInstance& p, const MapInstance& g) { return auxiliary_line_loss(p, g); }, eps,
      exclude);
}

GradCheckResult gradcheck_heatmap_focal(const Heatmap& pred, const Heatmap& gt,
                                        const GaussianWeightField& weight, double eps) {
  const HeatmapLossResult at_x = heatmap_focal_loss(pred, gt, weight);
  const auto f = [&](std::span<const double> values) {
    Heatmap moved = pred;
    moved.values.assign(values.begin(), values.end());
    return heatmap_focal_loss(moved, gt, weight).value;
  };
  const auto exclude = [&](std::size_t i) {
    return pred.values[i] < 10.0 * eps || pred.values[i] > 1.0 - 10.0 * eps;
  };
  return finite_difference_check(f, pred.values, at_x.grad, eps, exclude);
}

GradCheckResult gradcheck_classification(const DenseArray& logits,
                                         const std::vector<int>& targets, double eps) {
  const ClassificationLossResult at_x = classification_loss(logits, targets);
  const auto f = [&](std::span<const double> values) {
    DenseArray moved(logits.shape(), std::vector<double>(values.begin(), values.end()));
    return classification_loss(moved, targets).value;
  };
  return finite_difference_check(f, logits.values(), at_x.grad.values(), eps);
}

}  // namespace fastmap
