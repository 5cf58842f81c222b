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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastmap/decoder.hpp"
#include "fastmap/fit.hpp"
#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/losses.hpp"
#include "fastmap/metrics.hpp"
#include "fastmap/rng.hpp"
#include "fastmap/sampler.hpp"
#include "fastmap/serialize.hpp"
#include "fastmap/svg.hpp"
#include "fastmap/synth.hpp"

namespace fm = fastmap;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

/// Thrown for NaN/divergence conditions that map to exit code 3.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifestScope {
  std::string command;
  json config = json::object();
  std::vector<std::string> inputs, outputs;
  std::optional<std::uint64_t> seed;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  explicit ManifestScope(std::string cmd) : command(std::move(cmd)) {}

  // One manifest next to the primary output, listing every artifact.
  void write() const {
    if (outputs.empty()) return;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    json m{{"command", command},
           {"config", config},
           {"inputs", inputs},
           {"outputs", outputs},
           {"duration_ms", ms}};
    m["seed"] = seed ? json(*seed) : json(nullptr);
    fm::write_json_file(outputs.front() + ".manifest.json", m);
  }
};

fm::Scene load_scene(const std::string& path) {
  fm::Scene scene = fm::scene_from_json(fm::read_json_file(path));
  fm::validate_scene(scene);
  return scene;
}

fm::PredictionSet load_predictions(const std::string& path) {
  return fm::predictions_from_json(fm::read_json_file(path));
}

fm::BevGridSpec spec_for(const fm::BevRange& range, double res) {
  return fm::BevGridSpec::from_resolution(range, res);
}

int require_common_m(const fm::PredictionSet& preds, const fm::Scene& gts) {
  int m = -1;
  const auto check = [&](const fm::MapInstance& inst, const char* which) {
    if (m < 0) m = inst.num_points();
    if (inst.num_points() != m)
      throw fm::ShapeError(std::string(which) + " instances disagree on the point count m");
  };
  for (const auto& p : preds.instances) check(p.instance, "prediction");
  for (const auto& g : gts.instances) check(g, "ground-truth");
  return m;
}

json breakdown_to_json(const fm::LossBreakdown& b, const fm::LossWeights& w) {
  const auto stage = [](const fm::StageLossValues& s) {
    return json{{"cls", s.cls}, {"pl", s.pl}, {"pp", s.pp}, {"al", s.al}};
  };
  return json{{"stage1", stage(b.stage1)},
              {"stage2", stage(b.stage2)},
              {"heat", b.heat},
              {"total", b.total},
              {"weights",
               {{"alpha_cls", w.alpha_cls},
                {"alpha_pl", w.alpha_pl},
                {"alpha_pp", w.alpha_pp},
                {"alpha_al", w.alpha_al},
                {"alpha_heat", w.alpha_heat},
                {"gamma", w.gamma},
                {"beta", w.beta},
                {"alpha_gauss", w.alpha_gauss},
                {"beta_gauss", w.beta_gauss}}}};
}

void add_weight_flags(CLI::App* cmd, fm::LossWeights& w) {
  cmd->add_option("--alpha-cls", w.alpha_cls, "Classification loss weight");
  cmd->add_option("--alpha-pl", w.alpha_pl, "Point-line loss weight");
  cmd->add_option("--alpha-pp", w.alpha_pp, "Points-points loss weight");
  cmd->add_option("--alpha-al", w.alpha_al, "Auxiliary line loss weight");
  cmd->add_option("--alpha-heat", w.alpha_heat, "Heatmap loss weight");
  cmd->add_option("--gamma", w.gamma, "Stage-1 weight");
  cmd->add_option("--beta", w.beta, "Stage-2 weight");
  cmd->add_option("--alpha-gauss", w.alpha_gauss, "Gaussian weight amplitude");
  cmd->add_option("--beta-gauss", w.beta_gauss, "Gaussian weight sharpness");
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::uint64_t seed = 42;
  int dividers = 2, crossings = 1, boundaries = 2;
  int m = 8;
  double curv_min = 0.0, curv_max = 0.05;
  std::string out;
};

void run_gen(const GenArgs& a) {
  ManifestScope manifest("gen");
  manifest.seed = a.seed;
  manifest.config = {{"dividers", a.dividers}, {"crossings", a.crossings},
                     {"boundaries", a.boundaries}, {"m", a.m},
                     {"curvature_min", a.curv_min}, {"curvature_max", a.curv_max}};

  fm::SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.num_dividers = a.dividers;
  cfg.num_crossings = a.crossings;
  cfg.num_boundaries = a.boundaries;
  cfg.m = a.m;
  cfg.curvature_min = a.curv_min;
  cfg.curvature_max = a.curv_max;

  fm::write_json_file(a.out, fm::scene_to_json(fm::generate_scene(cfg)));
  manifest.outputs.push_back(a.out);
  manifest.write();
}

// ---------------------------------------------------------------------------
// rasterize

struct RasterizeArgs {
  std::string scene;
  std::string out;
  std::string svg;
  std::string weight_field;
  double res = 0.3;
  int kernel = 3;
  double sigma = 0.0;
  double alpha_gauss = 0.8;
  double beta_gauss = 8.0;
};

void run_rasterize(const RasterizeArgs& a) {
  ManifestScope manifest("rasterize");
  manifest.config = {{"res", a.res}, {"kernel", a.kernel}, {"sigma", a.sigma}};
  manifest.inputs.push_back(a.scene);

  const fm::Scene scene = load_scene(a.scene);
  const fm::BevGridSpec spec = spec_for(scene.range, a.res);
  const fm::Heatmap hm = fm::rasterize_gt(scene, spec, a.kernel, a.sigma);
  fm::write_heatmap(a.out, hm);
  manifest.outputs.push_back(a.out);

  if (!a.svg.empty()) {
    fm::SvgOptions opt;
    opt.heatmap = &hm;
    opt.heatmap_spec = &spec;
    fm::write_text_file(a.svg, fm::render_svg(&scene, nullptr, scene.range, opt));
    manifest.outputs.push_back(a.svg);
  }
  if (!a.weight_field.empty()) {
    fm::write_weight_field(a.weight_field,
                           fm::gaussian_weight_field(spec, a.alpha_gauss, a.beta_gauss));
    manifest.outputs.push_back(a.weight_field);
  }
  manifest.write();
}

// ---------------------------------------------------------------------------
// forward

struct ForwardArgs {
  std::string scene;  // optional positional
  std::string bev;
  std::string out;
  std::string dump_heatmap, dump_priors, dump_weights, dump_stage1;
  std::uint64_t seed = 42;
  fm::DecoderConfig cfg;
  double tau = 0.1;
  double res = 0.3;
  bool paper_scale = false;
};

void run_forward(const ForwardArgs& a) {
  ManifestScope manifest("forward");
  manifest.seed = a.seed;

  fm::DecoderConfig cfg = a.cfg;
  cfg.seed = a.seed;
  if (a.paper_scale) cfg.num_priors = 3500;
  manifest.config = {{"n", cfg.n},       {"m", cfg.m},
                     {"d", cfg.d},       {"heads", cfg.heads},
                     {"sample_points", cfg.sample_points},
                     {"M", cfg.num_priors}, {"tau", a.tau},
                     {"res", a.res},     {"offset_scale", cfg.offset_scale}};

  fm::BevRange range;
  fm::DenseArray f_bev;
  if (!a.bev.empty()) {
    manifest.inputs.push_back(a.bev);
    f_bev = fm::read_bev(a.bev);
    const fm::BevGridSpec spec = spec_for(range, a.res);
    if (f_bev.dim(0) != cfg.d || f_bev.dim(1) != spec.h || f_bev.dim(2) != spec.w)
      throw fm::ShapeError("provided BEV block does not match --d/--res grid shape");
  } else if (!a.scene.empty()) {
    manifest.inputs.push_back(a.scene);
    const fm::Scene scene = load_scene(a.scene);
    range = scene.range;
    const fm::BevGridSpec spec = spec_for(range, a.res);
    // Lift the rasterized ground-truth heatmap into d channels with a seeded
    // projection, so the synthetic BEV features carry the scene's geometry.
    const fm::Heatmap hm = fm::rasterize_gt(scene, spec, 3);
    fm::SplitMix64 rng(a.seed ^ 0x6C69667433746F64ULL);
    fm::DenseArray lift({fm::kNumClasses, cfg.d});
    const double bound = 1.0 / std::sqrt(static_cast<double>(fm::kNumClasses));
    for (double& v : lift.values()) v = rng.next_uniform(-bound, bound);
    f_bev = fm::DenseArray({cfg.d, spec.h, spec.w});
    for (int c = 0; c < cfg.d; ++c)
      for (int r = 0; r < spec.h; ++r)
        for (int col = 0; col < spec.w; ++col) {
          double acc = 0.0;
          for (int k = 0; k < fm::kNumClasses; ++k)
            acc += hm.at(k, r, col) * lift.at2(k, c);
          f_bev.at3(c, r, col) = acc;
        }
  } else {
    const fm::BevGridSpec spec = spec_for(range, a.res);
    f_bev = fm::synth_bev_features(cfg.d, spec, a.seed);
  }

  const fm::BevGridSpec spec = spec_for(range, a.res);
  const fm::DecoderWeights weights = fm::DecoderWeights::seeded(cfg);
  const fm::PipelineResult result = fm::pipeline_forward(f_bev, weights, cfg, spec, a.tau);

  fm::write_json_file(a.out, fm::predictions_to_json(result.predictions));
  manifest.outputs.push_back(a.out);
  if (!a.dump_heatmap.empty()) {
    fm::write_heatmap(a.dump_heatmap, result.heatmap);
    manifest.outputs.push_back(a.dump_heatmap);
  }
  if (!a.dump_priors.empty()) {
    fm::write_priors(a.dump_priors, result.priors);
    manifest.outputs.push_back(a.dump_priors);
  }
  if (!a.dump_weights.empty()) {
    fm::write_weights(a.dump_weights, weights);
    manifest.outputs.push_back(a.dump_weights);
  }
  if (!a.dump_stage1.empty()) {
    fm::write_json_file(a.dump_stage1,
                        fm::predictions_to_json(fm::stage_predictions(result.coarse, cfg, spec)));
    manifest.outputs.push_back(a.dump_stage1);
  }
  manifest.write();
}

// ---------------------------------------------------------------------------
// loss

struct LossArgs {
  std::string preds, gts;
  std::string stage1_preds;
  std::string pred_heatmap;
  std::string out;
  std::string dump_matching, dump_grads;
  fm::LossWeights weights;
  double class_weight = 1.0;
  double res = 0.3;
  int kernel = 3;
  double sigma = 0.0;
  bool gradcheck = false;
  bool printed_point_line = false;
};

fm::StageLossValues stage_values(const fm::ScenePointLosses& spl, const fm::PredictionSet& preds,
                                 const fm::Scene& gts) {
  fm::StageLossValues values;
  values.pp = spl.pp;
  values.pl = spl.pl;
  values.al = spl.al;
  if (preds.instances.empty()) return values;  // empty sums throughout
  fm::DenseArray logits({static_cast<int>(preds.instances.size()), fm::kNumClasses + 1});
  for (std::size_t i = 0; i < preds.instances.size(); ++i)
    for (int c = 0; c < fm::kNumClasses + 1; ++c) logits.at2(static_cast<int>(i), c) =
        preds.instances[i].logits[c];
  values.cls = fm::classification_loss(
                   logits, fm::classification_targets(spl.assignment,
                                                      static_cast<int>(preds.instances.size()), gts))
                   .value;
  return values;
}

double scene_gradcheck(const fm::PredictionSet& preds, const fm::Scene& gts,
                       const fm::Assignment& assignment) {
  double worst = 0.0;
  if (preds.instances.empty()) return worst;
  const double eps = 1e-6;
  for (const fm::MatchedPair& pair : assignment.pairs) {
    const fm::MapInstance& pred = preds.instances[pair.pred].instance;
    const fm::MapInstance gt = fm::apply_permutation(
        gts.instances[pair.gt], fm::point_permutations(gts.instances[pair.gt])[pair.perm]);
    worst = std::max(worst, fm::gradcheck_points_points(pred, gt, eps).max_rel_err);
    worst = std::max(worst, fm::gradcheck_point_line(pred, gt, eps).max_rel_err);
    worst = std::max(worst, fm::gradcheck_auxiliary_line(pred, gt, eps).max_rel_err);
  }
  fm::DenseArray logits({static_cast<int>(preds.instances.size()), fm::kNumClasses + 1});
  for (std::size_t i = 0; i < preds.instances.size(); ++i)
    for (int c = 0; c < fm::kNumClasses + 1; ++c)
      logits.at2(static_cast<int>(i), c) = preds.instances[i].logits[c];
  const auto targets =
      fm::classification_targets(assignment, static_cast<int>(preds.instances.size()), gts);
  worst = std::max(worst, fm::gradcheck_classification(logits, targets, eps).max_rel_err);
  return worst;
}

void run_loss(const LossArgs& a) {
  ManifestScope manifest("loss");
  manifest.inputs = {a.preds, a.gts};

  const fm::PredictionSet preds = load_predictions(a.preds);
  const fm::Scene gts = load_scene(a.gts);
  require_common_m(preds, gts);

  const fm::ScenePointLosses stage2 =
      fm::scene_point_losses(preds, gts, a.class_weight, a.printed_point_line);
  fm::StageLossValues s2 = stage_values(stage2, preds, gts);

  fm::StageLossValues s1;
  if (!a.stage1_preds.empty()) {
    manifest.inputs.push_back(a.stage1_preds);
    const fm::PredictionSet preds1 = load_predictions(a.stage1_preds);
    require_common_m(preds1, gts);
    s1 = stage_values(fm::scene_point_losses(preds1, gts, a.class_weight, a.printed_point_line),
                      preds1, gts);
  }

  double heat = 0.0;
  std::vector<double> heat_grad;
  if (!a.pred_heatmap.empty()) {
    manifest.inputs.push_back(a.pred_heatmap);
    const fm::Heatmap pred_hm = fm::read_heatmap(a.pred_heatmap);
    const fm::BevGridSpec spec = spec_for(gts.range, a.res);
    if (pred_hm.h != spec.h || pred_hm.w != spec.w)
      throw fm::ShapeError("predicted heatmap does not match --res grid shape");
    const fm::Heatmap gt_hm = fm::rasterize_gt(gts, spec, a.kernel, a.sigma);
    const fm::GaussianWeightField field =
        fm::gaussian_weight_field(spec, a.weights.alpha_gauss, a.weights.beta_gauss);
    const fm::HeatmapLossResult hl = fm::heatmap_focal_loss(pred_hm, gt_hm, field);
    heat = hl.value;
    heat_grad = hl.grad;
  }

  fm::LossBreakdown breakdown = fm::total_loss(s1, s2, heat, a.weights);
  breakdown.heat_grad = std::move(heat_grad);
  breakdown.point_grads_stage2.resize(stage2.grad_pl.size());
  for (std::size_t i = 0; i < stage2.grad_pl.size(); ++i)
    for (int axis = 0; axis < 2; ++axis)
      breakdown.point_grads_stage2[i][axis] =
          a.weights.beta * (a.weights.alpha_pl * stage2.grad_pl[i][axis] +
                            a.weights.alpha_pp * stage2.grad_pp[i][axis] +
                            a.weights.alpha_al * stage2.grad_al[i][axis]);

  json out = breakdown_to_json(breakdown, a.weights);
  if (a.gradcheck) out["gradcheck_max_rel_err"] = scene_gradcheck(preds, gts, stage2.assignment);

  if (!a.out.empty()) {
    fm::write_json_file(a.out, out);
    manifest.outputs.push_back(a.out);
  }
  if (!a.dump_matching.empty()) {
    json pairs = json::array();
    for (const fm::MatchedPair& p : stage2.assignment.pairs)
      pairs.push_back({{"pred", p.pred}, {"gt", p.gt}, {"perm", p.perm}, {"cost", p.cost}});
    fm::write_json_file(a.dump_matching,
                        {{"pairs", pairs},
                         {"unmatched_preds", stage2.assignment.unmatched_preds},
                         {"unmatched_gts", stage2.assignment.unmatched_gts}});
    manifest.outputs.push_back(a.dump_matching);
  }
  if (!a.dump_grads.empty()) {
    fm::Container c{"FMHM", 1,
                    static_cast<std::uint32_t>(breakdown.point_grads_stage2.size()), 2, {}};
    for (const auto& g : breakdown.point_grads_stage2) {
      c.values.push_back(static_cast<float>(g[0]));
      c.values.push_back(static_cast<float>(g[1]));
    }
    fm::write_container(a.dump_grads, c);
    manifest.outputs.push_back(a.dump_grads);
  }
  manifest.config = out["weights"];
  manifest.write();
  std::printf("%s\n", out.dump(2).c_str());
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string preds, gts;
  std::string out;
  std::string trace;
  int steps = 500;
  double lr = 0.01;
  std::string decay = "cosine";
  double class_weight = 1.0;
  fm::LossWeights weights;
};

void run_fit(const FitArgs& a) {
  ManifestScope manifest("fit");
  manifest.inputs = {a.preds, a.gts};
  manifest.config = {{"steps", a.steps}, {"lr", a.lr}, {"decay", a.decay}};

  const fm::PredictionSet preds = load_predictions(a.preds);
  const fm::Scene gts = load_scene(a.gts);
  require_common_m(preds, gts);

  fm::FitOptions opt;
  opt.steps = a.steps;
  opt.lr = a.lr;
  opt.cosine_decay = a.decay != "none";
  opt.weights = a.weights;
  opt.class_weight = a.class_weight;

  const fm::FitResult result = fm::fit_points(preds, gts, opt);
  if (result.diverged) throw NumericFailure("fit diverged (non-finite loss)");

  fm::write_json_file(a.out, fm::predictions_to_json(result.predictions));
  manifest.outputs.push_back(a.out);

  if (!a.trace.empty()) {
    std::string csv = "step,lr,pp,pl,al,weighted\n";
    char buf[160];
    for (const fm::FitTraceRow& row : result.trace) {
      std::snprintf(buf, sizeof(buf), "%d,%.8f,%.9f,%.9f,%.9f,%.9f\n", row.step, row.lr, row.pp,
                    row.pl, row.al, row.weighted);
      csv += buf;
    }
    fm::write_text_file(a.trace, csv);
    manifest.outputs.push_back(a.trace);
  }
  manifest.write();
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string preds, gts;
  std::string set_id = "standard";
  std::string out;
  std::string pr_csv;
  int densify = 100;
  bool quiet = false;
};

void run_eval(const EvalArgs& a) {
  ManifestScope manifest("eval");
  manifest.inputs = {a.preds, a.gts};
  manifest.config = {{"set", a.set_id}, {"densify", a.densify}};

  const fm::PredictionSet preds = load_predictions(a.preds);
  const fm::Scene gts = load_scene(a.gts);

  const std::vector<double>& thresholds =
      a.set_id == "strict" ? fm::kStrictThresholds : fm::kStandardThresholds;
  const fm::ApReport report = fm::average_precision(preds, gts, thresholds, a.densify, a.set_id);
  const fm::DiagnosticsReport diag =
      fm::diagnostics(preds, gts, thresholds.back(), a.densify);

  json out{{"set", report.set_id},
           {"thresholds", report.thresholds},
           {"map", report.map},
           {"acd", diag.acd},
           {"ard", diag.ard},
           {"ajp", diag.ajp},
           {"matched_pairs", diag.matched_pairs}};
  const char* names[fm::kNumClasses] = {"divider", "ped_crossing", "boundary"};
  for (int c = 0; c < fm::kNumClasses; ++c) {
    if (!report.class_present[c]) continue;
    out["ap"][names[c]] = report.ap[c];
    out["ap_per_threshold"][names[c]] = report.ap_per_threshold[c];
  }

  if (!a.quiet) {
    std::printf("set=%s thresholds=[", report.set_id.c_str());
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      std::printf("%s%.1f", t ? "," : "", thresholds[t]);
    std::printf("]\n%-10s %8s %8s %8s %8s\n", "", "AP_div", "AP_ped", "AP_bou", "mAP");
    std::printf("%-10s", "AP");
    for (int c = 0; c < fm::kNumClasses; ++c) {
      if (report.class_present[c])
        std::printf(" %8.4f", report.ap[c]);
      else
        std::printf(" %8s", "-");
    }
    std::printf(" %8.4f\n", report.map);
    std::printf("ACD %.4f m  ARD %.4f rad  AJP %.2f  (matched %d)\n", diag.acd, diag.ard,
                diag.ajp, diag.matched_pairs);
  }

  if (!a.pr_csv.empty()) {
    std::string csv = "class,threshold,rank,score,tp,precision,recall\n";
    char buf[160];
    for (int c = 0; c < fm::kNumClasses; ++c) {
      for (double t : thresholds) {
        for (const fm::PrPoint& p :
             fm::pr_curve(preds, gts, static_cast<fm::MapClass>(c), t, a.densify)) {
          std::snprintf(buf, sizeof(buf), "%s,%.2f,%d,%.6f,%d,%.6f,%.6f\n", names[c], t, p.rank,
                        p.score, p.tp ? 1 : 0, p.precision, p.recall);
          csv += buf;
        }
      }
    }
    fm::write_text_file(a.pr_csv, csv);
    manifest.outputs.push_back(a.pr_csv);
  }
  if (!a.out.empty()) {
    fm::write_json_file(a.out, out);
    // Keep the JSON report first so the manifest lands beside it.
    manifest.outputs.insert(manifest.outputs.begin(), a.out);
  }
  manifest.write();
}

// ---------------------------------------------------------------------------
// viz

struct VizArgs {
  std::string scene;
  std::string preds;
  std::string heatmap;
  std::string priors;
  std::string out;
  double scale = 10.0;
};

void run_viz(const VizArgs& a) {
  ManifestScope manifest("viz");
  manifest.config = {{"scale", a.scale}};
  manifest.inputs.push_back(a.scene);

  const fm::Scene scene = load_scene(a.scene);

  std::optional<fm::PredictionSet> preds;
  if (!a.preds.empty()) {
    manifest.inputs.push_back(a.preds);
    preds = load_predictions(a.preds);
  }
  std::optional<fm::Heatmap> hm;
  fm::BevGridSpec hm_spec;
  if (!a.heatmap.empty()) {
    manifest.inputs.push_back(a.heatmap);
    hm = fm::read_heatmap(a.heatmap);
    hm_spec = spec_for(scene.range, scene.range.y_extent() / hm->h);
    if (hm_spec.w != hm->w) throw fm::ShapeError("heatmap does not tile the scene range");
  }
  std::optional<fm::SampledPriors> priors;
  if (!a.priors.empty()) {
    manifest.inputs.push_back(a.priors);
    priors = fm::read_priors(a.priors);
  }

  fm::SvgOptions opt;
  opt.scale = a.scale;
  if (hm) {
    opt.heatmap = &*hm;
    opt.heatmap_spec = &hm_spec;
  }
  if (priors) opt.priors = &*priors;

  fm::write_text_file(a.out, fm::render_svg(&scene, preds ? &*preds : nullptr, scene.range, opt));
  manifest.outputs.push_back(a.out);
  manifest.write();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FastMap: heatmap-guided vector-map decoding on synthetic BEV scenes"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "Generate a synthetic scene");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed")->envname("FASTMAP_SEED");
  cmd_gen->add_option("--dividers", gen.dividers, "Divider count");
  cmd_gen->add_option("--crossings", gen.crossings, "Pedestrian crossing count");
  cmd_gen->add_option("--boundaries", gen.boundaries, "Boundary count");
  cmd_gen->add_option("--m", gen.m, "Points per instance");
  cmd_gen->add_option("--curv-min", gen.curv_min, "Min curvature (1/m)");
  cmd_gen->add_option("--curv-max", gen.curv_max, "Max curvature (1/m)");
  cmd_gen->add_option("-o,--out", gen.out, "Output scene JSON")->required();
  cmd_gen->callback([&] { run_gen(gen); });

  RasterizeArgs ras;
  CLI::App* cmd_ras = app.add_subcommand("rasterize", "Rasterize scene annotations to a heatmap");
  cmd_ras->add_option("scene", ras.scene, "Scene JSON")->required();
  cmd_ras->add_option("-o,--out", ras.out, "Output FMHM file")->required();
  cmd_ras->add_option("--res", ras.res, "Grid resolution (m/cell)");
  cmd_ras->add_option("--kernel", ras.kernel, "Gaussian dilation kernel size (odd)");
  cmd_ras->add_option("--sigma", ras.sigma, "Kernel sigma in cells (0 = kernel/3)");
  cmd_ras->add_option("--svg", ras.svg, "Also render an SVG overlay");
  cmd_ras->add_option("--weight-field", ras.weight_field,
                      "Also write the radial loss weight field (FMHM)");
  cmd_ras->add_option("--alpha-gauss", ras.alpha_gauss, "Weight field amplitude");
  cmd_ras->add_option("--beta-gauss", ras.beta_gauss, "Weight field sharpness");
  cmd_ras->callback([&] { run_rasterize(ras); });

  ForwardArgs fwd;
  CLI::App* cmd_fwd = app.add_subcommand("forward", "Run the two-stage decoder forward pass");
  cmd_fwd->add_option("scene", fwd.scene, "Scene JSON to derive BEV features from");
  cmd_fwd->add_option("--bev", fwd.bev, "FMHM container with BEV features (d x h x w)");
  cmd_fwd->add_option("--seed", fwd.seed, "RNG seed")->envname("FASTMAP_SEED");
  cmd_fwd->add_option("--n", fwd.cfg.n, "Instance queries");
  cmd_fwd->add_option("--m", fwd.cfg.m, "Points per instance");
  cmd_fwd->add_option("--d", fwd.cfg.d, "Embedding width");
  cmd_fwd->add_option("--heads", fwd.cfg.heads, "Attention heads");
  cmd_fwd->add_option("--sample-points", fwd.cfg.sample_points, "Deformable samples per head");
  cmd_fwd->add_option("-M,--priors", fwd.cfg.num_priors, "Sampled prior count");
  cmd_fwd->add_flag("--paper-scale", fwd.paper_scale, "Use the published M = 3500");
  cmd_fwd->add_option("--tau", fwd.tau, "Heatmap confidence threshold");
  cmd_fwd->add_option("--res", fwd.res, "Grid resolution (m/cell)");
  cmd_fwd->add_option("--offset-scale", fwd.cfg.offset_scale, "Deformable offset scale");
  cmd_fwd->add_option("-o,--out", fwd.out, "Output predictions JSON")->required();
  cmd_fwd->add_option("--dump-heatmap", fwd.dump_heatmap, "Dump predicted heatmap (FMHM)");
  cmd_fwd->add_option("--dump-priors", fwd.dump_priors, "Dump sampled priors (FMSP)");
  cmd_fwd->add_option("--dump-weights", fwd.dump_weights, "Dump decoder weights (FMWT)");
  cmd_fwd->add_option("--dump-stage1", fwd.dump_stage1,
                      "Dump the coarse-stage predictions JSON");
  cmd_fwd->callback([&] { run_forward(fwd); });

  LossArgs loss;
  CLI::App* cmd_loss = app.add_subcommand("loss", "Compute the loss breakdown");
  cmd_loss->add_option("preds", loss.preds, "Predictions JSON")->required();
  cmd_loss->add_option("gts", loss.gts, "Ground-truth scene JSON")->required();
  cmd_loss->add_option("--stage1-pred", loss.stage1_preds, "Stage-1 predictions JSON");
  cmd_loss->add_option("--pred-heatmap", loss.pred_heatmap,
                       "Predicted heatmap (FMHM) to score against the rasterized gt");
  cmd_loss->add_option("--res", loss.res, "Grid resolution for the heatmap term");
  cmd_loss->add_option("--kernel", loss.kernel, "GT dilation kernel for the heatmap term");
  cmd_loss->add_option("--sigma", loss.sigma, "GT dilation sigma (0 = kernel/3)");
  cmd_loss->add_option("--class-weight", loss.class_weight, "Matching class penalty");
  cmd_loss->add_flag("--printed-point-line", loss.printed_point_line,
                     "Use the projection-difference point-line variant");
  cmd_loss->add_flag("--gradcheck", loss.gradcheck, "Check analytic gradients");
  cmd_loss->add_option("--dump-matching", loss.dump_matching, "Write the assignment JSON");
  cmd_loss->add_option("--dump-grads", loss.dump_grads, "Write point gradients (binary)");
  cmd_loss->add_option("-o,--out", loss.out, "Also write the breakdown JSON to a file");
  add_weight_flags(cmd_loss, loss.weights);
  cmd_loss->callback([&] { run_loss(loss); });

  FitArgs fit;
  CLI::App* cmd_fit = app.add_subcommand("fit", "Gradient-descend predictions onto the gt");
  cmd_fit->add_option("preds", fit.preds, "Predictions JSON")->required();
  cmd_fit->add_option("gts", fit.gts, "Ground-truth scene JSON")->required();
  cmd_fit->add_option("--steps", fit.steps, "Descent steps");
  cmd_fit->add_option("--lr", fit.lr, "Step size");
  cmd_fit->add_option("--decay", fit.decay, "Step schedule: cosine or none")
      ->check(CLI::IsMember({"cosine", "none"}));
  cmd_fit->add_option("--class-weight", fit.class_weight, "Matching class penalty");
  cmd_fit->add_option("-o,--out", fit.out, "Output predictions JSON")->required();
  cmd_fit->add_option("--trace", fit.trace, "Per-step loss CSV");
  add_weight_flags(cmd_fit, fit.weights);
  cmd_fit->callback([&] { run_fit(fit); });

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Chamfer AP and smoothness diagnostics");
  cmd_eval->add_option("preds", eval.preds, "Predictions JSON")->required();
  cmd_eval->add_option("gts", eval.gts, "Ground-truth scene JSON")->required();
  cmd_eval->add_option("--set", eval.set_id, "Threshold set")
      ->check(CLI::IsMember({"strict", "standard"}));
  cmd_eval->add_option("--densify", eval.densify, "Chamfer densification point count");
  cmd_eval->add_option("--pr-csv", eval.pr_csv, "Write per-class PR curves as CSV");
  cmd_eval->add_option("-o,--out", eval.out, "Write the report JSON");
  cmd_eval->add_flag("--quiet", eval.quiet, "Suppress the text table");
  cmd_eval->callback([&] { run_eval(eval); });

  VizArgs viz;
  CLI::App* cmd_viz = app.add_subcommand("viz", "Render scene/predictions to SVG");
  cmd_viz->add_option("scene", viz.scene, "Scene JSON")->required();
  cmd_viz->add_option("--preds", viz.preds, "Predictions JSON (dashed overlay)");
  cmd_viz->add_option("--heatmap", viz.heatmap, "Heatmap underlay (FMHM)");
  cmd_viz->add_option("--priors", viz.priors, "Prior markers (FMSP)");
  cmd_viz->add_option("--scale", viz.scale, "Pixels per meter");
  cmd_viz->add_option("-o,--out", viz.out, "Output SVG")->required();
  cmd_viz->callback([&] { run_viz(viz); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  } catch (const NumericFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
