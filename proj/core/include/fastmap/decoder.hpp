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

#include <cstdint>
#include <string>
#include <vector>

#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/sampler.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap {

struct DecoderConfig {
  int n = 10;              // instance queries
  int m = 8;               // points per instance
  int d = 32;              // embedding width; BEV feature width must match
  int heads = 4;           // attention heads
  int sample_points = 4;   // deformable sampling points per query and head
  int num_priors = 256;    // M
  double offset_scale = 0.1;  // fraction of the normalized plane, via tanh
  std::uint64_t seed = 42;

  int num_queries() const { return n * m; }
  int ffn_hidden() const { return 2 * d; }
  void validate() const;
};

/// y = x . w for row-major w (in x out). No bias terms anywhere in the
/// decoder; every projection is a seeded matrix.
struct Linear {
  int in = 0, out = 0;
  DenseArray w;
};

struct Conv3x3 {
  int in_ch = 0, out_ch = 0;
  std::vector<double> k;  // [out][in][3][3], row-major
};

/// Learnable query state. Q_feat_init is part of the published interface but
/// the coarse stage consumes only Q_pos_init; it is carried, never read.
struct QuerySet {
  DenseArray q_pos_init;   // (n*m) x d
  DenseArray q_feat_init;  // (n*m) x d
};

struct DecoderWeights {
  QuerySet queries;

  // Coarse stage (heatmap-guided query generation).
  Linear w_p;        // 2 -> d, positional lift of P_sam
  Linear w_c;        // class-embedding table, kNumClasses x d
  Linear attn_q, attn_k, attn_v, attn_o;  // d -> d
  Linear cgca_ffn1, cgca_ffn2;
  Linear w_ref;      // d -> 2, stage-1 reference points
  Linear cls_head1;  // d -> kNumClasses + 1

  // Fine stage (deformable attention over the full BEV grid).
  Linear w_q;             // d -> d, Q_pos from F_coarse
  Linear deform_value;    // d -> d, per-pixel value projection
  Linear deform_offset;   // d -> heads * sample_points * 2
  Linear deform_weight;   // d -> heads * sample_points
  Linear deform_out;      // d -> d
  Linear fgca_ffn1, fgca_ffn2;
  Linear point_head;      // d -> 2
  Linear cls_head2;       // d -> kNumClasses + 1

  // Heatmap head over BEV features.
  Conv3x3 hm_conv1, hm_conv2, hm_conv3;

  /// All tensors drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from one
  /// SplitMix64 stream, in declaration order, so weights are reproducible
  /// from the seed alone.
  static DecoderWeights seeded(const DecoderConfig& cfg);

  struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    const std::vector<double>* values;
  };
  std::vector<NamedTensor> named_tensors() const;
};

struct StageOutput {
  DenseArray features;      // (n*m) x d
  DenseArray points;        // n x m x 2, normalized (x, y) in (0,1)^2
  DenseArray class_logits;  // n x (kNumClasses + 1), background last
};

/// Three same-padding 3x3 convolutions with ReLU between and a logistic
/// squash on the final per-class channels.
Heatmap heatmap_head(const DenseArray& f_bev, const DecoderWeights& w);

struct CgcaDiagnostics {
  DenseArray attention;  // (heads * n*m) x M, row-stochastic
};

struct FgcaDiagnostics {
  DenseArray deform_weights;  // (n*m) x (heads * sample_points), softmax per head block
};

/// Coarse-grained cross-attention: K = (F_sam + class embedding) + W_p P_sam,
/// queried by Q_pos_init, followed by a residual feed-forward block. Stage-1
/// points are sigmoid(W_ref F_coarse) and double as the fine stage's
/// reference points.
StageOutput cgca_forward(const QuerySet& queries, const SampledPriors& priors,
                         const DecoderWeights& w, const DecoderConfig& cfg,
                         CgcaDiagnostics* diag = nullptr);

/// Fine-grained cross-attention: per query and head, sample_points offsets
/// and softmax weights predicted from Q_pos = W_q F_coarse, bilinear reads of
/// the projected BEV values at R_ref + offset, weighted sum, projection, and
/// a residual feed-forward block.
StageOutput fgca_forward(const StageOutput& coarse, const DenseArray& f_bev,
                         const DecoderWeights& w, const DecoderConfig& cfg,
                         FgcaDiagnostics* diag = nullptr);

/// Bilinear lookup of one channel of a C x H x W field at normalized
/// coordinates; cell centers sit at ((col+0.5)/W, (row+0.5)/H) and lookups
/// are border-clamped, so a cell-center coordinate returns that cell exactly.
double bilinear_sample(const DenseArray& field, int channel, double x_norm, double y_norm);

/// Denormalizes a stage's points to meters and derives per-instance class,
/// score (max map-class probability) and closed flag.
PredictionSet stage_predictions(const StageOutput& stage, const DecoderConfig& cfg,
                                const BevGridSpec& spec);

struct PipelineResult {
  Heatmap heatmap;
  SampledPriors priors;
  StageOutput coarse;
  StageOutput fine;
  PredictionSet predictions;  // stage_predictions(fine)
};

/// heatmap_head -> threshold_candidates -> csm_sample -> gather_priors ->
/// cgca_forward -> fgca_forward; predictions are the fine points denormalized
/// to meters with score = max map-class probability.
PipelineResult pipeline_forward(const DenseArray& f_bev, const DecoderWeights& w,
                                const DecoderConfig& cfg, const BevGridSpec& spec, double tau);

/// Seeded uniform [-1, 1) BEV feature block, d x h x w.
DenseArray synth_bev_features(int d, const BevGridSpec& spec, std::uint64_t seed);

}  // namespace fastmap
