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

#include "fastmap/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "fastmap/rng.hpp"

namespace fastmap {

namespace {

Linear seeded_linear(SplitMix64& rng, int in, int out) {
  Linear l{in, out, DenseArray({in, out})};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : l.w.values()) v = rng.next_uniform(-bound, bound);
  return l;
}

Conv3x3 seeded_conv(SplitMix64& rng, int in_ch, int out_ch) {
  Conv3x3 c{in_ch, out_ch, {}};
  c.k.resize(static_cast<std::size_t>(out_ch) * in_ch * 9);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch) * 9.0);
  for (double& v : c.k) v = rng.next_uniform(-bound, bound);
  return c;
}

DenseArray seeded_matrix(SplitMix64& rng, int rows, int cols, int fan_in) {
  DenseArray m({rows, cols});
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : m.values()) v = rng.next_uniform(-bound, bound);
  return m;
}

DenseArray apply(const Linear& l, const DenseArray& x) {
  if (x.dim(1) != l.in) throw ShapeError("linear: input width mismatch");
  return num::matmul(x, l.w);
}

// Zero-padded same-size 3x3 convolution over a C x H x W block.
DenseArray conv3x3_same(const DenseArray& x, const Conv3x3& conv) {
  if (x.rank() != 3 || x.dim(0) != conv.in_ch)
    throw ShapeError("conv3x3: channel mismatch");
  const int h = x.dim(1), w = x.dim(2);
  DenseArray y({conv.out_ch, h, w});
  for (int o = 0; o < conv.out_ch; ++o) {
    for (int c = 0; c < conv.in_ch; ++c) {
      const double* kern = conv.k.data() + (static_cast<std::size_t>(o) * conv.in_ch + c) * 9;
      for (int r = 0; r < h; ++r) {
        for (int col = 0; col < w; ++col) {
          double acc = y.at3(o, r, col);
          for (int dr = -1; dr <= 1; ++dr) {
            const int rr = r + dr;
            if (rr < 0 || rr >= h) continue;
            for (int dc = -1; dc <= 1; ++dc) {
              const int cc = col + dc;
              if (cc < 0 || cc >= w) continue;
              acc += kern[(dr + 1) * 3 + (dc + 1)] * x.at3(c, rr, cc);
            }
          }
          y.at3(o, r, col) = acc;
        }
      }
    }
  }
  return y;
}

void relu_inplace(DenseArray& x) {
  for (double& v : x.values()) v = num::relu(v);
}

// x + ffn2(relu(ffn1(x))), the residual feed-forward block both stages share.
DenseArray residual_ffn(const DenseArray& x, const Linear& ffn1, const Linear& ffn2) {
  DenseArray hidden = apply(ffn1, x);
  relu_inplace(hidden);
  DenseArray out = apply(ffn2, hidden);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
  return out;
}

DenseArray multi_head_cross_attention(const DenseArray& q_in, const DenseArray& kv,
                                      const DecoderWeights& w, int heads,
                                      DenseArray* attn_probs) {
  const int nq = q_in.dim(0), nk = kv.dim(0), d = q_in.dim(1);
  const int dh = d / heads;
  const DenseArray q = apply(w.attn_q, q_in);
  const DenseArray k = apply(w.attn_k, kv);
  const DenseArray v = apply(w.attn_v, kv);

  if (attn_probs) *attn_probs = DenseArray({heads * nq, nk});
  DenseArray concat({nq, d});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  for (int h = 0; h < heads; ++h) {
    const int off = h * dh;
    DenseArray scores({nq, nk});
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nk; ++j) {
        double dot = 0.0;
        for (int e = 0; e < dh; ++e) dot += q.at2(i, off + e) * k.at2(j, off + e);
        scores.at2(i, j) = dot * scale;
      }
    num::softmax_rows(scores);
    if (attn_probs)
      for (int i = 0; i < nq; ++i)
        for (int j = 0; j < nk; ++j) attn_probs->at2(h * nq + i, j) = scores.at2(i, j);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nk; ++j) {
        const double p = scores.at2(i, j);
        for (int e = 0; e < dh; ++e) concat.at2(i, off + e) += p * v.at2(j, off + e);
      }
  }
  return apply(w.attn_o, concat);
}

// Per-instance head: mean of the instance's m point features through a
// linear map.
DenseArray instance_head(const DenseArray& features, const Linear& head, int n, int m) {
  const int d = features.dim(1);
  DenseArray means({n, d});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int e = 0; e < d; ++e) means.at2(i, e) += features.at2(i * m + j, e) / m;
  return apply(head, means);
}

DenseArray sigmoid_points(const DenseArray& flat, int n, int m) {
  DenseArray points({n, m, 2});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      points.at3(i, j, 0) = num::sigmoid(flat.at2(i * m + j, 0));
      points.at3(i, j, 1) = num::sigmoid(flat.at2(i * m + j, 1));
    }
  return points;
}

}  // namespace

void DecoderConfig::validate() const {
  if (n < 1 || m < 1 || d < 1 || heads < 1 || sample_points < 1 || num_priors < 1)
    throw Error("DecoderConfig: all counts must be >= 1");
  if (d % heads != 0) throw Error("DecoderConfig: d must be divisible by heads");
}

DecoderWeights DecoderWeights::seeded(const DecoderConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  DecoderWeights w;
  const int d = cfg.d, nq = cfg.num_queries(), hid = cfg.ffn_hidden();

  w.queries.q_pos_init = seeded_matrix(rng, nq, d, d);
  w.queries.q_feat_init = seeded_matrix(rng, nq, d, d);

  w.w_p = seeded_linear(rng, 2, d);
  w.w_c = seeded_linear(rng, kNumClasses, d);
  w.attn_q = seeded_linear(rng, d, d);
  w.attn_k = seeded_linear(rng, d, d);
  w.attn_v = seeded_linear(rng, d, d);
  w.attn_o = seeded_linear(rng, d, d);
  w.cgca_ffn1 = seeded_linear(rng, d, hid);
  w.cgca_ffn2 = seeded_linear(rng, hid, d);
  w.w_ref = seeded_linear(rng, d, 2);
  w.cls_head1 = seeded_linear(rng, d, kNumClasses + 1);

  w.w_q = seeded_linear(rng, d, d);
  w.deform_value = seeded_linear(rng, d, d);
  w.deform_offset = seeded_linear(rng, d, cfg.heads * cfg.sample_points * 2);
  w.deform_weight = seeded_linear(rng, d, cfg.heads * cfg.sample_points);
  w.deform_out = seeded_linear(rng, d, d);
  w.fgca_ffn1 = seeded_linear(rng, d, hid);
  w.fgca_ffn2 = seeded_linear(rng, hid, d);
  w.point_head = seeded_linear(rng, d, 2);
  w.cls_head2 = seeded_linear(rng, d, kNumClasses + 1);

  w.hm_conv1 = seeded_conv(rng, d, d);
  w.hm_conv2 = seeded_conv(rng, d, d);
  w.hm_conv3 = seeded_conv(rng, d, kNumClasses);
  return w;
}

std::vector<DecoderWeights::NamedTensor> DecoderWeights::named_tensors() const {
  std::vector<NamedTensor> out;
  const auto lin = [&](const std::string& name, const Linear& l) {
    out.push_back({name, {l.in, l.out}, &l.w.values()});
  };
  out.push_back({"q_pos_init", queries.q_pos_init.shape(), &queries.q_pos_init.values()});
  out.push_back({"q_feat_init", queries.q_feat_init.shape(), &queries.q_feat_init.values()});
  lin("w_p", w_p);
  lin("w_c", w_c);
  lin("attn_q", attn_q);
  lin("attn_k", attn_k);
  lin("attn_v", attn_v);
  lin("attn_o", attn_o);
  lin("cgca_ffn1", cgca_ffn1);
  lin("cgca_ffn2", cgca_ffn2);
  lin("w_ref", w_ref);
  lin("cls_head1", cls_head1);
  lin("w_q", w_q);
  lin("deform_value", deform_value);
  lin("deform_offset", deform_offset);
  lin("deform_weight", deform_weight);
  lin("deform_out", deform_out);
  lin("fgca_ffn1", fgca_ffn1);
  lin("fgca_ffn2", fgca_ffn2);
  lin("point_head", point_head);
  lin("cls_head2", cls_head2);
  out.push_back({"hm_conv1", {hm_conv1.out_ch, hm_conv1.in_ch, 3, 3}, &hm_conv1.k});
  out.push_back({"hm_conv2", {hm_conv2.out_ch, hm_conv2.in_ch, 3, 3}, &hm_conv2.k});
  out.push_back({"hm_conv3", {hm_conv3.out_ch, hm_conv3.in_ch, 3, 3}, &hm_conv3.k});
  return out;
}

Heatmap heatmap_head(const DenseArray& f_bev, const DecoderWeights& w) {
  if (f_bev.rank() != 3) throw ShapeError("heatmap_head: BEV array must be C x H x W");
  DenseArray x = conv3x3_same(f_bev, w.hm_conv1);
  relu_inplace(x);
  x = conv3x3_same(x, w.hm_conv2);
  relu_inplace(x);
  x = conv3x3_same(x, w.hm_conv3);

  Heatmap hm(kNumClasses, x.dim(1), x.dim(2));
  for (std::size_t i = 0; i < x.size(); ++i) hm.values[i] = num::sigmoid(x[i]);
  return hm;
}

StageOutput cgca_forward(const QuerySet& queries, const SampledPriors& priors,
                         const DecoderWeights& w, const DecoderConfig& cfg,
                         CgcaDiagnostics* diag) {
  cfg.validate();
  const int m_priors = priors.count();
  if (m_priors == 0) throw EmptyPriorError("cgca_forward: no priors");
  if (priors.f_sam.dim(1) != cfg.d)
    throw ShapeError("cgca_forward: BEV feature width must equal embedding width d");
  if (queries.q_pos_init.dim(0) != cfg.num_queries() || queries.q_pos_init.dim(1) != cfg.d)
    throw ShapeError("cgca_forward: query shape mismatch");

  const DenseArray k_pos = apply(w.w_p, priors.p_sam);
  DenseArray k_coarse = priors.f_sam;  // K_feat = F_sam + class embedding
  for (int i = 0; i < m_priors; ++i) {
    const int c = static_cast<int>(priors.cls[i]);
    for (int e = 0; e < cfg.d; ++e)
      k_coarse.at2(i, e) += w.w_c.w.at2(c, e) + k_pos.at2(i, e);
  }

  const DenseArray attn = multi_head_cross_attention(
      queries.q_pos_init, k_coarse, w, cfg.heads, diag ? &diag->attention : nullptr);
  DenseArray x = queries.q_pos_init;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += attn[i];
  x = residual_ffn(x, w.cgca_ffn1, w.cgca_ffn2);

  StageOutput out;
  out.points = sigmoid_points(apply(w.w_ref, x), cfg.n, cfg.m);
  out.class_logits = instance_head(x, w.cls_head1, cfg.n, cfg.m);
  out.features = std::move(x);
  return out;
}

double bilinear_sample(const DenseArray& field, int channel, double x_norm, double y_norm) {
  if (field.rank() != 3) throw ShapeError("bilinear_sample: field must be C x H x W");
  const int h = field.dim(1), w = field.dim(2);
  const double col_f = std::clamp(x_norm * w - 0.5, 0.0, static_cast<double>(w - 1));
  const double row_f = std::clamp(y_norm * h - 0.5, 0.0, static_cast<double>(h - 1));
  const int c0 = static_cast<int>(std::floor(col_f));
  const int r0 = static_cast<int>(std::floor(row_f));
  const int c1 = std::min(c0 + 1, w - 1);
  const int r1 = std::min(r0 + 1, h - 1);
  const double fc = col_f - c0, fr = row_f - r0;
  return field.at3(channel, r0, c0) * (1 - fr) * (1 - fc) +
         field.at3(channel, r0, c1) * (1 - fr) * fc +
         field.at3(channel, r1, c0) * fr * (1 - fc) +
         field.at3(channel, r1, c1) * fr * fc;
}

StageOutput fgca_forward(const StageOutput& coarse, const DenseArray& f_bev,
                         const DecoderWeights& w, const DecoderConfig& cfg,
                         FgcaDiagnostics* diag) {
  cfg.validate();
  if (f_bev.rank() != 3 || f_bev.dim(0) != cfg.d)
    throw ShapeError("fgca_forward: BEV feature width must equal embedding width d");
  if (coarse.features.dim(0) != cfg.num_queries() || coarse.features.dim(1) != cfg.d)
    throw ShapeError("fgca_forward: coarse feature shape mismatch");
  if (coarse.points.shape() != std::vector<int>{cfg.n, cfg.m, 2})
    throw ShapeError("fgca_forward: reference point shape mismatch");
  const int h = f_bev.dim(1), bw = f_bev.dim(2);
  const int nq = cfg.num_queries(), d = cfg.d, heads = cfg.heads, pts = cfg.sample_points;
  const int dh = d / heads;

  const DenseArray q_pos = apply(w.w_q, coarse.features);

  // Per-pixel value projection, kept in C x H x W layout for sampling.
  DenseArray value({d, h, bw});
  {
    DenseArray pix({h * bw, d});
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < h; ++r)
        for (int col = 0; col < bw; ++col) pix.at2(r * bw + col, c) = f_bev.at3(c, r, col);
    const DenseArray projected = num::matmul(pix, w.deform_value.w);
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < h; ++r)
        for (int col = 0; col < bw; ++col) value.at3(c, r, col) = projected.at2(r * bw + col, c);
  }

  DenseArray offsets = apply(w.deform_offset, q_pos);  // nq x (heads*pts*2)
  for (double& v : offsets.values()) v = std::tanh(v) * cfg.offset_scale;
  DenseArray weights = apply(w.deform_weight, q_pos);  // nq x (heads*pts)
  for (int i = 0; i < nq; ++i) {
    for (int hd = 0; hd < heads; ++hd) {
      double mx = -1e300;
      for (int k = 0; k < pts; ++k) mx = std::max(mx, weights.at2(i, hd * pts + k));
      double sum = 0.0;
      for (int k = 0; k < pts; ++k) {
        double& v = weights.values()[static_cast<std::size_t>(i) * heads * pts + hd * pts + k];
        v = std::exp(v - mx);
        sum += v;
      }
      for (int k = 0; k < pts; ++k)
        weights.values()[static_cast<std::size_t>(i) * heads * pts + hd * pts + k] /= sum;
    }
  }
  if (diag) diag->deform_weights = weights;

  DenseArray sampled({nq, d});
  for (int i = 0; i < nq; ++i) {
    const int inst = i / cfg.m, pt = i % cfg.m;
    const double rx = coarse.points.at3(inst, pt, 0);
    const double ry = coarse.points.at3(inst, pt, 1);
    for (int hd = 0; hd < heads; ++hd) {
      for (int k = 0; k < pts; ++k) {
        const double ox = offsets.at2(i, (hd * pts + k) * 2);
        const double oy = offsets.at2(i, (hd * pts + k) * 2 + 1);
        const double sx = std::clamp(rx + ox, 0.0, 1.0);
        const double sy = std::clamp(ry + oy, 0.0, 1.0);
        const double wk = weights.at2(i, hd * pts + k);
        for (int e = 0; e < dh; ++e)
          sampled.at2(i, hd * dh + e) += wk * bilinear_sample(value, hd * dh + e, sx, sy);
      }
    }
  }

  const DenseArray attn = apply(w.deform_out, sampled);
  DenseArray x = q_pos;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += attn[i];
  x = residual_ffn(x, w.fgca_ffn1, w.fgca_ffn2);

  StageOutput out;
  out.points = sigmoid_points(apply(w.point_head, x), cfg.n, cfg.m);
  out.class_logits = instance_head(x, w.cls_head2, cfg.n, cfg.m);
  out.features = std::move(x);
  return out;
}

PipelineResult pipeline_forward(const DenseArray& f_bev, const DecoderWeights& w,
                                const DecoderConfig& cfg, const BevGridSpec& spec,
                                double tau) {
  cfg.validate();
  spec.validate();
  if (f_bev.rank() != 3 || f_bev.dim(0) != cfg.d || f_bev.dim(1) != spec.h ||
      f_bev.dim(2) != spec.w)
    throw ShapeError("pipeline_forward: BEV array must be d x h x w matching the grid spec");

  PipelineResult result;
  result.heatmap = heatmap_head(f_bev, w);
  const std::vector<Candidate> cands = threshold_candidates(result.heatmap, tau, spec);
  const std::vector<Candidate> selected = csm_sample(cands, cfg.num_priors, spec);
  result.priors = gather_priors(f_bev, selected, spec);
  result.coarse = cgca_forward(w.queries, result.priors, w, cfg);
  result.fine = fgca_forward(result.coarse, f_bev, w, cfg);

  result.predictions = stage_predictions(result.fine, cfg, spec);
  return result;
}

PredictionSet stage_predictions(const StageOutput& stage, const DecoderConfig& cfg,
                                const BevGridSpec& spec) {
  if (stage.points.shape() != std::vector<int>{cfg.n, cfg.m, 2})
    throw ShapeError("stage_predictions: point shape mismatch");

  PredictionSet predictions;
  predictions.range = spec.range;
  for (int i = 0; i < cfg.n; ++i) {
    ScoredInstance scored;
    // Max map-class probability under the (C+1)-way softmax.
    const auto row = stage.class_logits.row(i);
    double mx = row[0];
    for (int c = 1; c < kNumClasses + 1; ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    std::array<double, kNumClasses + 1> p{};
    for (int c = 0; c < kNumClasses + 1; ++c) {
      p[c] = std::exp(row[c] - mx);
      sum += p[c];
    }
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c)
      if (p[c] > p[best]) best = c;
    scored.score = p[best] / sum;
    for (int c = 0; c < kNumClasses + 1; ++c) scored.logits[c] = row[c];

    scored.instance.cls = static_cast<MapClass>(best);
    scored.instance.closed = scored.instance.cls == MapClass::PedCrossing;
    scored.instance.points.resize(cfg.m);
    for (int j = 0; j < cfg.m; ++j) {
      const double px = stage.points.at3(i, j, 0);
      const double py = stage.points.at3(i, j, 1);
      scored.instance.points[j] = {spec.range.x_min + px * spec.range.x_extent(),
                                   spec.range.y_min + py * spec.range.y_extent()};
    }
    predictions.instances.push_back(std::move(scored));
  }
  return predictions;
}

DenseArray synth_bev_features(int d, const BevGridSpec& spec, std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0x6265765F66656174ULL);
  DenseArray f({d, spec.h, spec.w});
  for (double& v : f.values()) v = rng.next_uniform(-1.0, 1.0);
  return f;
}

}  // namespace fastmap
