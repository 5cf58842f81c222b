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

#include "fastmap/svg.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace fastmap {

namespace {

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  const int n = std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out.append(buf, static_cast<std::size_t>(n));
}

struct Frame {
  const BevRange& range;
  double scale;
  double px(double x) const { return (x - range.x_min) * scale; }
  double py(double y) const { return (range.y_max - y) * scale; }  // y up -> SVG y down
};

void append_polyline(std::string& out, const MapInstance& inst, const Frame& f,
                     const char* color, bool dashed) {
  out += "  <path d=\"";
  for (std::size_t i = 0; i < inst.points.size(); ++i)
    appendf(out, "%s%.2f %.2f", i == 0 ? "M " : " L ", f.px(inst.points[i].x),
            f.py(inst.points[i].y));
  if (inst.closed) out += " Z";
  appendf(out, "\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"%s/>\n", color,
          dashed ? " stroke-dasharray=\"6 4\"" : "");
}

}  // namespace

const char* class_color(MapClass c) {
  switch (c) {
    case MapClass::Divider: return "#e6762b";
    case MapClass::PedCrossing: return "#2b7de6";
    case MapClass::Boundary: return "#27a02c";
  }
  return "#000000";
}

std::string render_svg(const Scene* scene, const PredictionSet* preds, const BevRange& range,
                       const SvgOptions& opt) {
  const Frame f{range, opt.scale};
  const double width = range.x_extent() * opt.scale;
  const double height = range.y_extent() * opt.scale;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  appendf(out,
          "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
          "viewBox=\"0 0 %.0f %.0f\">\n",
          width, height, width, height);
  appendf(out, "  <rect width=\"%.0f\" height=\"%.0f\" fill=\"#ffffff\"/>\n", width, height);

  if (opt.heatmap && opt.heatmap_spec) {
    const Heatmap& hm = *opt.heatmap;
    const BevGridSpec& spec = *opt.heatmap_spec;
    const double cell = spec.resolution * opt.scale;
    out += "  <g>\n";
    for (int c = 0; c < hm.channels; ++c) {
      const char* color = class_color(static_cast<MapClass>(c % kNumClasses));
      for (int r = 0; r < hm.h; ++r) {
        for (int col = 0; col < hm.w; ++col) {
          const double v = hm.at(c, r, col);
          if (v < 0.02) continue;
          const Point2 center = grid_to_world({r, col}, spec);
          appendf(out,
                  "    <rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"%s\" fill-opacity=\"%.3f\"/>\n",
                  f.px(center.x) - cell / 2, f.py(center.y) - cell / 2, cell, cell, color,
                  v * 0.85);
        }
      }
    }
    out += "  </g>\n";
  }

  // 5 m grid.
  out += "  <g stroke=\"#d8d8d8\" stroke-width=\"1\">\n";
  for (double x = std::ceil(range.x_min / opt.grid_step) * opt.grid_step; x <= range.x_max;
       x += opt.grid_step)
    appendf(out, "    <line x1=\"%.2f\" y1=\"0\" x2=\"%.2f\" y2=\"%.0f\"/>\n", f.px(x), f.px(x),
            height);
  for (double y = std::ceil(range.y_min / opt.grid_step) * opt.grid_step; y <= range.y_max;
       y += opt.grid_step)
    appendf(out, "    <line x1=\"0\" y1=\"%.2f\" x2=\"%.0f\" y2=\"%.2f\"/>\n", f.py(y), width,
            f.py(y));
  out += "  </g>\n";
  appendf(out,
          "  <rect width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"#404040\" "
          "stroke-width=\"2\"/>\n",
          width, height);

  if (opt.priors) {
    out += "  <g fill=\"#7a4fd0\" fill-opacity=\"0.7\">\n";
    for (int k = 0; k < opt.priors->count(); ++k) {
      const double x = range.x_min + opt.priors->p_sam.at2(k, 0) * range.x_extent();
      const double y = range.y_min + opt.priors->p_sam.at2(k, 1) * range.y_extent();
      appendf(out, "    <circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\"/>\n", f.px(x), f.py(y));
    }
    out += "  </g>\n";
  }

  if (scene)
    for (const MapInstance& inst : scene->instances)
      append_polyline(out, inst, f, class_color(inst.cls), /*dashed=*/false);
  if (preds)
    for (const ScoredInstance& scored : preds->instances)
      append_polyline(out, scored.instance, f, class_color(scored.instance.cls), /*dashed=*/true);

  out += "</svg>\n";
  return out;
}

}  // namespace fastmap
