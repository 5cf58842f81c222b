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

#include "fastmap/serialize.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace fastmap {

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

nlohmann::json range_to_json(const BevRange& r) {
  return {{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

BevRange range_from_json(const nlohmann::json& j) {
  BevRange r;
  r.x_min = j.at("x_min").get<double>();
  r.x_max = j.at("x_max").get<double>();
  r.y_min = j.at("y_min").get<double>();
  r.y_max = j.at("y_max").get<double>();
  return r;
}

nlohmann::json instance_to_json(const MapInstance& inst) {
  nlohmann::json points = nlohmann::json::array();
  for (const Point2& p : inst.points)
    points.push_back(nlohmann::json::array({round6(p.x), round6(p.y)}));
  return {{"class", to_string(inst.cls)}, {"closed", inst.closed}, {"points", std::move(points)}};
}

MapInstance instance_from_json(const nlohmann::json& j) {
  MapInstance inst;
  inst.cls = map_class_from_string(j.at("class").get<std::string>());
  inst.closed = j.at("closed").get<bool>();
  for (const auto& p : j.at("points")) {
    if (!p.is_array() || p.size() != 2) throw Error("instance point must be [x, y]");
    inst.points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return inst;
}

}  // namespace

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json instances = nlohmann::json::array();
  for (const MapInstance& inst : scene.instances) instances.push_back(instance_to_json(inst));
  return {{"range", range_to_json(scene.range)}, {"instances", std::move(instances)}};
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene scene;
  scene.range = range_from_json(j.at("range"));
  for (const auto& inst : j.at("instances")) scene.instances.push_back(instance_from_json(inst));
  return scene;
}

nlohmann::json predictions_to_json(const PredictionSet& preds) {
  nlohmann::json instances = nlohmann::json::array();
  for (const ScoredInstance& scored : preds.instances) {
    nlohmann::json inst = instance_to_json(scored.instance);
    inst["score"] = round6(scored.score);
    nlohmann::json logits = nlohmann::json::array();
    for (double v : scored.logits) logits.push_back(round6(v));
    inst["logits"] = std::move(logits);
    instances.push_back(std::move(inst));
  }
  return {{"range", range_to_json(preds.range)}, {"instances", std::move(instances)}};
}

PredictionSet predictions_from_json(const nlohmann::json& j) {
  PredictionSet preds;
  preds.range = range_from_json(j.at("range"));
  for (const auto& inst : j.at("instances")) {
    ScoredInstance scored;
    scored.instance = instance_from_json(inst);
    scored.score = inst.value("score", 1.0);
    if (inst.contains("logits")) {
      const auto& logits = inst.at("logits");
      if (logits.size() != kNumClasses + 1)
        throw Error("prediction logits must have " + std::to_string(kNumClasses + 1) + " entries");
      for (std::size_t k = 0; k < scored.logits.size(); ++k)
        scored.logits[k] = logits[k].get<double>();
    } else {
      // Reconstruct logits consistent with (class, score) for files written
      // by other tools: softmax of the class entry equals the score.
      const double s = std::clamp(scored.score, 1e-6, 1.0 - 1e-6);
      scored.logits.fill(0.0);
      scored.logits[static_cast<int>(scored.instance.cls)] =
          std::log(kNumClasses * s / (1.0 - s));
    }
    preds.instances.push_back(std::move(scored));
  }
  return preds;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  atomic_write(path, text);
}

void write_container(const std::filesystem::path& path, const Container& container) {
  if (container.magic.size() != 4) throw Error("container magic must be 4 bytes");
  const std::size_t count = static_cast<std::size_t>(container.c) * container.h * container.w;
  if (count != container.values.size()) throw ShapeError("container value count mismatch");

  std::string bytes;
  bytes.reserve(16 + 4 * count);
  bytes += container.magic;
  put_u32(bytes, container.c);
  put_u32(bytes, container.h);
  put_u32(bytes, container.w);
  for (float f : container.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(bytes, bits);
  }
  atomic_write(path, bytes);
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw Error("container too short: " + path.string());

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  Container container;
  container.magic = bytes.substr(0, 4);
  container.c = get_u32(p + 4);
  container.h = get_u32(p + 8);
  container.w = get_u32(p + 12);
  const std::size_t count = static_cast<std::size_t>(container.c) * container.h * container.w;
  if (bytes.size() != 16 + 4 * count)
    throw Error("container payload size mismatch: " + path.string());
  container.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(p + 16 + 4 * i);
    std::memcpy(&container.values[i], &bits, 4);
  }
  return container;
}

void write_heatmap(const std::filesystem::path& path, const Heatmap& hm) {
  Container c{"FMHM", static_cast<std::uint32_t>(hm.channels), static_cast<std::uint32_t>(hm.h),
              static_cast<std::uint32_t>(hm.w), {}};
  c.values.assign(hm.values.begin(), hm.values.end());
  write_container(path, c);
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  const Container c = read_container(path);
  if (c.magic != "FMHM") throw Error("not a heatmap container: " + path.string());
  Heatmap hm(static_cast<int>(c.c), static_cast<int>(c.h), static_cast<int>(c.w));
  hm.values.assign(c.values.begin(), c.values.end());
  return hm;
}

void write_weight_field(const std::filesystem::path& path, const GaussianWeightField& field) {
  Container c{"FMHM", 1, static_cast<std::uint32_t>(field.h), static_cast<std::uint32_t>(field.w),
              {}};
  c.values.assign(field.values.begin(), field.values.end());
  write_container(path, c);
}

void write_bev(const std::filesystem::path& path, const DenseArray& f_bev) {
  if (f_bev.rank() != 3) throw ShapeError("write_bev: expected C x H x W");
  Container c{"FMHM", static_cast<std::uint32_t>(f_bev.dim(0)),
              static_cast<std::uint32_t>(f_bev.dim(1)), static_cast<std::uint32_t>(f_bev.dim(2)),
              {}};
  c.values.assign(f_bev.values().begin(), f_bev.values().end());
  write_container(path, c);
}

DenseArray read_bev(const std::filesystem::path& path) {
  const Container c = read_container(path);
  if (c.magic != "FMHM") throw Error("not a BEV container: " + path.string());
  DenseArray f({static_cast<int>(c.c), static_cast<int>(c.h), static_cast<int>(c.w)});
  for (std::size_t i = 0; i < c.values.size(); ++i) f[i] = c.values[i];
  return f;
}

void write_priors(const std::filesystem::path& path, const SampledPriors& priors) {
  const int m = priors.count();
  const int c_feat = priors.f_sam.dim(1);
  Container c{"FMSP", 1, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(2 + c_feat), {}};
  c.values.reserve(static_cast<std::size_t>(m) * (2 + c_feat));
  for (int k = 0; k < m; ++k) {
    c.values.push_back(static_cast<float>(priors.p_sam.at2(k, 0)));
    c.values.push_back(static_cast<float>(priors.p_sam.at2(k, 1)));
    for (int f = 0; f < c_feat; ++f)
      c.values.push_back(static_cast<float>(priors.f_sam.at2(k, f)));
  }
  write_container(path, c);

  nlohmann::json cells = nlohmann::json::array();
  nlohmann::json classes = nlohmann::json::array();
  for (int k = 0; k < m; ++k) {
    cells.push_back(nlohmann::json::array({priors.cells[k].row, priors.cells[k].col}));
    classes.push_back(to_string(priors.cls[k]));
  }
  write_json_file(path.string() + ".json",
                  {{"cells", std::move(cells)},
                   {"classes", std::move(classes)},
                   {"feature_width", c_feat}});
}

SampledPriors read_priors(const std::filesystem::path& path) {
  const Container c = read_container(path);
  if (c.magic != "FMSP") throw Error("not a priors container: " + path.string());
  const nlohmann::json sidecar = read_json_file(path.string() + ".json");

  const int m = static_cast<int>(c.h);
  const int c_feat = static_cast<int>(c.w) - 2;
  if (c_feat < 0) throw Error("priors container too narrow");
  SampledPriors priors;
  priors.p_sam = DenseArray({m, 2});
  priors.f_sam = DenseArray({m, std::max(c_feat, 1)});
  for (int k = 0; k < m; ++k) {
    priors.p_sam.at2(k, 0) = c.values[static_cast<std::size_t>(k) * (2 + c_feat)];
    priors.p_sam.at2(k, 1) = c.values[static_cast<std::size_t>(k) * (2 + c_feat) + 1];
    for (int f = 0; f < c_feat; ++f)
      priors.f_sam.at2(k, f) = c.values[static_cast<std::size_t>(k) * (2 + c_feat) + 2 + f];
  }
  for (const auto& cell : sidecar.at("cells"))
    priors.cells.push_back({cell[0].get<int>(), cell[1].get<int>()});
  for (const auto& cls : sidecar.at("classes"))
    priors.cls.push_back(map_class_from_string(cls.get<std::string>()));
  if (static_cast<int>(priors.cells.size()) != m || static_cast<int>(priors.cls.size()) != m)
    throw Error("priors sidecar does not match container rows");
  return priors;
}

void write_weights(const std::filesystem::path& path, const DecoderWeights& weights) {
  Container c{"FMWT", 1, 1, 0, {}};
  nlohmann::json manifest = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& tensor : weights.named_tensors()) {
    manifest.push_back(
        {{"name", tensor.name}, {"shape", tensor.shape}, {"offset", offset},
         {"size", tensor.values->size()}});
    for (double v : *tensor.values) c.values.push_back(static_cast<float>(v));
    offset += tensor.values->size();
  }
  c.w = static_cast<std::uint32_t>(c.values.size());
  write_container(path, c);
  write_json_file(path.string() + ".json", {{"tensors", std::move(manifest)}});
}

}  // namespace fastmap
