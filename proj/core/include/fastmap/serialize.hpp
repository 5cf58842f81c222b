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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastmap/decoder.hpp"
#include "fastmap/geometry.hpp"
#include "fastmap/heatmap.hpp"
#include "fastmap/sampler.hpp"
#include "fastmap/tensor.hpp"

namespace fastmap {

// --- JSON documents --------------------------------------------------------
// Scene/PredictionSet schema:
//   {"range": {"x_min": .., "x_max": .., "y_min": .., "y_max": ..},
//    "instances": [{"class": "divider|ped_crossing|boundary", "closed": bool,
//                   "score": float?, "logits": [..]?, "points": [[x, y], ..]}]}
// Coordinates are meters rounded to 6 decimal places.

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json predictions_to_json(const PredictionSet& preds);
PredictionSet predictions_from_json(const nlohmann::json& j);

/// Atomic write (temp file + rename), trailing newline included.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Atomic write of raw text (SVG, CSV).
void write_text_file(const std::filesystem::path& path, const std::string& text);

// --- Flat binary container --------------------------------------------------
// 16-byte header: 4-byte magic, then u32 C, u32 H, u32 W (little-endian),
// followed by C*H*W IEEE-754 32-bit little-endian floats, C-major row-major.
// Magics: "FMHM" heatmaps / weight fields / BEV features, "FMSP" sampled
// priors, "FMWT" decoder weights.

struct Container {
  std::string magic;  // exactly 4 bytes
  std::uint32_t c = 0, h = 0, w = 0;
  std::vector<float> values;
};

void write_container(const std::filesystem::path& path, const Container& container);
Container read_container(const std::filesystem::path& path);

void write_heatmap(const std::filesystem::path& path, const Heatmap& hm);
Heatmap read_heatmap(const std::filesystem::path& path);

void write_weight_field(const std::filesystem::path& path, const GaussianWeightField& field);

/// BEV feature blocks reuse the FMHM container.
void write_bev(const std::filesystem::path& path, const DenseArray& f_bev);
DenseArray read_bev(const std::filesystem::path& path);

/// FMSP rows are [x_norm, y_norm, f_0, .., f_{C_feat-1}] (C=1, H=M,
/// W=2+C_feat); cells and classes go to a "<path>.json" sidecar.
void write_priors(const std::filesystem::path& path, const SampledPriors& priors);
SampledPriors read_priors(const std::filesystem::path& path);

/// FMWT holds all tensors concatenated (C=1, H=1, W=total) with a
/// "<path>.json" manifest of named shapes and offsets.
void write_weights(const std::filesystem::path& path, const DecoderWeights& weights);

}  // namespace fastmap
