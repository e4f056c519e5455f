// Copyright 2026 The wino2pc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Model documents (JSON) and their lowering to the graph IR.

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wino2pc/graph/ir.h"

namespace wino2pc::cli {

struct Model {
  nlohmann::json doc;
  std::filesystem::path base_dir;  // weight files resolve against this

  const nlohmann::json& layers() const { return doc.at("layers"); }
};

/// Reads and structurally validates a model document (kInvalidParams on
/// unknown kinds, missing fields or duplicate names; kIoError if unreadable).
Model load_model(const std::filesystem::path& path);
Model model_from_json(nlohmann::json doc, std::filesystem::path base_dir = ".");
void validate_model(const Model& m);

struct LowerOptions {
  // Winograd output tile for every conv3x3 layer; 0 keeps each layer's own.
  int m = 0;
  // Lower every conv3x3 to the per-bit direct convolution.
  bool force_direct = false;
  // Pre-transformed weights (from transform-weights), keyed by layer name.
  std::map<std::string, std::shared_ptr<const graph::GemmSpec>> weights;
  // Replaces reading weight files: (layer, K, C) -> real kernel.
  std::function<std::vector<double>(const nlohmann::json&, int64_t, int64_t)> kernel_source;
};

struct Lowered {
  graph::Graph graph;
  std::map<std::string, int> layer_node;  // layer name -> last node of the layer
};

/// Builds the unoptimized graph; the result type-checks.
Lowered lower_model(const Model& m, const LowerOptions& opt = {});

/// Real-valued kernel of a layer: K x C x 3 x 3 for conv3x3, K x C for fc.
std::vector<double> layer_kernel(const Model& m, const nlohmann::json& layer);

/// Quantized weights of one conv3x3 or fc layer as lowered (Winograd,
/// direct or dense), given the layer's input channels.
std::shared_ptr<graph::GemmSpec> quantize_layer(const Model& m, const nlohmann::json& layer,
                                                int64_t in_channels, const LowerOptions& opt);

nlohmann::json gemm_spec_to_json(const graph::GemmSpec& s);
graph::GemmSpec gemm_spec_from_json(const nlohmann::json& j);

/// Writes a K x C x 3 x 3 (or K x C) kernel file with deterministic
/// Gaussian entries for every layer whose weight file is missing. Returns
/// the files written.
std::vector<std::string> init_missing_weights(const Model& m, uint64_t seed);

/// One-conv model with inline Gaussian weights: input (C x H x W at
/// `la` bits) -> conv3x3 (`lw`-bit weights, F(2,3) or F(4,3)) -> output.
nlohmann::json random_conv_model(std::mt19937_64& rng, int lw, int la);

}  // namespace wino2pc::cli
