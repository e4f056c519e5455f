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

// Per-layer sensitivity: Hessian trace estimation, Winograd-domain
// quantization error and modeled communication per candidate bit width.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wino2pc/linear/bit_importance.h"
#include "wino2pc/proto/cost_model.h"

namespace wino2pc::quant {

struct LayerSensitivity {
  std::string layer;
  std::vector<int> bits;         // ascending candidate widths
  std::vector<double> omega;     // perturbation per candidate
  std::vector<uint64_t> comm;    // modeled bits per candidate

  size_t size() const { return bits.size(); }
  /// Throws kInvalidParams unless bits ascend, omega does not increase and
  /// comm does not decrease.
  void validate() const;
};

std::vector<int> default_candidate_bits();

using LayerParams = std::vector<std::vector<double>>;
using LossFn = std::function<double(const LayerParams&)>;

struct HessianOptions {
  int probes = 100;
  uint64_t seed = 0;
  double eps = 1e-3;
};

/// Hutchinson estimate of tr(H) / dim for the parameters of `layer`.
/// z^T H z uses the central second difference of the loss along z.
/// Throws kNonFiniteLoss if any loss evaluation is not finite.
double hessian_sensitivity(const LossFn& loss, const LayerParams& at, int layer,
                           const HessianOptions& opt = {});

/// Largest exponent e (within [-30, 30]) such that every v * 2^e lies in
/// the representable range of `imp`.
int fit_scale_exp(std::span<const double> v, const linear::BitImportance& imp);

/// ||Q(v) - v||^2 with Q rounding v * 2^e to the nearest representable value.
double quantization_error(std::span<const double> v, const linear::BitImportance& imp,
                          int scale_exp);

struct ConvLayerShape {
  int64_t n = 1;
  int64_t c = 1;
  int64_t k = 1;
  int64_t h = 8;
  int64_t w = 8;
  int in_bits = 8;  // activation width entering the layer
  int m = 2;        // Winograd output tile
};

/// Per-bit GEMM cost (offline + online) of one QWinConv layer at weight
/// width `lw`.
uint64_t winograd_layer_comm(const ConvLayerShape& shape, const linear::BitImportance& imp,
                             const proto::CostModel& cost);

struct SensitivityOptions {
  std::vector<int> candidates = default_candidate_bits();
  double outlier_threshold = 4.0;
  proto::CostModel cost;
};

/// Omega and C for each candidate width of a K x C x 3 x 3 kernel, given
/// the layer's average Hessian trace. Uses the re-weighted importance when
/// the transformed weights have outliers.
LayerSensitivity winograd_layer_sensitivity(const std::string& name, std::span<const double> kernel,
                                            const ConvLayerShape& shape, double hessian_trace,
                                            const SensitivityOptions& opt = {});

/// Flat list of {layer, bits, omega, comm_bits} rows.
nlohmann::json sensitivity_to_json(std::span<const LayerSensitivity> table);
/// Groups rows by layer in first-appearance order and sorts widths.
std::vector<LayerSensitivity> sensitivity_from_json(const nlohmann::json& j);

}  // namespace wino2pc::quant
