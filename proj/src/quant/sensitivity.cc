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

#include "wino2pc/quant/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/linear/gemm.h"
#include "wino2pc/linear/qwinconv.h"
#include "wino2pc/quant/outliers.h"
#include "wino2pc/winograd/plan.h"
#include "wino2pc/winograd/tiling.h"

namespace wino2pc::quant {

void LayerSensitivity::validate() const {
  WINO2PC_ENFORCE(!bits.empty() && omega.size() == bits.size() && comm.size() == bits.size(),
                  ErrorCode::kInvalidParams, fmt::format("layer {}: malformed table", layer));
  for (size_t i = 1; i < bits.size(); ++i) {
    WINO2PC_ENFORCE(bits[i] > bits[i - 1], ErrorCode::kInvalidParams,
                    fmt::format("layer {}: widths must ascend", layer));
    WINO2PC_ENFORCE(omega[i] <= omega[i - 1], ErrorCode::kInvalidParams,
                    fmt::format("layer {}: omega grows with width", layer));
    WINO2PC_ENFORCE(comm[i] >= comm[i - 1], ErrorCode::kInvalidParams,
                    fmt::format("layer {}: comm shrinks with width", layer));
  }
}

std::vector<int> default_candidate_bits() { return {2, 3, 4, 6, 8}; }

double hessian_sensitivity(const LossFn& loss, const LayerParams& at, int layer,
                           const HessianOptions& opt) {
  WINO2PC_ENFORCE(layer >= 0 && layer < static_cast<int>(at.size()), ErrorCode::kInvalidParams,
                  "layer out of range");
  WINO2PC_ENFORCE(opt.probes > 0 && opt.eps > 0, ErrorCode::kInvalidParams,
                  "need positive probes and eps");
  const auto& w = at[static_cast<size_t>(layer)];
  WINO2PC_ENFORCE(!w.empty(), ErrorCode::kInvalidParams, "empty layer");
  auto eval = [&](const LayerParams& p) {
    const double v = loss(p);
    WINO2PC_ENFORCE(std::isfinite(v), ErrorCode::kNonFiniteLoss, "loss is not finite");
    return v;
  };
  const double l0 = eval(at);
  double sum = 0.0;
  LayerParams plus = at, minus = at;
  for (int probe = 0; probe < opt.probes; ++probe) {
    std::seed_seq seq{opt.seed, static_cast<uint64_t>(probe)};
    std::mt19937_64 rng(seq);
    auto& wp = plus[static_cast<size_t>(layer)];
    auto& wm = minus[static_cast<size_t>(layer)];
    for (size_t i = 0; i < w.size(); ++i) {
      const double z = (rng() & 1) ? 1.0 : -1.0;
      wp[i] = w[i] + opt.eps * z;
      wm[i] = w[i] - opt.eps * z;
    }
    sum += (eval(plus) - 2.0 * l0 + eval(minus)) / (opt.eps * opt.eps);
  }
  return sum / opt.probes / static_cast<double>(w.size());
}

int fit_scale_exp(std::span<const double> v, const linear::BitImportance& imp) {
  const double hi = static_cast<double>(imp.max_value());
  const double lo = static_cast<double>(imp.min_value());
  auto fits = [&](int e) {
    return std::all_of(v.begin(), v.end(), [&](double x) {
      const double y = std::ldexp(x, e);
      return y <= hi + 0.5 && y >= lo - 0.5;
    });
  };
  int e = 30;
  while (e > -30 && !fits(e)) --e;
  return e;
}

double quantization_error(std::span<const double> v, const linear::BitImportance& imp,
                          int scale_exp) {
  double err = 0.0;
  for (double x : v) {
    const double q =
        std::ldexp(static_cast<double>(imp.nearest(std::ldexp(x, scale_exp))), -scale_exp);
    err += (q - x) * (q - x);
  }
  return err;
}

uint64_t winograd_layer_comm(const ConvLayerShape& s, const linear::BitImportance& imp,
                             const proto::CostModel& cost) {
  const auto plan = winograd::winograd_matrices(s.m, 3);
  const auto widths = linear::qwinconv_widths(s.in_bits, s.c, imp, plan);
  const int64_t tiles = winograd::TileGrid::make(s.n, s.c, s.h, s.w, 1, plan).tiles();
  const int64_t ots = s.k * s.c * imp.bits() * plan.positions();
  return linear::gemm_offline_cost(cost, ots) +
         linear::gemm_online_cost(cost, ots, tiles, widths.acc_bits);
}

LayerSensitivity winograd_layer_sensitivity(const std::string& name, std::span<const double> kernel,
                                            const ConvLayerShape& shape, double hessian_trace,
                                            const SensitivityOptions& opt) {
  const auto plan = winograd::winograd_matrices(shape.m, 3);
  const auto t = winograd::weight_transform(kernel, shape.k, shape.c, plan);
  const bool outliers = has_outliers(t, opt.outlier_threshold);
  LayerSensitivity out;
  out.layer = name;
  auto cands = opt.candidates;
  std::sort(cands.begin(), cands.end());
  for (int b : cands) {
    const auto imp = outliers ? reweight_bits(b) : linear::BitImportance::standard(b);
    out.bits.push_back(b);
    out.omega.push_back(hessian_trace * quantization_error(t, imp, fit_scale_exp(t, imp)));
    out.comm.push_back(winograd_layer_comm(shape, imp, opt.cost));
  }
  return out;
}

nlohmann::json sensitivity_to_json(std::span<const LayerSensitivity> table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& l : table) {
    for (size_t i = 0; i < l.size(); ++i) {
      rows.push_back({{"layer", l.layer}, {"bits", l.bits[i]}, {"omega", l.omega[i]},
                      {"comm_bits", l.comm[i]}});
    }
  }
  return rows;
}

std::vector<LayerSensitivity> sensitivity_from_json(const nlohmann::json& j) {
  WINO2PC_ENFORCE(j.is_array(), ErrorCode::kInvalidParams, "sensitivity table must be a list");
  std::vector<LayerSensitivity> out;
  std::map<std::string, size_t> index;
  try {
    for (const auto& row : j) {
      const auto name = row.at("layer").get<std::string>();
      auto [it, fresh] = index.emplace(name, out.size());
      if (fresh) out.push_back(LayerSensitivity{name, {}, {}, {}});
      auto& l = out[it->second];
      l.bits.push_back(row.at("bits").get<int>());
      l.omega.push_back(row.at("omega").get<double>());
      l.comm.push_back(row.at("comm_bits").get<uint64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidParams, fmt::format("bad sensitivity row: {}", e.what()));
  }
  for (auto& l : out) {
    std::vector<size_t> order(l.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return l.bits[a] < l.bits[b]; });
    LayerSensitivity s{l.layer, {}, {}, {}};
    for (size_t i : order) {
      s.bits.push_back(l.bits[i]);
      s.omega.push_back(l.omega[i]);
      s.comm.push_back(l.comm[i]);
    }
    s.validate();
    l = std::move(s);
  }
  return out;
}

}  // namespace wino2pc::quant
