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

#include "wino2pc/cli/model.h"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/tensor_io.h"
#include "wino2pc/graph/exec.h"
#include "wino2pc/graph/random_graph.h"
#include "wino2pc/linear/gemm.h"
#include "wino2pc/quant/outliers.h"
#include "wino2pc/quant/sensitivity.h"
#include "wino2pc/winograd/plan.h"

namespace wino2pc::cli {

using graph::GemmKind;
using graph::GemmSpec;
using nlohmann::json;

namespace {

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> k{"input", "conv3x3", "relu", "residual_add", "fc", "output"};
  return k;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::string layer_name(const json& l) { return l.at("name").get<std::string>(); }

[[noreturn]] void bad_layer(const json& l, const std::string& what) {
  fail(ErrorCode::kInvalidParams,
       fmt::format("layer {}: {}", l.contains("name") ? l["name"].dump() : "?", what));
}

bool is_direct(const json& l, const LowerOptions& opt) {
  return opt.force_direct || get_or<int>(l, "stride", 1) != 1 ||
         get_or<std::string>(l, "algorithm", "winograd") == "direct";
}

// Smallest right shift that fits the range into `bits`.
int calibrate_shift(const graph::Range& r, int bits) {
  const __int128 lo = -(static_cast<__int128>(1) << (bits - 1));
  const __int128 hi = (static_cast<__int128>(1) << (bits - 1)) - 1;
  int d = 0;
  while (d < 62 && ((r.lo >> d) < lo || (r.hi >> d) > hi)) ++d;
  return d;
}

int max_abs_shift(int64_t max_abs, int bits) {
  const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
  int d = 0;
  while (d < 62 && (max_abs >> d) > hi) ++d;
  return d;
}

// Data calibration: the plaintext prefix on a seeded input.
int64_t observed_max_abs(const graph::GraphBuilder& b, int cur, uint64_t seed) {
  graph::GraphBuilder tmp = b;
  tmp.output(cur, "__calibrate");
  const auto g = tmp.build();
  std::mt19937_64 rng(seed);
  const QTensor y = graph::run_plain(g, graph::random_input(rng, g));
  int64_t mx = 0;
  for (int64_t v : y.data()) mx = std::max(mx, v < 0 ? -(v + 1) : v);
  return mx;
}

std::optional<QuantParams> activation_target(const Model& m, const json& l, graph::GraphBuilder& b,
                                             int cur) {
  if (!l.contains("l_a")) return std::nullopt;
  const graph::ValueType t = b.type_of(cur);
  QuantParams to;
  to.bits = l.at("l_a").get<int>();
  if (l.contains("act_scale_exp")) {
    to.scale_exp = l.at("act_scale_exp").get<int>();
  } else if (get_or<std::string>(m.doc, "calibration", "data") == "range") {
    to.scale_exp = t.scale_exp - calibrate_shift(t.range, to.bits);
  } else {
    const auto seed = get_or<uint64_t>(m.doc, "calibration_seed", 0);
    to.scale_exp = t.scale_exp - max_abs_shift(observed_max_abs(b, cur, seed), to.bits);
  }
  if (to.bits == t.bits && to.scale_exp == t.scale_exp) return std::nullopt;
  return to;
}

linear::BitImportance layer_importance(const json& l, std::span<const double> transformed) {
  if (l.contains("bit_importance")) {
    return linear::BitImportance(l.at("bit_importance").get<std::vector<int64_t>>());
  }
  const int lw = l.at("l_w").get<int>();
  const json rw = l.contains("reweight") ? l.at("reweight") : json("auto");
  bool use = false;
  if (rw.is_boolean()) {
    use = rw.get<bool>();
  } else if (rw == "auto") {
    const double thr = get_or<double>(l, "outlier_threshold", quant::kDefaultOutlierThreshold);
    try {
      use = quant::has_outliers(transformed, thr);
    } catch (const Error&) {
      use = false;  // constant tensor
    }
  } else {
    bad_layer(l, "reweight must be true, false or \"auto\"");
  }
  return use ? quant::reweight_bits(lw) : linear::BitImportance::standard(lw);
}

}  // namespace

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  WINO2PC_ENFORCE(in.good(), ErrorCode::kIoError, "cannot read model " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidParams, fmt::format("{}: {}", path.string(), e.what()));
  }
  return model_from_json(std::move(doc), path.parent_path());
}

Model model_from_json(json doc, std::filesystem::path base_dir) {
  Model m{std::move(doc), std::move(base_dir)};
  validate_model(m);
  return m;
}

void validate_model(const Model& m) {
  WINO2PC_ENFORCE(m.doc.is_object() && m.doc.contains("layers") && m.doc["layers"].is_array(),
                  ErrorCode::kInvalidParams, "model needs a layers list");
  std::set<std::string> names;
  int inputs = 0, outputs = 0;
  for (const auto& l : m.layers()) {
    if (!l.is_object() || !l.contains("name") || !l.contains("kind")) {
      bad_layer(l, "needs name and kind");
    }
    const auto kind = l.at("kind").get<std::string>();
    if (!known_kinds().count(kind)) bad_layer(l, "unknown kind " + kind);
    if (!names.insert(layer_name(l)).second) bad_layer(l, "duplicate name");
    if (kind == "input") {
      ++inputs;
      if (!l.contains("channels") || !l.contains("spatial") || !l.contains("l_a")) {
        bad_layer(l, "input needs channels, spatial and l_a");
      }
    }
    if (kind == "output") ++outputs;
    if (kind == "conv3x3" || kind == "fc") {
      if (!l.contains("out_channels")) bad_layer(l, "needs out_channels");
      if (!l.contains("l_w") && !l.contains("bit_importance")) bad_layer(l, "needs l_w or bit_importance");
      if (!l.contains("weights") && !l.contains("weight_values")) bad_layer(l, "needs weights or weight_values");
    }
    if (kind == "residual_add" && (!l.contains("inputs") || l["inputs"].size() != 2)) {
      bad_layer(l, "residual_add needs two inputs");
    }
  }
  WINO2PC_ENFORCE(inputs == 1 && outputs == 1, ErrorCode::kInvalidParams,
                  "model needs exactly one input and one output layer");
}

std::vector<double> layer_kernel(const Model& m, const json& l) {
  if (l.contains("weight_values")) return l.at("weight_values").get<std::vector<double>>();
  const auto path = m.base_dir / l.at("weights").get<std::string>();
  const QTensor t = load_qtensor(path.string());
  std::vector<double> out;
  out.reserve(t.data().size());
  for (int64_t v : t.data()) out.push_back(std::ldexp(static_cast<double>(v), -t.params().scale_exp));
  return out;
}

std::shared_ptr<GemmSpec> quantize_layer(const Model& m, const json& l, int64_t in_channels,
                                         const LowerOptions& opt) {
  const auto kind = l.at("kind").get<std::string>();
  auto s = std::make_shared<GemmSpec>();
  s->k = l.at("out_channels").get<int64_t>();
  s->c = in_channels;
  if (l.contains("in_channels") && l["in_channels"].get<int64_t>() != in_channels) {
    bad_layer(l, fmt::format("in_channels {} but input has {}", l["in_channels"].get<int64_t>(),
                             in_channels));
  }
  auto kernel = opt.kernel_source ? opt.kernel_source(l, s->k, s->c) : layer_kernel(m, l);
  const int64_t per = kind == "fc" ? 1 : 9;
  if (static_cast<int64_t>(kernel.size()) != s->k * s->c * per) {
    bad_layer(l, fmt::format("{} weights, expected {}", kernel.size(), s->k * s->c * per));
  }
  std::vector<double> target = kernel;
  if (kind == "fc") {
    s->kind = GemmKind::kDense;
  } else if (is_direct(l, opt)) {
    s->kind = GemmKind::kDirect;
    s->stride = get_or<int>(l, "stride", 1);
    s->pad = get_or<int>(l, "pad", 1);
  } else {
    s->kind = GemmKind::kWinograd;
    s->m = opt.m ? opt.m : get_or<int>(l, "m", 2);
    s->pad = get_or<int>(l, "pad", 1);
    target = winograd::weight_transform(kernel, s->k, s->c, winograd::winograd_matrices(s->m, 3));
  }
  s->importance = layer_importance(l, target);
  s->scale_exp = l.contains("weight_scale_exp") ? l.at("weight_scale_exp").get<int>()
                                                : quant::fit_scale_exp(target, s->importance);
  s->values.reserve(target.size());
  for (double v : target) s->values.push_back(s->importance.nearest(std::ldexp(v, s->scale_exp)));
  return s;
}

Lowered lower_model(const Model& m, const LowerOptions& opt) {
  graph::GraphBuilder b;
  Lowered out;
  int cur = -1;
  auto source = [&](const std::string& name, const json& l) {
    auto it = out.layer_node.find(name);
    if (it == out.layer_node.end()) bad_layer(l, "unknown input layer " + name);
    return it->second;
  };
  for (const auto& l : m.layers()) {
    const auto name = layer_name(l);
    const auto kind = l.at("kind").get<std::string>();
    if (kind != "input") {
      if (l.contains("input")) cur = source(l["input"].get<std::string>(), l);
      if (cur < 0) bad_layer(l, "no input before this layer");
    }
    if (kind == "input") {
      const auto sp = l.at("spatial").get<std::vector<int64_t>>();
      if (sp.size() != 2) bad_layer(l, "spatial must be [h, w]");
      QuantParams p;
      p.bits = l.at("l_a").get<int>();
      p.scale_exp = get_or<int>(l, "act_scale_exp", 0);
      cur = b.input({get_or<int64_t>(l, "batch", 1), l.at("channels").get<int64_t>(), sp[0], sp[1]},
                    p, name);
    } else if (kind == "conv3x3") {
      const graph::ValueType t = b.type_of(cur);
      if (t.shape.size() != 4) bad_layer(l, "conv3x3 needs an N x C x H x W input");
      auto it = opt.weights.find(name);
      std::shared_ptr<const GemmSpec> spec;
      if (it != opt.weights.end()) {
        spec = it->second;
      } else {
        spec = quantize_layer(m, l, t.shape[1], opt);
      }
      const auto to = activation_target(m, l, b, cur);
      cur = spec->kind == GemmKind::kWinograd ? b.qwinconv(cur, spec, to, name)
                                              : b.direct_conv(cur, spec, to, name);
    } else if (kind == "relu") {
      cur = b.relu(cur, name);
    } else if (kind == "residual_add") {
      const int main = source(l["inputs"][0].get<std::string>(), l);
      int skip = source(l["inputs"][1].get<std::string>(), l);
      const graph::ValueType mt = b.type_of(main), st = b.type_of(skip);
      const int d = mt.scale_exp - st.scale_exp;
      if (d < 0) {
        QuantParams to;
        to.bits = st.bits + d;
        to.scale_exp = mt.scale_exp;
        if (to.bits < 2) bad_layer(l, "skip branch cannot be aligned");
        skip = b.requant(skip, to, name + "/align");
      }
      // widen the main branch when the aligned skip needs more room
      const int need = b.type_of(skip).bits + std::max(d, 0);
      const int main_in = need > mt.bits ? b.ext(main, need, name + "/widen") : main;
      cur = b.residual_add(main_in, skip, graph::ResidualMode::kBaseline, name);
    } else if (kind == "fc") {
      const graph::ValueType t = b.type_of(cur);
      auto it = opt.weights.find(name);
      const int64_t c = t.numel() / t.shape[0];
      std::shared_ptr<const GemmSpec> spec =
          it != opt.weights.end() ? it->second : quantize_layer(m, l, c, opt);
      if (const auto to = activation_target(m, l, b, cur)) {
        cur = graph::append_requant_baseline(b, cur, *to, name + "/block1");
      }
      const graph::ValueType t2 = b.type_of(cur);
      const int acc = linear::gemm_accumulator_bits(t2.range.value_bits(), c, spec->importance);
      if (acc > t2.bits) cur = b.ext(cur, acc, name + "/ext");
      cur = b.gemm(cur, spec, name + "/gemm");
    } else {
      cur = b.output(cur, name);
    }
    out.layer_node[name] = cur;
  }
  out.graph = b.build();
  graph::infer_types(out.graph);
  return out;
}

json gemm_spec_to_json(const GemmSpec& s) {
  const char* kind = s.kind == GemmKind::kWinograd ? "winograd"
                     : s.kind == GemmKind::kDirect ? "direct"
                                                   : "dense";
  return {{"kind", kind},          {"k", s.k},
          {"c", s.c},              {"m", s.m},
          {"r", s.r},              {"stride", s.stride},
          {"pad", s.pad},          {"bit_importance", s.importance.weights()},
          {"scale_exp", s.scale_exp}, {"values", s.values}};
}

GemmSpec gemm_spec_from_json(const json& j) {
  GemmSpec s;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "winograd") {
      s.kind = GemmKind::kWinograd;
    } else if (kind == "direct") {
      s.kind = GemmKind::kDirect;
    } else if (kind == "dense") {
      s.kind = GemmKind::kDense;
    } else {
      fail(ErrorCode::kInvalidParams, "unknown gemm kind " + kind);
    }
    s.k = j.at("k").get<int64_t>();
    s.c = j.at("c").get<int64_t>();
    s.m = j.at("m").get<int>();
    s.r = j.at("r").get<int>();
    s.stride = j.at("stride").get<int>();
    s.pad = j.at("pad").get<int>();
    s.importance = linear::BitImportance(j.at("bit_importance").get<std::vector<int64_t>>());
    s.scale_exp = j.at("scale_exp").get<int>();
    s.values = j.at("values").get<std::vector<int64_t>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidParams, fmt::format("bad weight file: {}", e.what()));
  }
  WINO2PC_ENFORCE(static_cast<int64_t>(s.values.size()) == s.weight_count(),
                  ErrorCode::kInvalidParams, "weight count does not match the shape");
  for (int64_t v : s.values) {
    WINO2PC_ENFORCE(s.importance.representable(v), ErrorCode::kInvalidParams,
                    fmt::format("weight {} not representable", v));
  }
  return s;
}

std::vector<std::string> init_missing_weights(const Model& m, uint64_t seed) {
  std::vector<std::string> written;
  LowerOptions opt;
  int layer_index = 0;
  opt.kernel_source = [&](const json& l, int64_t k, int64_t c) {
    ++layer_index;
    const bool fc = l.at("kind").get<std::string>() == "fc";
    if (!l.contains("weights")) return layer_kernel(m, l);
    const auto path = m.base_dir / l.at("weights").get<std::string>();
    if (std::filesystem::exists(path)) return layer_kernel(m, l);
    std::mt19937_64 rng(seed * 1000003 + static_cast<uint64_t>(layer_index));
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(fc ? c : c * 9)));
    QuantParams p;
    p.bits = 12;
    p.scale_exp = 9;
    const Shape shape = fc ? Shape{k, c} : Shape{k, c, 3, 3};
    std::vector<int64_t> v(static_cast<size_t>(shape_numel(shape)));
    for (auto& x : v) {
      x = std::clamp<int64_t>(std::llround(std::ldexp(g(rng), p.scale_exp)), p.min_value(),
                              p.max_value());
    }
    save_qtensor(path.string(), QTensor(shape, std::move(v), p));
    written.push_back(path.string());
    return layer_kernel(m, l);
  };
  lower_model(m, opt);
  return written;
}

json random_conv_model(std::mt19937_64& rng, int lw, int la) {
  auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int c = ri(1, 4), k = ri(1, 4), h = ri(3, 10), w = ri(3, 10);
  std::normal_distribution<double> g(0.0, 0.4);
  std::vector<double> kernel(static_cast<size_t>(k * c * 9));
  for (auto& v : kernel) v = g(rng);
  json layers = json::array();
  layers.push_back({{"name", "x"}, {"kind", "input"}, {"channels", c}, {"spatial", {h, w}},
                    {"l_a", la}, {"act_scale_exp", ri(0, 4)}});
  layers.push_back({{"name", "conv"}, {"kind", "conv3x3"}, {"out_channels", k}, {"l_w", lw},
                    {"m", ri(0, 3) == 0 ? 4 : 2}, {"weight_values", kernel}});
  layers.push_back({{"name", "y"}, {"kind", "output"}});
  return {{"format", "wino2pc-model"}, {"version", 1}, {"layers", layers}};
}

}  // namespace wino2pc::cli
