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

#include "wino2pc/graph/serialize.h"

#include <fstream>

#include "wino2pc/core/errors.h"

namespace wino2pc::graph {
namespace {

using nlohmann::json;

constexpr int kGraphVersion = 1;

const char* gemm_kind_name(GemmKind k) {
  switch (k) {
    case GemmKind::kWinograd:
      return "winograd";
    case GemmKind::kDirect:
      return "direct";
    case GemmKind::kDense:
      return "dense";
  }
  return "?";
}

GemmKind gemm_kind_from(const std::string& s) {
  if (s == "winograd") return GemmKind::kWinograd;
  if (s == "direct") return GemmKind::kDirect;
  if (s == "dense") return GemmKind::kDense;
  fail(ErrorCode::kGraphError, "unknown gemm kind '" + s + "'");
}

json params_json(const QuantParams& p) {
  return {{"bits", p.bits}, {"scale_exp", p.scale_exp}, {"msb_known_nonneg", p.msb_known_nonneg}};
}

QuantParams params_from(const json& j) {
  QuantParams p;
  p.bits = j.at("bits").get<int>();
  p.scale_exp = j.at("scale_exp").get<int>();
  p.msb_known_nonneg = j.value("msb_known_nonneg", false);
  return p;
}

json node_json(const Node& n) {
  json j = {{"id", n.id}, {"kind", node_kind_name(n.kind)}, {"inputs", n.inputs}};
  if (!n.label.empty()) j["label"] = n.label;
  switch (n.kind) {
    case NodeKind::kInput:
      j["shape"] = n.shape;
      j["params"] = params_json(n.params);
      break;
    case NodeKind::kRequant:
      j["params"] = params_json(n.params);
      j["msb_known"] = n.msb_known;
      break;
    case NodeKind::kExt:
      j["bits"] = n.bits;
      j["msb_known"] = n.msb_known;
      break;
    case NodeKind::kNarrow:
      j["bits"] = n.bits;
      break;
    case NodeKind::kTrunc:
      j["shift"] = n.shift;
      j["msb_known"] = n.msb_known;
      break;
    case NodeKind::kTR:
      j["shift"] = n.shift;
      break;
    case NodeKind::kFeatureTransform:
    case NodeKind::kOutputTransform:
      j["tile"] = {{"m", n.tile.m}, {"n", n.tile.n}, {"h", n.tile.h}, {"w", n.tile.w},
                   {"pad", n.tile.pad}};
      break;
    case NodeKind::kGemm: {
      const GemmSpec& s = *n.gemm;
      j["gemm"] = {{"kind", gemm_kind_name(s.kind)},
                   {"k", s.k},
                   {"c", s.c},
                   {"m", s.m},
                   {"r", s.r},
                   {"stride", s.stride},
                   {"pad", s.pad},
                   {"bit_importance", s.importance.to_json()},
                   {"scale_exp", s.scale_exp},
                   {"values", s.values}};
      break;
    }
    case NodeKind::kResidualAdd:
      j["mode"] = n.residual == ResidualMode::kBaseline ? "baseline" : "simplified";
      break;
    case NodeKind::kRelu:
    case NodeKind::kOutput:
      break;
  }
  return j;
}

Node node_from(const json& j) {
  Node n;
  n.id = j.at("id").get<int>();
  n.kind = node_kind_from_name(j.at("kind").get<std::string>());
  n.inputs = j.at("inputs").get<std::vector<int>>();
  n.label = j.value("label", "");
  n.msb_known = j.value("msb_known", false);
  switch (n.kind) {
    case NodeKind::kInput:
      n.shape = j.at("shape").get<Shape>();
      n.params = params_from(j.at("params"));
      break;
    case NodeKind::kRequant:
      n.params = params_from(j.at("params"));
      break;
    case NodeKind::kExt:
    case NodeKind::kNarrow:
      n.bits = j.at("bits").get<int>();
      break;
    case NodeKind::kTrunc:
    case NodeKind::kTR:
      n.shift = j.at("shift").get<int>();
      break;
    case NodeKind::kFeatureTransform:
    case NodeKind::kOutputTransform: {
      const json& t = j.at("tile");
      n.tile = TileSpec{t.at("m").get<int>(), t.at("n").get<int64_t>(), t.at("h").get<int64_t>(),
                        t.at("w").get<int64_t>(), t.at("pad").get<int>()};
      break;
    }
    case NodeKind::kGemm: {
      const json& s = j.at("gemm");
      auto spec = std::make_shared<GemmSpec>();
      spec->kind = gemm_kind_from(s.at("kind").get<std::string>());
      spec->k = s.at("k").get<int64_t>();
      spec->c = s.at("c").get<int64_t>();
      spec->m = s.value("m", 2);
      spec->r = s.value("r", 3);
      spec->stride = s.value("stride", 1);
      spec->pad = s.value("pad", 1);
      spec->importance = linear::BitImportance::from_json(s.at("bit_importance"));
      spec->scale_exp = s.value("scale_exp", 0);
      spec->values = s.value("values", std::vector<int64_t>{});
      for (int64_t v : spec->values) {
        WINO2PC_ENFORCE(spec->importance.representable(v), ErrorCode::kGraphError,
                        "weight " + std::to_string(v) + " is not representable");
      }
      n.gemm = std::move(spec);
      break;
    }
    case NodeKind::kResidualAdd: {
      const std::string mode = j.value("mode", "baseline");
      WINO2PC_ENFORCE(mode == "baseline" || mode == "simplified", ErrorCode::kGraphError,
                      "unknown residual mode '" + mode + "'");
      n.residual = mode == "baseline" ? ResidualMode::kBaseline : ResidualMode::kSimplified;
      break;
    }
    case NodeKind::kRelu:
    case NodeKind::kOutput:
      break;
  }
  return n;
}

}  // namespace

json graph_to_json(const Graph& g) {
  json nodes = json::array();
  for (const Node& n : g.nodes()) nodes.push_back(node_json(n));
  return {{"format", "wino2pc-graph"}, {"version", kGraphVersion}, {"next_id", g.next_id()},
          {"nodes", nodes}};
}

Graph graph_from_json(const json& j) {
  Graph g;
  try {
    WINO2PC_ENFORCE(j.value("version", 0) == kGraphVersion, ErrorCode::kGraphError,
                    "unsupported graph version");
    int max_id = -1;
    for (const json& nj : j.at("nodes")) {
      g.mutable_nodes().push_back(node_from(nj));
      max_id = std::max(max_id, g.mutable_nodes().back().id);
    }
    g.set_next_id(std::max(j.value("next_id", 0), max_id + 1));
  } catch (const json::exception& e) {
    fail(ErrorCode::kGraphError, std::string("malformed graph: ") + e.what());
  }
  infer_types(g);
  return g;
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream f(path);
  WINO2PC_ENFORCE(f.good(), ErrorCode::kIoError, "cannot write " + path);
  f << graph_to_json(g).dump(1) << "\n";
}

Graph load_graph(const std::string& path) {
  std::ifstream f(path);
  WINO2PC_ENFORCE(f.good(), ErrorCode::kIoError, "cannot read " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIoError, path + ": " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace wino2pc::graph
