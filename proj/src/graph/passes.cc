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

#include "wino2pc/graph/passes.h"

#include <algorithm>
#include <functional>
#include <optional>

#include "wino2pc/core/errors.h"
#include "wino2pc/graph/estimate.h"

namespace wino2pc::graph {
namespace {

// Estimated cost, or nullopt if the graph does not type-check.
std::optional<uint64_t> checked_cost(const Graph& g, const proto::CostModel& cost) {
  try {
    return estimate_comm(g, cost).total();
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct Rewriter {
  const proto::CostModel& cost;
  Graph g;
  uint64_t current;

  Rewriter(const Graph& in, const proto::CostModel& c) : cost(c), g(in) {
    current = estimate_comm(g, cost).total();
  }

  bool try_accept(const Graph& cand, bool strict) {
    const auto c = checked_cost(cand, cost);
    if (!c || *c > current || (strict && *c == current)) return false;
    g = cand;
    current = *c;
    return true;
  }
};

bool single_consumer(const Graph& g, int id, int consumer) {
  const auto cs = g.consumers(id);
  return cs.size() == 1 && cs[0] == consumer;
}

int input_bits(const Graph& g, const std::vector<ValueType>& types, const Node& n) {
  return types[static_cast<size_t>(g.index_of(n.inputs[0]))].bits;
}

std::string block_prefix(const std::string& label) {
  const auto p = label.rfind('/');
  return p == std::string::npos ? std::string() : label.substr(0, p);
}

// Repeatedly scans node ids and applies `step` until nothing changes.
Graph rewrite_all(const Graph& in, const proto::CostModel& cost,
                  const std::function<bool(Rewriter&, int)>& step) {
  Rewriter rw(in, cost);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> ids;
    for (const Node& n : rw.g.nodes()) ids.push_back(n.id);
    for (int id : ids) {
      if (!rw.g.contains(id)) continue;
      if (step(rw, id)) {
        changed = true;
        break;
      }
    }
  }
  return rw.g;
}

}  // namespace

Graph decompose_trunc(const Graph& g, const proto::CostModel& cost) {
  std::vector<int> tried;
  return rewrite_all(g, cost, [&](Rewriter& rw, int id) {
    const Node& n = rw.g.node(id);
    if (n.kind != NodeKind::kTrunc) return false;
    if (std::find(tried.begin(), tried.end(), id) != tried.end()) return false;
    tried.push_back(id);
    const auto types = infer_types(rw.g);
    const int l1 = input_bits(rw.g, types, n);
    Graph cand = rw.g;
    Node& t = cand.mutable_node(id);
    Node e;
    e.kind = NodeKind::kExt;
    e.bits = l1;
    e.msb_known = t.msb_known;
    e.label = t.label;
    t.kind = NodeKind::kTR;
    t.msb_known = false;
    cand.insert_after(id, std::move(e));
    return rw.try_accept(cand, false);
  });
}

Graph fuse_trunc_ext(const Graph& g, const proto::CostModel& cost) {
  return rewrite_all(g, cost, [&](Rewriter& rw, int id) {
    const Node& n = rw.g.node(id);
    if (n.kind != NodeKind::kTrunc) return false;
    const auto cs = rw.g.consumers(id);
    if (cs.size() != 1) return false;
    const Node& c = rw.g.node(cs[0]);
    if (c.kind != NodeKind::kExt && c.kind != NodeKind::kNarrow) return false;
    const auto types = infer_types(rw.g);
    const int reduced = input_bits(rw.g, types, n) - n.shift;
    Graph cand = rw.g;
    Node& t = cand.mutable_node(id);
    t.kind = NodeKind::kTR;
    t.msb_known = false;
    Node& cc = cand.mutable_node(cs[0]);
    if (cc.kind == NodeKind::kNarrow) {
      if (cc.bits == reduced) {
        cand.bypass(cs[0]);
      } else if (cc.bits > reduced) {
        cc.kind = NodeKind::kExt;
        cc.msb_known = false;
      }
    }
    return rw.try_accept(cand, true);
  });
}

Graph fuse_ext_ext(const Graph& g, const proto::CostModel& cost) {
  Graph fused = rewrite_all(g, cost, [&](Rewriter& rw, int id) {
    const Node& a = rw.g.node(id);
    if (a.kind != NodeKind::kExt && a.kind != NodeKind::kNarrow) return false;
    const auto cs = rw.g.consumers(id);
    if (cs.size() != 1) return false;
    const Node& b = rw.g.node(cs[0]);
    if (b.kind != NodeKind::kExt && b.kind != NodeKind::kNarrow) return false;
    if (a.kind == NodeKind::kNarrow && b.kind == NodeKind::kExt) return false;
    const auto types = infer_types(rw.g);
    const int from = input_bits(rw.g, types, a);
    Graph cand = rw.g;
    Node& na = cand.mutable_node(id);
    if (b.bits == from) {
      cand.bypass(cs[0]);
      cand.bypass(id);
    } else {
      if (b.bits < from) {
        na.kind = NodeKind::kNarrow;
        na.msb_known = false;
      }
      na.bits = b.bits;
      cand.bypass(cs[0]);
    }
    return rw.try_accept(cand, true);
  });
  // An Ext fed by a TR of the same block (possibly through a Narrow) is
  // accounted to that block.
  for (Node& n : fused.mutable_nodes()) {
    if (n.kind != NodeKind::kExt) continue;
    const Node* src = &fused.node(n.inputs[0]);
    if (src->kind == NodeKind::kNarrow) src = &fused.node(src->inputs[0]);
    if (src->kind == NodeKind::kTR && !block_prefix(n.label).empty() &&
        block_prefix(n.label) == block_prefix(src->label)) {
      n.label = src->label;
    }
  }
  return fused;
}

Graph fuse_across_local(const Graph& g, const proto::CostModel& cost) {
  std::vector<int> tried;
  return rewrite_all(g, cost, [&](Rewriter& rw, int id) {
    const Node& e = rw.g.node(id);
    if (e.kind != NodeKind::kExt) return false;
    if (std::find(tried.begin(), tried.end(), id) != tried.end()) return false;
    // Walk up through single-consumer linear nodes.
    int child = id;
    int q = e.inputs[0];
    int hops = 0;
    while (true) {
      const Node& qn = rw.g.node(q);
      const bool linear = qn.kind == NodeKind::kFeatureTransform ||
                          qn.kind == NodeKind::kOutputTransform || qn.kind == NodeKind::kGemm;
      if (!linear || !single_consumer(rw.g, q, child)) break;
      child = q;
      q = qn.inputs[0];
      ++hops;
    }
    if (hops == 0) return false;
    tried.push_back(id);
    Graph cand = rw.g;
    const Node& qn = cand.node(q);
    if (qn.kind == NodeKind::kExt && single_consumer(cand, q, child)) {
      cand.mutable_node(q).bits = e.bits;
      cand.bypass(id);
    } else {
      Node moved = e;
      moved.id = cand.next_id();
      moved.inputs = {q};
      cand.set_next_id(moved.id + 1);
      cand.bypass(id);
      auto& nodes = cand.mutable_nodes();
      nodes.insert(nodes.begin() + cand.index_of(q) + 1, moved);
      for (int& i : cand.mutable_node(child).inputs) {
        if (i == q) i = moved.id;
      }
    }
    return rw.try_accept(cand, true);
  });
}

Graph simplify_residual(const Graph& g, const proto::CostModel& cost) {
  return rewrite_all(g, cost, [&](Rewriter& rw, int id) {
    const Node& n = rw.g.node(id);
    if (n.kind != NodeKind::kResidualAdd || n.residual != ResidualMode::kBaseline) return false;
    Graph cand = rw.g;
    cand.mutable_node(id).residual = ResidualMode::kSimplified;
    return rw.try_accept(cand, true);
  });
}

Graph propagate_msb(const Graph& g, const proto::CostModel& cost) {
  (void)cost;
  Graph out = g;
  const auto types = infer_types(g);
  for (Node& n : out.mutable_nodes()) {
    if (n.kind != NodeKind::kExt && n.kind != NodeKind::kTrunc && n.kind != NodeKind::kRequant) {
      continue;
    }
    if (types[static_cast<size_t>(g.index_of(n.inputs[0]))].nonneg) n.msb_known = true;
  }
  return out;
}

const std::vector<std::string>& pass_names() { return default_pipeline(); }

const std::vector<std::string>& default_pipeline() {
  static const std::vector<std::string> kPasses = {
      "decompose_trunc", "fuse_across_local", "fuse_ext_ext",
      "fuse_trunc_ext",  "simplify_residual", "propagate_msb"};
  return kPasses;
}

Graph run_pass(const std::string& name, const Graph& g, const proto::CostModel& cost) {
  if (name == "decompose_trunc") return decompose_trunc(g, cost);
  if (name == "fuse_across_local") return fuse_across_local(g, cost);
  if (name == "fuse_ext_ext") return fuse_ext_ext(g, cost);
  if (name == "fuse_trunc_ext") return fuse_trunc_ext(g, cost);
  if (name == "simplify_residual") return simplify_residual(g, cost);
  if (name == "propagate_msb") return propagate_msb(g, cost);
  fail(ErrorCode::kInvalidParams, "unknown pass '" + name + "'");
}

Graph run_pipeline(const Graph& g, const std::vector<std::string>& passes,
                   const proto::CostModel& cost, std::vector<PassStep>* steps) {
  Graph cur = g;
  if (passes.empty() || cur.empty()) return cur;
  for (int round = 0; round < 16; ++round) {
    const Graph start = cur;
    for (const auto& name : passes) {
      const uint64_t before = estimate_comm(cur, cost).total();
      cur = run_pass(name, cur, cost);
      if (steps) steps->push_back({round, name, before, estimate_comm(cur, cost).total()});
    }
    if (cur == start) return cur;
  }
  fail(ErrorCode::kInvariantViolation, "pass pipeline did not reach a fixpoint");
}

}  // namespace wino2pc::graph
