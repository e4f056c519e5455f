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

#include "wino2pc/graph/estimate.h"

#include "wino2pc/core/errors.h"
#include "wino2pc/proto/conversions.h"

namespace wino2pc::graph {
namespace {

using net::Phase;

uint64_t u64(int64_t v) { return static_cast<uint64_t>(v); }

}  // namespace

std::string node_label(const Node& n) {
  return n.label.empty() ? "n" + std::to_string(n.id) : n.label;
}

CommEstimate estimate_comm(const Graph& g, const proto::CostModel& cost) {
  const auto types = infer_types(g);
  CommEstimate est;
  est.per_node.assign(g.size(), 0);
  for (size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.nodes()[i];
    const std::string label = node_label(n);
    auto rec = [&](const char* protocol, Phase phase, uint64_t bits) {
      est.records.add({protocol, label, phase, bits, 0});
      est.per_node[i] += bits;
    };
    const ValueType& out = types[i];
    const ValueType* in = n.inputs.empty() ? nullptr : &types[static_cast<size_t>(g.index_of(n.inputs[0]))];
    switch (n.kind) {
      case NodeKind::kInput:
        rec("input", Phase::kOnline, u64(out.numel()) * u64(out.bits));
        break;
      case NodeKind::kOutput:
        rec("output", Phase::kOnline, u64(out.numel()) * u64(out.bits));
        break;
      case NodeKind::kExt:
        rec("ext", Phase::kOnline, u64(out.numel()) * cost.ext(in->bits, n.bits, n.msb_known));
        break;
      case NodeKind::kTrunc:
        rec("trunc", Phase::kOnline, u64(out.numel()) * cost.trunc(in->bits, n.shift, n.msb_known));
        break;
      case NodeKind::kTR:
        rec("tr", Phase::kOnline, u64(out.numel()) * cost.truncate_reduce(in->bits, n.shift));
        break;
      case NodeKind::kRequant: {
        int bits = in->bits;
        for (const auto& s : proto::requant_steps(in->params(), n.params)) {
          if (s.kind == proto::StepKind::kTr) {
            rec("tr", Phase::kOnline, u64(out.numel()) * cost.truncate_reduce(bits, s.arg));
            bits -= s.arg;
          } else if (s.kind == proto::StepKind::kExt) {
            rec("ext", Phase::kOnline, u64(out.numel()) * cost.ext(bits, s.arg, n.msb_known));
            bits = s.arg;
          } else if (s.kind == proto::StepKind::kNarrow) {
            bits = s.arg;
          }
        }
        break;
      }
      case NodeKind::kNarrow:
      case NodeKind::kFeatureTransform:
      case NodeKind::kOutputTransform:
        break;
      case NodeKind::kGemm: {
        const GemmSpec& gs = *n.gemm;
        int64_t ots = gs.ots();
        int64_t cols = 0;
        switch (gs.kind) {
          case GemmKind::kWinograd:
            cols = out.shape[2];
            break;
          case GemmKind::kDirect:
            cols = out.shape[0] * out.shape[2] * out.shape[3];
            break;
          case GemmKind::kDense:
            cols = out.shape[0];
            break;
        }
        rec("gemm", Phase::kOffline, u64(ots) * cost.gemm_offline_per_ot());
        rec("gemm", Phase::kOnline, u64(ots) * cost.gemm_online_per_ot(cols, out.bits));
        break;
      }
      case NodeKind::kRelu:
        rec("relu", Phase::kOnline, u64(out.numel()) * cost.relu(out.bits));
        break;
      case NodeKind::kResidualAdd: {
        const ValueType& m = *in;
        const ValueType& r = types[static_cast<size_t>(g.index_of(n.inputs[1]))];
        if (n.residual == ResidualMode::kBaseline) {
          rec("ext", Phase::kOnline, u64(out.numel()) * cost.ext(m.bits, m.bits + 1));
        }
        if (r.bits < out.bits) {
          rec("ext", Phase::kOnline, u64(out.numel()) * cost.ext(r.bits, out.bits, r.nonneg));
        }
        break;
      }
    }
  }
  return est;
}

bool same_modeled(const net::CommLedger& a, const net::CommLedger& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].protocol != y[i].protocol || x[i].label != y[i].label || x[i].phase != y[i].phase ||
        x[i].modeled_bits != y[i].modeled_bits) {
      return false;
    }
  }
  return true;
}

}  // namespace wino2pc::graph
