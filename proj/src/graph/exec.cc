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

#include "wino2pc/graph/exec.h"

#include <map>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/graph/estimate.h"
#include "wino2pc/linear/activation.h"
#include "wino2pc/linear/gemm.h"
#include "wino2pc/linear/qwinconv.h"
#include "wino2pc/net/local_session.h"
#include "wino2pc/proto/conversions.h"
#include "wino2pc/winograd/tiling.h"

namespace wino2pc::graph {
namespace {

using linear::GemmWeights;
using net::Party;
using net::Share;

void check_input(const Graph& g, const QTensor& x) {
  const Node& in = g.node(g.input_id());
  WINO2PC_ENFORCE(x.shape() == in.shape, ErrorCode::kShapeMismatch,
                  "input tensor " + shape_str(x.shape()) + " != graph input " +
                      shape_str(in.shape));
  WINO2PC_ENFORCE(x.params().same_format(in.params), ErrorCode::kParamMismatch,
                  fmt::format("input tensor is {}-bit 2^-{}, graph expects {}-bit 2^-{}",
                              x.params().bits, x.params().scale_exp, in.params.bits,
                              in.params.scale_exp));
}

linear::WinogradWeights winograd_weights(const GemmSpec& s) {
  linear::WinogradWeights w;
  w.k = s.k;
  w.c = s.c;
  w.m = s.m;
  w.importance = s.importance;
  w.scale_exp = s.scale_exp;
  w.values = s.values;
  return w;
}

linear::DirectWeights direct_weights(const GemmSpec& s) {
  return linear::DirectWeights{s.k, s.c, s.r, s.importance, s.scale_exp, s.values};
}

// Server weights, or shape-only copies for the client.
std::vector<GemmWeights> gemm_weights(const GemmSpec& s, bool server) {
  switch (s.kind) {
    case GemmKind::kWinograd: {
      const auto w = winograd_weights(s);
      return server ? w.per_position() : w.public_per_position();
    }
    case GemmKind::kDirect: {
      if (server) return {direct_weights(s).as_gemm()};
      return {GemmWeights{s.k, s.c * s.r * s.r, s.importance, {}}};
    }
    case GemmKind::kDense:
      if (server) return {GemmWeights::from_values(s.values, s.k, s.c, s.importance)};
      return {GemmWeights{s.k, s.c, s.importance, {}}};
  }
  return {};
}

// Y = W X over Z_{2^bits} for each product; x holds the L x n blocks back to back.
std::vector<RingElem> ring_gemm(const std::vector<GemmWeights>& ws, std::span<const RingElem> x,
                                int64_t n, int bits) {
  std::vector<RingElem> y;
  size_t off = 0;
  for (const auto& w : ws) {
    const auto wv = w.decode();
    const size_t base = y.size();
    y.resize(base + static_cast<size_t>(w.rows * n), 0);
    for (int64_t i = 0; i < w.rows; ++i) {
      for (int64_t j = 0; j < w.cols; ++j) {
        const RingElem c = static_cast<RingElem>(wv[static_cast<size_t>(i * w.cols + j)]);
        if (c == 0) continue;
        const RingElem* xr = x.data() + off + static_cast<size_t>(j * n);
        RingElem* yr = y.data() + base + static_cast<size_t>(i * n);
        for (int64_t k = 0; k < n; ++k) yr[k] += c * xr[k];
      }
    }
    off += static_cast<size_t>(w.cols * n);
  }
  for (auto& v : y) v &= ring_mask(bits);
  return y;
}

template <typename T>
std::vector<T> transpose(std::span<const T> x, int64_t rows, int64_t cols) {
  std::vector<T> out(x.size());
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) out[static_cast<size_t>(j * rows + i)] = x[static_cast<size_t>(i * cols + j)];
  }
  return out;
}

std::vector<RingElem> to_ring_vec(const QTensor& x) {
  std::vector<RingElem> out(x.data().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = to_ring(x.data()[i], x.params().bits);
  return out;
}

QTensor from_ring_vec(const std::vector<RingElem>& v, const ValueType& t) {
  std::vector<int64_t> d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = to_signed(v[i], t.bits);
  return QTensor(t.shape, std::move(d), t.params());
}

QTensor with_type(QTensor x, const ValueType& t) {
  WINO2PC_ENFORCE(x.shape() == t.shape && x.params().bits == t.bits &&
                      x.params().scale_exp == t.scale_exp,
                  ErrorCode::kInvariantViolation, "executor and type checker disagree");
  return QTensor(t.shape, x.data(), t.params());
}

Share share_of(const Share& like, const ValueType& t, std::vector<RingElem> values) {
  Share s;
  s.owner = like.owner;
  s.shape = t.shape;
  s.values = std::move(values);
  s.params = t.params();
  return s;
}

// Ring-level work shared by both executors for the local and GEMM nodes.
std::vector<RingElem> local_op(const Node& n, std::span<const RingElem> x, const ValueType& in,
                               const ValueType& out) {
  const auto plan = n.tile.plan();
  if (n.kind == NodeKind::kFeatureTransform) {
    const auto grid = winograd::TileGrid::make(n.tile.n, in.shape[1], n.tile.h, n.tile.w,
                                               n.tile.pad, plan);
    const auto tiles = winograd::tile_partition<RingElem>(x, grid);
    return winograd::feature_transform(tiles, in.shape[1], grid.tiles(), plan, in.bits,
                                       in.range.value_bits());
  }
  const auto grid =
      winograd::TileGrid::make(n.tile.n, in.shape[1], n.tile.h, n.tile.w, n.tile.pad, plan);
  const auto tiles = winograd::output_transform(x, in.shape[1], grid.tiles(), plan, in.bits,
                                                in.range.value_bits());
  auto y = winograd::tile_merge<RingElem>(tiles, grid, in.shape[1]);
  WINO2PC_ENFORCE(static_cast<int64_t>(y.size()) == out.numel(), ErrorCode::kInvariantViolation,
                  "output transform size");
  return y;
}

}  // namespace

QTensor run_plain(const Graph& g, const QTensor& input) {
  const auto types = infer_types(g);
  check_input(g, input);
  std::map<int, QTensor> vals;
  auto arg = [&](const Node& n, size_t k) -> const QTensor& { return vals.at(n.inputs[k]); };
  for (size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.nodes()[i];
    const ValueType& t = types[i];
    QTensor y;
    switch (n.kind) {
      case NodeKind::kInput:
        y = input;
        break;
      case NodeKind::kRequant:
        y = proto::requant_plain(arg(n, 0), n.params);
        break;
      case NodeKind::kExt:
        y = proto::ext_plain(arg(n, 0), n.bits);
        break;
      case NodeKind::kTrunc:
        y = proto::trunc_plain(arg(n, 0), n.shift);
        break;
      case NodeKind::kTR:
        y = proto::truncate_reduce_plain(arg(n, 0), n.shift);
        break;
      case NodeKind::kNarrow:
        y = proto::narrow_plain(arg(n, 0), n.bits);
        break;
      case NodeKind::kFeatureTransform:
      case NodeKind::kOutputTransform: {
        const ValueType& in = types[static_cast<size_t>(g.index_of(n.inputs[0]))];
        y = from_ring_vec(local_op(n, to_ring_vec(arg(n, 0)), in, t), t);
        break;
      }
      case NodeKind::kGemm: {
        const GemmSpec& s = *n.gemm;
        WINO2PC_ENFORCE(!s.values.empty(), ErrorCode::kGraphError,
                        "plain execution needs the weights of node " + std::to_string(n.id));
        const auto ws = gemm_weights(s, true);
        const QTensor& x = arg(n, 0);
        const auto xr = to_ring_vec(x);
        if (s.kind == GemmKind::kWinograd) {
          y = from_ring_vec(ring_gemm(ws, xr, x.shape()[2], t.bits), t);
        } else if (s.kind == GemmKind::kDirect) {
          winograd::ConvShape cs{x.shape()[0], s.c, x.shape()[2], x.shape()[3], s.k, s.r, s.stride, s.pad};
          const auto cols = linear::im2col<RingElem>(xr, cs);
          const auto yr = ring_gemm(ws, cols, cs.n * cs.out_h() * cs.out_w(), t.bits);
          y = from_ring_vec(linear::col2out<RingElem>(yr, s.k, cs), t);
        } else {
          const int64_t nb = x.shape()[0];
          const auto xt = transpose<RingElem>(xr, nb, s.c);
          const auto yr = ring_gemm(ws, xt, nb, t.bits);
          y = from_ring_vec(transpose<RingElem>(yr, s.k, nb), t);
        }
        break;
      }
      case NodeKind::kRelu:
        y = linear::relu_plain(arg(n, 0));
        break;
      case NodeKind::kResidualAdd: {
        QTensor m = arg(n, 0);
        if (n.residual == ResidualMode::kBaseline) m = proto::ext_plain(m, m.params().bits + 1);
        y = linear::residual_add_plain(m, arg(n, 1), t.bits);
        break;
      }
      case NodeKind::kOutput:
        y = arg(n, 0);
        break;
    }
    vals[n.id] = with_type(std::move(y), t);
  }
  return vals.at(g.output_id());
}

std::optional<QTensor> run_2pc(Party& p, const Graph& g, const std::optional<QTensor>& input) {
  const auto types = infer_types(g);
  if (input) check_input(g, *input);
  WINO2PC_ENFORCE(p.is_server() != input.has_value(), ErrorCode::kInvalidParams,
                  "exactly the client supplies the input");
  const std::string saved = p.label();
  std::map<int, Share> vals;
  std::optional<QTensor> result;
  auto arg = [&](const Node& n, size_t k) -> const Share& { return vals.at(n.inputs[k]); };
  for (size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.nodes()[i];
    const ValueType& t = types[i];
    p.set_label(node_label(n));
    Share y;
    switch (n.kind) {
      case NodeKind::kInput:
        y = proto::input_share(p, input, n.shape, n.params);
        break;
      case NodeKind::kRequant:
        y = proto::requant(p, arg(n, 0), n.params, n.msb_known);
        break;
      case NodeKind::kExt:
        y = proto::ext(p, arg(n, 0), n.bits, n.msb_known);
        break;
      case NodeKind::kTrunc:
        y = proto::trunc(p, arg(n, 0), n.shift, n.msb_known);
        break;
      case NodeKind::kTR:
        y = proto::truncate_reduce(p, arg(n, 0), n.shift);
        break;
      case NodeKind::kNarrow:
        y = proto::narrow(arg(n, 0), n.bits);
        break;
      case NodeKind::kFeatureTransform:
      case NodeKind::kOutputTransform: {
        const ValueType& in = types[static_cast<size_t>(g.index_of(n.inputs[0]))];
        y = share_of(arg(n, 0), t, local_op(n, arg(n, 0).values, in, t));
        break;
      }
      case NodeKind::kGemm: {
        const GemmSpec& s = *n.gemm;
        const Share& x = arg(n, 0);
        const ValueType& in = types[static_cast<size_t>(g.index_of(n.inputs[0]))];
        const int vb = in.range.value_bits();
        if (s.kind == GemmKind::kWinograd) {
          const auto ws = gemm_weights(s, p.is_server());
          y = share_of(x, t, linear::ot_gemm_batched(p, ws, x.values, x.shape[2], x.bits(), vb));
        } else if (s.kind == GemmKind::kDirect) {
          auto w = direct_weights(s);
          if (!p.is_server()) w.values.clear();
          y = share_of(x, t, linear::direct_conv_2pc(p, x, w, s.stride, s.pad, vb).values);
        } else {
          const auto ws = gemm_weights(s, p.is_server());
          const int64_t nb = x.shape[0];
          const auto xt = transpose<RingElem>(x.values, nb, s.c);
          const auto yr = linear::ot_gemm_batched(p, ws, xt, nb, x.bits(), vb);
          y = share_of(x, t, transpose<RingElem>(yr, s.k, nb));
        }
        break;
      }
      case NodeKind::kRelu:
        y = linear::relu_2pc(p, arg(n, 0));
        break;
      case NodeKind::kResidualAdd:
        y = n.residual == ResidualMode::kBaseline
                ? linear::residual_add_baseline(p, arg(n, 0), arg(n, 1))
                : linear::residual_add_simplified(p, arg(n, 0), arg(n, 1));
        break;
      case NodeKind::kOutput:
        y = arg(n, 0);
        result = proto::reveal_to_client(p, y);
        if (result) result = QTensor(result->shape(), result->data(), t.params());
        break;
    }
    WINO2PC_ENFORCE(y.shape == t.shape && y.bits() == t.bits && y.params.scale_exp == t.scale_exp,
                    ErrorCode::kInvariantViolation,
                    fmt::format("node {}: executor and type checker disagree", n.id));
    y.params = t.params();
    vals[n.id] = std::move(y);
  }
  p.set_label(saved);
  return result;
}

InprocResult run_2pc_inproc(const Graph& g, const QTensor& input, const net::SessionConfig& cfg) {
  const Graph client_view = g.public_view();
  auto res = net::run_two_party(cfg, [&](Party& p) {
    return p.is_server() ? run_2pc(p, g, std::nullopt) : run_2pc(p, client_view, input);
  });
  WINO2PC_ENFORCE(res.client.has_value(), ErrorCode::kInvariantViolation,
                  "client received no output");
  return InprocResult{*res.client, res.ledger, res.server_counters};
}

}  // namespace wino2pc::graph
