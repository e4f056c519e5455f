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

#include "wino2pc/graph/ir.h"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/linear/gemm.h"
#include "wino2pc/linear/qwinconv.h"
#include "wino2pc/proto/conversions.h"
#include "wino2pc/winograd/conv.h"
#include "wino2pc/winograd/tiling.h"

namespace wino2pc::graph {
namespace {

using i128 = __int128;

constexpr std::pair<NodeKind, const char*> kKindNames[] = {
    {NodeKind::kInput, "Input"},
    {NodeKind::kRequant, "Requant"},
    {NodeKind::kExt, "Ext"},
    {NodeKind::kTrunc, "Trunc"},
    {NodeKind::kTR, "TR"},
    {NodeKind::kNarrow, "Narrow"},
    {NodeKind::kFeatureTransform, "FeatureTransform"},
    {NodeKind::kOutputTransform, "OutputTransform"},
    {NodeKind::kGemm, "Gemm"},
    {NodeKind::kRelu, "Relu"},
    {NodeKind::kResidualAdd, "ResidualAdd"},
    {NodeKind::kOutput, "Output"},
};

[[noreturn]] void bad(const Node& n, const std::string& msg) {
  fail(ErrorCode::kGraphError, fmt::format("node {} ({}): {}", n.id, node_kind_name(n.kind), msg));
}

void expect(bool cond, const Node& n, const std::string& msg) {
  if (!cond) bad(n, msg);
}

i128 pow2(int k) { return static_cast<i128>(1) << k; }

// Exact range of sum_k c_k x_k with every x_k in r.
Range linear_range(std::span<const int64_t> coeffs, const Range& r) {
  Range out;
  for (int64_t c : coeffs) {
    const i128 a = c * r.lo, b = c * r.hi;
    out.lo += std::min(a, b);
    out.hi += std::max(a, b);
  }
  return out;
}

// Extremal range over all outputs of M^T X M (M given transposed, rows x cols).
Range transform_range(const std::vector<int64_t>& mt, int rows, int cols, const Range& r) {
  Range out{0, 0};
  std::vector<int64_t> coeffs(static_cast<size_t>(cols * cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < rows; ++j) {
      for (int k = 0; k < cols; ++k) {
        for (int l = 0; l < cols; ++l) {
          coeffs[static_cast<size_t>(k * cols + l)] =
              mt[static_cast<size_t>(i * cols + k)] * mt[static_cast<size_t>(j * cols + l)];
        }
      }
      const Range v = linear_range(coeffs, r);
      out.lo = std::min(out.lo, v.lo);
      out.hi = std::max(out.hi, v.hi);
    }
  }
  return out;
}

Range shift_right(const Range& r, int s) { return Range{r.lo >> s, r.hi >> s}; }

Range narrowed(const Range& r, int bits) { return r.fits(bits) ? r : Range::of_bits(bits); }

void check_ring(const Node& n, int bits) {
  expect(bits >= 1 && bits <= kMaxRingBits, n, fmt::format("ring width {} out of range", bits));
}

int64_t gemm_inner(const GemmSpec& g) {
  return g.kind == GemmKind::kDirect ? g.c * g.r * g.r : g.c;
}

ValueType infer_node(const Node& n, const std::vector<const ValueType*>& in) {
  auto arity = [&](size_t k) {
    expect(in.size() == k, n, fmt::format("expects {} input(s), has {}", k, in.size()));
  };
  ValueType t;
  switch (n.kind) {
    case NodeKind::kInput: {
      arity(0);
      n.params.validate();
      expect(!n.shape.empty() && shape_numel(n.shape) > 0, n, "empty input shape");
      t.shape = n.shape;
      t.bits = n.params.bits;
      t.scale_exp = n.params.scale_exp;
      t.range = Range::of_bits(t.bits);
      if (n.params.msb_known_nonneg) t.range.lo = 0;
      t.nonneg = n.params.msb_known_nonneg;
      return t;
    }
    case NodeKind::kRequant: {
      arity(1);
      t = *in[0];
      for (const auto& s : proto::requant_steps(t.params(), n.params)) {
        switch (s.kind) {
          case proto::StepKind::kTr:
            t.range = shift_right(t.range, s.arg);
            t.bits -= s.arg;
            break;
          case proto::StepKind::kNarrow:
            t.range = narrowed(t.range, s.arg);
            t.bits = s.arg;
            break;
          case proto::StepKind::kExt:
            t.bits = s.arg;
            break;
          case proto::StepKind::kShl:
            t.range = Range{t.range.lo * pow2(s.arg), t.range.hi * pow2(s.arg)};
            break;
        }
      }
      t.scale_exp = n.params.scale_exp;
      t.nonneg = in[0]->nonneg && t.range.lo >= 0;
      expect(!n.msb_known || in[0]->nonneg, n, "msb_known on a possibly negative input");
      return t;
    }
    case NodeKind::kExt: {
      arity(1);
      t = *in[0];
      check_ring(n, n.bits);
      expect(n.bits > t.bits, n, fmt::format("Ext {} -> {} does not widen", t.bits, n.bits));
      expect(!n.msb_known || t.nonneg, n, "msb_known on a possibly negative input");
      t.bits = n.bits;
      return t;
    }
    case NodeKind::kTrunc:
    case NodeKind::kTR: {
      arity(1);
      t = *in[0];
      expect(n.shift > 0 && n.shift < t.bits, n,
             fmt::format("shift {} invalid for a {}-bit ring", n.shift, t.bits));
      expect(n.kind == NodeKind::kTR || !n.msb_known || t.nonneg, n,
             "msb_known on a possibly negative input");
      t.range = shift_right(t.range, n.shift);
      t.scale_exp -= n.shift;
      if (n.kind == NodeKind::kTR) t.bits -= n.shift;
      return t;
    }
    case NodeKind::kNarrow: {
      arity(1);
      t = *in[0];
      expect(n.bits >= 1 && n.bits < t.bits, n,
             fmt::format("Narrow {} -> {} does not narrow", t.bits, n.bits));
      t.range = narrowed(t.range, n.bits);
      t.bits = n.bits;
      t.nonneg = t.nonneg && t.range.lo >= 0;
      return t;
    }
    case NodeKind::kFeatureTransform: {
      arity(1);
      const ValueType& x = *in[0];
      const auto plan = n.tile.plan();
      expect(x.shape.size() == 4 && x.shape[0] == n.tile.n && x.shape[2] == n.tile.h &&
                 x.shape[3] == n.tile.w,
             n, "input " + shape_str(x.shape) + " does not match the tile grid");
      if (x.range.value_bits() + plan.ft_ext_bits > x.bits) {
        fail(ErrorCode::kOverflowRisk,
             fmt::format("node {}: feature transform of {}-bit values needs {} bits, ring has {}",
                         n.id, x.range.value_bits(), x.range.value_bits() + plan.ft_ext_bits,
                         x.bits));
      }
      const auto grid =
          winograd::TileGrid::make(n.tile.n, x.shape[1], n.tile.h, n.tile.w, n.tile.pad, plan);
      t.shape = {plan.positions(), x.shape[1], grid.tiles()};
      t.bits = x.bits;
      t.scale_exp = x.scale_exp;
      t.range = transform_range(plan.bt_int, plan.alpha, plan.alpha, x.range);
      return t;
    }
    case NodeKind::kOutputTransform: {
      arity(1);
      const ValueType& x = *in[0];
      const auto plan = n.tile.plan();
      expect(x.shape.size() == 3 && x.shape[0] == plan.positions(), n,
             "input " + shape_str(x.shape) + " is not position-major");
      const auto grid =
          winograd::TileGrid::make(n.tile.n, x.shape[1], n.tile.h, n.tile.w, n.tile.pad, plan);
      expect(x.shape[2] == grid.tiles(), n, "tile count mismatch");
      if (x.range.value_bits() + plan.out_ext_bits > x.bits) {
        fail(ErrorCode::kOverflowRisk,
             fmt::format("node {}: output transform of {}-bit values needs {} bits, ring has {}",
                         n.id, x.range.value_bits(), x.range.value_bits() + plan.out_ext_bits,
                         x.bits));
      }
      t.shape = {n.tile.n, x.shape[1], grid.out_h, grid.out_w};
      t.bits = x.bits;
      t.scale_exp = x.scale_exp;
      t.range = transform_range(plan.at_int, plan.m, plan.alpha, x.range);
      return t;
    }
    case NodeKind::kGemm: {
      arity(1);
      expect(n.gemm != nullptr, n, "missing weights");
      const GemmSpec& g = *n.gemm;
      const ValueType& x = *in[0];
      expect(g.k > 0 && g.c > 0, n, "empty weight matrix");
      expect(g.values.empty() || static_cast<int64_t>(g.values.size()) == g.weight_count(), n,
             "weight count mismatch");
      t.bits = x.bits;
      t.scale_exp = x.scale_exp + g.scale_exp;
      switch (g.kind) {
        case GemmKind::kWinograd: {
          const auto plan = winograd::winograd_matrices(g.m, 3);
          expect(x.shape.size() == 3 && x.shape[0] == plan.positions() && x.shape[1] == g.c, n,
                 "input " + shape_str(x.shape) + " is not a transformed feature map");
          t.shape = {x.shape[0], g.k, x.shape[2]};
          break;
        }
        case GemmKind::kDirect: {
          expect(x.shape.size() == 4 && x.shape[1] == g.c, n,
                 "input " + shape_str(x.shape) + " does not have " + std::to_string(g.c) +
                     " channels");
          winograd::ConvShape cs{x.shape[0], g.c, x.shape[2], x.shape[3], g.k, g.r, g.stride, g.pad};
          cs.validate();
          t.shape = {cs.n, g.k, cs.out_h(), cs.out_w()};
          break;
        }
        case GemmKind::kDense: {
          expect(x.shape.size() >= 2 && x.numel() / x.shape[0] == g.c, n,
                 "input " + shape_str(x.shape) + " does not flatten to " + std::to_string(g.c));
          t.shape = {x.shape[0], g.k};
          break;
        }
      }
      const int need = linear::gemm_accumulator_bits(x.range.value_bits(), gemm_inner(g),
                                                     g.importance);
      if (need > x.bits) {
        fail(ErrorCode::kAccumulatorTooNarrow,
             fmt::format("node {}: GEMM needs a {}-bit ring, input has {}", n.id, need, x.bits));
      }
      const i128 wl = g.importance.min_value(), wh = g.importance.max_value();
      const i128 c[4] = {wl * x.range.lo, wl * x.range.hi, wh * x.range.lo, wh * x.range.hi};
      const i128 inner = gemm_inner(g);
      t.range = Range{inner * *std::min_element(c, c + 4), inner * *std::max_element(c, c + 4)};
      return t;
    }
    case NodeKind::kRelu: {
      arity(1);
      t = *in[0];
      t.range = Range{std::max<i128>(t.range.lo, 0), std::max<i128>(t.range.hi, 0)};
      t.nonneg = true;
      return t;
    }
    case NodeKind::kResidualAdd: {
      arity(2);
      const ValueType& m = *in[0];
      const ValueType& r = *in[1];
      expect(m.shape == r.shape, n, "branch shapes " + shape_str(m.shape) + " and " +
                                        shape_str(r.shape) + " differ");
      const int d = m.scale_exp - r.scale_exp;
      const int bits = n.residual == ResidualMode::kBaseline ? m.bits + 1 : m.bits;
      check_ring(n, bits);
      if (d < 0 || r.bits + d > bits) {
        fail(ErrorCode::kScaleUnalignable,
             fmt::format("node {}: residual ({} bits, 2^-{}) cannot align to {} bits, 2^-{}",
                         n.id, r.bits, r.scale_exp, bits, m.scale_exp));
      }
      t = m;
      t.bits = bits;
      t.range = Range{m.range.lo + r.range.lo * pow2(d), m.range.hi + r.range.hi * pow2(d)};
      t.nonneg = m.nonneg && r.nonneg;
      if (!t.range.fits(bits)) {
        fail(ErrorCode::kOverflowRisk,
             fmt::format("node {}: residual sum may overflow the {}-bit ring", n.id, bits));
      }
      return t;
    }
    case NodeKind::kOutput: {
      arity(1);
      return *in[0];
    }
  }
  bad(n, "unknown kind");
}

bool same_gemm(const std::shared_ptr<const GemmSpec>& a, const std::shared_ptr<const GemmSpec>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->kind == b->kind && a->k == b->k && a->c == b->c && a->m == b->m && a->r == b->r &&
         a->stride == b->stride && a->pad == b->pad && a->importance == b->importance &&
         a->scale_exp == b->scale_exp && a->values == b->values;
}

bool same_node(const Node& a, const Node& b) {
  return a.id == b.id && a.kind == b.kind && a.inputs == b.inputs && a.label == b.label &&
         a.shape == b.shape && a.params == b.params && a.bits == b.bits && a.shift == b.shift &&
         a.msb_known == b.msb_known && a.tile == b.tile && same_gemm(a.gemm, b.gemm) &&
         a.residual == b.residual;
}

}  // namespace

const char* node_kind_name(NodeKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

NodeKind node_kind_from_name(const std::string& s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  fail(ErrorCode::kGraphError, "unknown node kind '" + s + "'");
}

bool is_local(NodeKind k) {
  return k == NodeKind::kFeatureTransform || k == NodeKind::kOutputTransform ||
         k == NodeKind::kNarrow;
}

int64_t GemmSpec::weight_count() const {
  switch (kind) {
    case GemmKind::kWinograd:
      return k * c * winograd::winograd_matrices(m, 3).positions();
    case GemmKind::kDirect:
      return k * c * r * r;
    case GemmKind::kDense:
      return k * c;
  }
  return 0;
}

bool Range::fits(int bits) const {
  return lo >= -pow2(bits - 1) && hi <= pow2(bits - 1) - 1;
}

int Range::value_bits() const {
  int b = 1;
  while (!fits(b)) ++b;
  return b;
}

Range Range::of_bits(int bits) { return Range{-pow2(bits - 1), pow2(bits - 1) - 1}; }

QuantParams ValueType::params() const {
  QuantParams p;
  p.bits = bits;
  p.scale_exp = scale_exp;
  p.msb_known_nonneg = nonneg;
  return p;
}

int Graph::add(Node n) {
  n.id = next_id_++;
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

int Graph::index_of(int id) const {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return static_cast<int>(i);
  }
  fail(ErrorCode::kGraphError, fmt::format("no node with id {}", id));
}

bool Graph::contains(int id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.id == id; });
}

const Node& Graph::node(int id) const { return nodes_[static_cast<size_t>(index_of(id))]; }
Node& Graph::mutable_node(int id) { return nodes_[static_cast<size_t>(index_of(id))]; }

std::vector<int> Graph::consumers(int id) const {
  std::vector<int> out;
  for (const Node& n : nodes_) {
    if (std::find(n.inputs.begin(), n.inputs.end(), id) != n.inputs.end()) out.push_back(n.id);
  }
  return out;
}

int Graph::insert_after(int after, Node n) {
  const int pos = index_of(after);
  n.id = next_id_++;
  n.inputs = {after};
  for (Node& c : nodes_) {
    for (int& i : c.inputs) {
      if (i == after) i = n.id;
    }
  }
  nodes_.insert(nodes_.begin() + pos + 1, std::move(n));
  return nodes_[static_cast<size_t>(pos + 1)].id;
}

void Graph::bypass(int id) {
  const int pos = index_of(id);
  WINO2PC_ENFORCE(nodes_[static_cast<size_t>(pos)].inputs.size() == 1, ErrorCode::kGraphError,
                  fmt::format("cannot bypass node {}", id));
  const int src = nodes_[static_cast<size_t>(pos)].inputs[0];
  nodes_.erase(nodes_.begin() + pos);
  for (Node& c : nodes_) {
    for (int& i : c.inputs) {
      if (i == id) i = src;
    }
  }
}

int Graph::input_id() const {
  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::kInput) return n.id;
  }
  fail(ErrorCode::kGraphError, "graph has no Input node");
}

int Graph::output_id() const {
  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::kOutput) return n.id;
  }
  fail(ErrorCode::kGraphError, "graph has no Output node");
}

Graph Graph::public_view() const {
  Graph g = *this;
  for (Node& n : g.nodes_) {
    if (n.gemm && !n.gemm->values.empty()) {
      auto spec = std::make_shared<GemmSpec>(*n.gemm);
      spec->values.clear();
      n.gemm = std::move(spec);
    }
  }
  return g;
}

bool Graph::operator==(const Graph& o) const {
  if (nodes_.size() != o.nodes_.size()) return false;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!same_node(nodes_[i], o.nodes_[i])) return false;
  }
  return true;
}

std::vector<ValueType> infer_types(const Graph& g) {
  std::vector<ValueType> types;
  types.reserve(g.size());
  std::map<int, size_t> pos;
  int inputs = 0, outputs = 0;
  for (const Node& n : g.nodes()) {
    WINO2PC_ENFORCE(!pos.count(n.id), ErrorCode::kGraphError,
                    fmt::format("duplicate node id {}", n.id));
    std::vector<const ValueType*> in;
    for (int i : n.inputs) {
      auto it = pos.find(i);
      if (it == pos.end()) {
        bad(n, fmt::format("input {} is not defined before use", i));
      }
      expect(g.nodes()[it->second].kind != NodeKind::kOutput, n, "consumes an Output node");
      in.push_back(&types[it->second]);
    }
    inputs += n.kind == NodeKind::kInput;
    outputs += n.kind == NodeKind::kOutput;
    pos[n.id] = types.size();
    types.push_back(infer_node(n, in));
  }
  if (!g.empty()) {
    WINO2PC_ENFORCE(inputs == 1 && outputs == 1, ErrorCode::kGraphError,
                    fmt::format("graph needs exactly one Input and one Output (has {} and {})",
                                inputs, outputs));
  }
  return types;
}

int GraphBuilder::push(Node n) {
  std::vector<const ValueType*> in;
  for (int i : n.inputs) in.push_back(&types_[static_cast<size_t>(g_.index_of(i))]);
  ValueType t = infer_node(n, in);
  const int id = g_.add(std::move(n));
  types_.push_back(std::move(t));
  return id;
}

const ValueType& GraphBuilder::type_of(int id) { return types_[static_cast<size_t>(g_.index_of(id))]; }

int GraphBuilder::input(Shape shape, QuantParams params, std::string label) {
  Node n;
  n.kind = NodeKind::kInput;
  n.shape = std::move(shape);
  n.params = params;
  n.label = std::move(label);
  return push(std::move(n));
}

namespace {
Node unary(NodeKind k, int x, std::string label) {
  Node n;
  n.kind = k;
  n.inputs = {x};
  n.label = std::move(label);
  return n;
}
}  // namespace

int GraphBuilder::requant(int x, QuantParams to, std::string label) {
  Node n = unary(NodeKind::kRequant, x, std::move(label));
  n.params = to;
  return push(std::move(n));
}

int GraphBuilder::ext(int x, int bits, std::string label) {
  Node n = unary(NodeKind::kExt, x, std::move(label));
  n.bits = bits;
  return push(std::move(n));
}

int GraphBuilder::trunc(int x, int shift, std::string label) {
  Node n = unary(NodeKind::kTrunc, x, std::move(label));
  n.shift = shift;
  return push(std::move(n));
}

int GraphBuilder::tr(int x, int shift, std::string label) {
  Node n = unary(NodeKind::kTR, x, std::move(label));
  n.shift = shift;
  return push(std::move(n));
}

int GraphBuilder::narrow(int x, int bits, std::string label) {
  Node n = unary(NodeKind::kNarrow, x, std::move(label));
  n.bits = bits;
  return push(std::move(n));
}

int GraphBuilder::feature_transform(int x, TileSpec t, std::string label) {
  Node n = unary(NodeKind::kFeatureTransform, x, std::move(label));
  n.tile = t;
  return push(std::move(n));
}

int GraphBuilder::output_transform(int x, TileSpec t, std::string label) {
  Node n = unary(NodeKind::kOutputTransform, x, std::move(label));
  n.tile = t;
  return push(std::move(n));
}

int GraphBuilder::gemm(int x, std::shared_ptr<const GemmSpec> spec, std::string label) {
  Node n = unary(NodeKind::kGemm, x, std::move(label));
  n.gemm = std::move(spec);
  return push(std::move(n));
}

int GraphBuilder::relu(int x, std::string label) {
  return push(unary(NodeKind::kRelu, x, std::move(label)));
}

int GraphBuilder::residual_add(int main, int residual, ResidualMode mode, std::string label) {
  Node n;
  n.kind = NodeKind::kResidualAdd;
  n.inputs = {main, residual};
  n.residual = mode;
  n.label = std::move(label);
  return push(std::move(n));
}

int GraphBuilder::output(int x, std::string label) {
  return push(unary(NodeKind::kOutput, x, std::move(label)));
}

int append_requant_baseline(GraphBuilder& b, int x, const QuantParams& to,
                            const std::string& label) {
  const ValueType t = b.type_of(x);
  const int d = t.scale_exp - to.scale_exp;
  int cur = x;
  if (d > 0) {
    WINO2PC_ENFORCE(d < t.bits, ErrorCode::kUnreachableTarget,
                    fmt::format("cannot drop {} fraction bits from a {}-bit value", d, t.bits));
    cur = b.trunc(cur, d, label);
  } else if (d < 0) {
    return b.requant(cur, to, label);
  }
  if (to.bits < t.bits) cur = b.narrow(cur, to.bits, label);
  if (to.bits > t.bits) cur = b.ext(cur, to.bits, label);
  return cur;
}

int GraphBuilder::qwinconv(int x, std::shared_ptr<const GemmSpec> spec,
                           const std::optional<QuantParams>& requant_to, const std::string& name) {
  WINO2PC_ENFORCE(spec && spec->kind == GemmKind::kWinograd, ErrorCode::kGraphError,
                  "qwinconv needs Winograd weights");
  int cur = x;
  if (requant_to) cur = append_requant_baseline(*this, cur, *requant_to, name + "/block1");
  const ValueType t = type_of(cur);
  WINO2PC_ENFORCE(t.shape.size() == 4, ErrorCode::kShapeMismatch,
                  "convolution input must be N x C x H x W");
  const TileSpec tile{spec->m, t.shape[0], t.shape[2], t.shape[3], spec->pad};
  const auto wd = linear::qwinconv_widths(t.bits, spec->c, spec->importance, tile.plan());
  cur = ext(cur, wd.ft_bits, name + "/block2");
  cur = feature_transform(cur, tile, name + "/ft");
  cur = ext(cur, wd.acc_bits, name + "/block3");
  cur = gemm(cur, spec, name + "/block4");
  cur = ext(cur, wd.out_bits, name + "/block5");
  return output_transform(cur, tile, name + "/ot");
}

int GraphBuilder::direct_conv(int x, std::shared_ptr<const GemmSpec> spec,
                              const std::optional<QuantParams>& requant_to,
                              const std::string& name) {
  WINO2PC_ENFORCE(spec && spec->kind == GemmKind::kDirect, ErrorCode::kGraphError,
                  "direct_conv needs direct weights");
  int cur = x;
  if (requant_to) cur = append_requant_baseline(*this, cur, *requant_to, name + "/block1");
  const ValueType t = type_of(cur);
  const int acc =
      linear::gemm_accumulator_bits(t.bits, spec->c * spec->r * spec->r, spec->importance);
  cur = ext(cur, acc, name + "/ext");
  return gemm(cur, spec, name + "/gemm");
}

}  // namespace wino2pc::graph
