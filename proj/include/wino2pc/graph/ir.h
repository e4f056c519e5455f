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

// Protocol-graph IR. Nodes are kept in topological order; every node has a
// single output value whose ring width, scale and exact integer range are
// derived by infer_types().

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/linear/bit_importance.h"
#include "wino2pc/winograd/plan.h"

namespace wino2pc::graph {

enum class NodeKind {
  kInput,
  kRequant,
  kExt,
  kTrunc,
  kTR,
  kNarrow,
  kFeatureTransform,
  kOutputTransform,
  kGemm,
  kRelu,
  kResidualAdd,
  kOutput,
};
const char* node_kind_name(NodeKind k);
NodeKind node_kind_from_name(const std::string& s);
bool is_local(NodeKind k);

enum class GemmKind { kWinograd, kDirect, kDense };
enum class ResidualMode { kBaseline, kSimplified };

/// Server weights of a Gemm node. `values` is empty in the client view.
///   Winograd: K x C x alpha^2, input U [alpha^2][C][T], output [alpha^2][K][T]
///   Direct:   K x C x r x r,   input [N][C][H][W],    output [N][K][H'][W']
///   Dense:    K x C,           input [N][C...],        output [N][K]
struct GemmSpec {
  GemmKind kind = GemmKind::kWinograd;
  int64_t k = 0;
  int64_t c = 0;
  int m = 2;
  int r = 3;
  int stride = 1;
  int pad = 1;
  linear::BitImportance importance;
  int scale_exp = 0;
  std::vector<int64_t> values;

  int64_t weight_count() const;
  int64_t ots() const { return weight_count() * importance.bits(); }
};

/// Tile geometry shared by a FeatureTransform and its OutputTransform.
struct TileSpec {
  int m = 2;
  int64_t n = 1, h = 1, w = 1;
  int pad = 1;

  winograd::WinogradPlan plan() const { return winograd::winograd_matrices(m, 3); }
  bool operator==(const TileSpec&) const = default;
};

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::kInput;
  std::vector<int> inputs;
  std::string label;

  Shape shape;            // Input
  QuantParams params;     // Input format; Requant target
  int bits = 0;           // Ext / Narrow target ring
  int shift = 0;          // Trunc / TR
  bool msb_known = false; // Ext / Trunc / Requant: discounted conversion
  TileSpec tile;          // FeatureTransform / OutputTransform
  std::shared_ptr<const GemmSpec> gemm;
  ResidualMode residual = ResidualMode::kBaseline;
};

/// Exact integer range of a value, independent of its ring.
struct Range {
  __int128 lo = 0;
  __int128 hi = 0;

  bool fits(int bits) const;
  /// Smallest signed width holding the range.
  int value_bits() const;
  static Range of_bits(int bits);
};

struct ValueType {
  Shape shape;
  int bits = 0;
  int scale_exp = 0;
  Range range;
  bool nonneg = false;

  int64_t numel() const { return shape_numel(shape); }
  QuantParams params() const;
};

class Graph {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& mutable_nodes() { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  size_t size() const { return nodes_.size(); }

  /// Appends `n` (topological order is the caller's job) and returns its id.
  int add(Node n);
  int next_id() const { return next_id_; }
  void set_next_id(int id) { next_id_ = id; }

  const Node& node(int id) const;
  Node& mutable_node(int id);
  int index_of(int id) const;
  bool contains(int id) const;

  /// Ids of nodes consuming `id`.
  std::vector<int> consumers(int id) const;

  /// Inserts `n` right after node `after`, rewiring every consumer of `after`
  /// to the new node. Returns the new id.
  int insert_after(int after, Node n);
  /// Removes a single-input node, rewiring its consumers to its input.
  void bypass(int id);

  int input_id() const;
  int output_id() const;

  /// Strips server weights.
  Graph public_view() const;

  bool operator==(const Graph& o) const;

 private:
  std::vector<Node> nodes_;
  int next_id_ = 0;
};

/// Type-checks the graph; throws kGraphError (or the conversion's own error
/// code) on the first inconsistency. Indexed like nodes().
std::vector<ValueType> infer_types(const Graph& g);

/// Incremental construction with eager type checking.
class GraphBuilder {
 public:
  int input(Shape shape, QuantParams params, std::string label = "input");
  int requant(int x, QuantParams to, std::string label = "");
  int ext(int x, int bits, std::string label = "");
  int trunc(int x, int shift, std::string label = "");
  int tr(int x, int shift, std::string label = "");
  int narrow(int x, int bits, std::string label = "");
  int feature_transform(int x, TileSpec t, std::string label = "");
  int output_transform(int x, TileSpec t, std::string label = "");
  int gemm(int x, std::shared_ptr<const GemmSpec> spec, std::string label = "");
  int relu(int x, std::string label = "");
  int residual_add(int main, int residual, ResidualMode mode, std::string label = "");
  int output(int x, std::string label = "output");

  /// Unfused QWinConv chain (blocks 1 to 5) over an [N][C][H][W] value.
  /// Returns the output-transform node.
  int qwinconv(int x, std::shared_ptr<const GemmSpec> spec,
               const std::optional<QuantParams>& requant_to, const std::string& name);
  /// Per-bit direct convolution: requant (Trunc + Narrow), Ext to the
  /// accumulator, one GEMM.
  int direct_conv(int x, std::shared_ptr<const GemmSpec> spec,
                  const std::optional<QuantParams>& requant_to, const std::string& name);

  const ValueType& type_of(int id);
  Graph& graph() { return g_; }
  Graph build() const { return g_; }

 private:
  int push(Node n);
  Graph g_;
  std::vector<ValueType> types_;
};

/// Baseline requant chain (faithful Trunc, then Narrow or Ext) appended by
/// the builder; exposed for the CLI lowering.
int append_requant_baseline(GraphBuilder& b, int x, const QuantParams& to,
                            const std::string& label);

}  // namespace wino2pc::graph
