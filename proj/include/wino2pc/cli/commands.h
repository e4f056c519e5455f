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

// The CLI verbs as library calls. Each returns a JSON report; files are
// written only where a path is given.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wino2pc/cli/model.h"
#include "wino2pc/core/errors.h"
#include "wino2pc/core/qtensor.h"
#include "wino2pc/graph/ir.h"
#include "wino2pc/graph/passes.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/quant/finetune.h"

namespace wino2pc::cli {

namespace fs = std::filesystem;

/// 0 success, 2 invariant violation, 3 infeasible or configuration error,
/// 1 anything else (I/O on a live channel, ...).
int exit_code_for(ErrorCode code);

/// "F(2,3)" / "F(4,3)" / "2" / "4" -> output tile m.
int parse_plan(const std::string& plan);

struct RunOptions {
  uint64_t seed = 1;
  int lambda = 128;
  int m = 0;  // 0: per-layer
  bool force_direct = false;
  std::vector<std::string> passes = graph::default_pipeline();
  std::optional<fs::path> weights_dir;  // from transform-weights
};

proto::CostModel cost_model(const RunOptions& opt);

/// Lowers and runs the pass list.
graph::Graph prepare_graph(const Model& m, const RunOptions& opt);

/// The input tensor file, or a seeded uniform tensor in the input format.
QTensor model_input(const graph::Graph& g, const std::optional<fs::path>& file, uint64_t seed);

nlohmann::json ledger_report(const net::CommLedger& ledger);

// transform-weights
nlohmann::json cmd_transform_weights(const Model& m, int plan_m, const fs::path& out_dir);
std::map<std::string, std::shared_ptr<const graph::GemmSpec>> load_transformed_weights(
    const fs::path& dir);

// optimize-graph
struct OptimizeResult {
  graph::Graph before;
  graph::Graph after;
  std::vector<graph::PassStep> steps;
  nlohmann::json report;
  std::string table;
};
OptimizeResult cmd_optimize_graph(const Model& m, const RunOptions& opt);

// run-plain / run-2pc
struct RunResult {
  std::optional<QTensor> output;  // absent on the tcp server
  net::CommLedger ledger;         // empty for run-plain
  nlohmann::json report;
};
RunResult cmd_run_plain(const Model& m, const std::optional<fs::path>& input, const RunOptions& opt);

/// Both parties in one process. Throws kInvariantViolation when the output
/// differs from run-plain or the ledger differs from the estimate.
RunResult cmd_run_2pc_inproc(const Model& m, const std::optional<fs::path>& input,
                             const RunOptions& opt);

enum class Role { kServer, kClient };
struct Peer {
  std::string host = "127.0.0.1";
  uint16_t port = 0;  // the dealer uses port + 1
};
Peer parse_peer(const std::string& s);

/// One role of a TCP session. Throws kInvariantViolation when the agreed
/// ledger differs from the estimate.
RunResult cmd_run_2pc_tcp(const Model& m, Role role, const Peer& peer,
                          const std::optional<fs::path>& input, const RunOptions& opt);

// assign-bits
struct AssignResult {
  std::vector<int> bits;
  double omega = 0;
  uint64_t comm = 0;
  nlohmann::json report;
  std::optional<nlohmann::json> model;  // updated l_w when a model is given
};
AssignResult cmd_assign_bits(const nlohmann::json& table, uint64_t zeta,
                             const std::optional<Model>& model);

// quantize-toy
nlohmann::json cmd_quantize_toy(const quant::ToyOptions& opt, quant::ToyResult* result = nullptr);

/// Right-aligned text table; the first row is the header.
std::string format_table(const std::vector<std::vector<std::string>>& rows);

}  // namespace wino2pc::cli
