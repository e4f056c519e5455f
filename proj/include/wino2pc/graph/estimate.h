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

// Static communication estimate. Produces the ledger records an execution
// of the graph emits, in execution order, with modeled bits only.

#pragma once

#include <cstdint>

#include "wino2pc/graph/ir.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/proto/cost_model.h"

namespace wino2pc::graph {

/// Ledger label used for a node during execution.
std::string node_label(const Node& n);

struct CommEstimate {
  net::CommLedger records;
  // Modeled bits per node, indexed like Graph::nodes().
  std::vector<uint64_t> per_node;

  uint64_t total() const { return records.totals().modeled(); }
  uint64_t offline() const { return records.totals().modeled_offline; }
  uint64_t online() const { return records.totals().modeled_online; }
};

CommEstimate estimate_comm(const Graph& g, const proto::CostModel& cost = {});

/// Records equal field by field except wire bits.
bool same_modeled(const net::CommLedger& a, const net::CommLedger& b);

}  // namespace wino2pc::graph
