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

// Graph executors: a plaintext oracle and the two-party protocol run. Both
// use the same ring widths, so their outputs agree bit for bit.

#pragma once

#include <optional>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/graph/ir.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/net/party.h"

namespace wino2pc::graph {

QTensor run_plain(const Graph& g, const QTensor& input);

/// Executed by both parties. The client passes the input tensor and gets
/// the output; the server passes nullopt and holds the weights. The client
/// graph may be a public_view().
std::optional<QTensor> run_2pc(net::Party& p, const Graph& g, const std::optional<QTensor>& input);

struct InprocResult {
  QTensor output;
  net::CommLedger ledger;
  net::OpCounters counters;
};

/// Both parties and the dealer on threads of this process.
InprocResult run_2pc_inproc(const Graph& g, const QTensor& input, const net::SessionConfig& cfg);

}  // namespace wino2pc::graph
