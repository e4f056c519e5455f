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

// Two-party graph execution over TCP, one role per process. The server
// also hosts the dealer, which the client reaches on a second port.

#pragma once

#include <cstdint>
#include <string>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/graph/ir.h"
#include "wino2pc/net/channel.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/net/party.h"

namespace wino2pc::cli {

/// Server role: accepts the client on `peer` and the client's dealer link
/// on `dealer`. Returns the merged ledger.
net::CommLedger serve_2pc_tcp(const graph::Graph& g, net::TcpListener& peer,
                              net::TcpListener& dealer, const net::SessionConfig& cfg);

struct ClientRun {
  QTensor output;
  net::CommLedger ledger;
};

/// Client role on the public graph.
ClientRun connect_2pc_tcp(const graph::Graph& g, const QTensor& input, const std::string& host,
                          uint16_t peer_port, uint16_t dealer_port, const net::SessionConfig& cfg);

}  // namespace wino2pc::cli
