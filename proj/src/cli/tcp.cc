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

#include "wino2pc/cli/tcp.h"

#include <exception>
#include <thread>

#include "wino2pc/core/errors.h"
#include "wino2pc/graph/exec.h"
#include "wino2pc/net/dealer.h"

namespace wino2pc::cli {

net::CommLedger serve_2pc_tcp(const graph::Graph& g, net::TcpListener& peer,
                              net::TcpListener& dealer, const net::SessionConfig& cfg) {
  auto [party_end, dealer_end] = net::make_inproc_pair();
  std::exception_ptr dealer_error;
  std::unique_ptr<net::Channel> client_dealer;
  std::thread dealer_thread([&] {
    try {
      client_dealer = dealer.accept();
      net::Dealer d(*dealer_end, *client_dealer, cfg.seed);
      d.serve();
    } catch (...) {
      dealer_error = std::current_exception();
      dealer_end->close();
    }
  });
  net::CommLedger ledger;
  try {
    auto link = peer.accept();
    net::Party p(net::PartyId::kServer, *link, *party_end, cfg);
    graph::run_2pc(p, g, std::nullopt);
    p.close_dealer();
    ledger = p.sync_ledger();
  } catch (...) {
    party_end->close();
    if (client_dealer) client_dealer->close();
    dealer_thread.join();
    throw;
  }
  dealer_thread.join();
  if (dealer_error) std::rethrow_exception(dealer_error);
  return ledger;
}

ClientRun connect_2pc_tcp(const graph::Graph& g, const QTensor& input, const std::string& host,
                          uint16_t peer_port, uint16_t dealer_port, const net::SessionConfig& cfg) {
  auto link = net::tcp_connect(host, peer_port);
  auto dealer = net::tcp_connect(host, dealer_port);
  net::Party p(net::PartyId::kClient, *link, *dealer, cfg);
  auto out = graph::run_2pc(p, g, input);
  p.close_dealer();
  ClientRun r{std::move(*out), p.sync_ledger()};
  return r;
}

}  // namespace wino2pc::cli
