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

// Runs both parties and the dealer on threads inside one process, connected
// by in-memory channels.

#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <type_traits>
#include <utility>

#include "wino2pc/net/channel.h"
#include "wino2pc/net/dealer.h"
#include "wino2pc/net/party.h"

namespace wino2pc::net {

template <typename R>
struct TwoPartyResult {
  R server;
  R client;
  CommLedger ledger;  // merged view
  OpCounters server_counters;
};

namespace internal {

// Runs `body` on three threads; the first exception closes every channel
// (unblocking the other threads) and is rethrown.
void run_threads(std::function<void()> server, std::function<void()> client,
                 std::function<void()> dealer,
                 std::function<void()> close_all);

}  // namespace internal

template <typename Fn>
auto run_two_party(const SessionConfig& cfg, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, Party&>;
  static_assert(!std::is_void_v<R>, "two-party body must return a value");

  auto [peer_s, peer_c] = make_inproc_pair();
  auto [dealer_s, dealer_sd] = make_inproc_pair();
  auto [dealer_c, dealer_cd] = make_inproc_pair();
  Party server(PartyId::kServer, *peer_s, *dealer_s, cfg);
  Party client(PartyId::kClient, *peer_c, *dealer_c, cfg);
  Dealer dealer(*dealer_sd, *dealer_cd, cfg.seed);

  TwoPartyResult<R> out{};
  internal::run_threads(
      [&] {
        out.server = fn(server);
        server.close_dealer();
      },
      [&] {
        out.client = fn(client);
        client.close_dealer();
      },
      [&] { dealer.serve(); },
      [&] {
        peer_s->close();
        dealer_s->close();
        dealer_c->close();
      });
  out.ledger = CommLedger::merge(server.ledger(), client.ledger());
  out.server_counters = server.counters();
  return out;
}

}  // namespace wino2pc::net
