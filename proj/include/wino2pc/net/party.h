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

// Per-party protocol context: transport, dealer access, randomness and the
// communication ledger.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wino2pc/net/channel.h"
#include "wino2pc/net/dealer.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/net/share.h"
#include "wino2pc/net/wire.h"
#include "wino2pc/proto/cost_model.h"

namespace wino2pc::net {

struct SessionConfig {
  uint64_t seed = 1;
  proto::CostModel cost;
};

/// Instrumentation independent of communication.
struct OpCounters {
  // Scalar weight-by-activation products evaluated by GEMM protocols.
  uint64_t gemm_mults = 0;
  // Number of OT instances consumed.
  uint64_t ots = 0;
};

struct RandomOtBatch {
  // Server view.
  std::vector<uint8_t> choice;
  std::vector<uint64_t> chosen_seed;
  // Client view.
  std::vector<uint64_t> seed0;
  std::vector<uint64_t> seed1;
};

struct BeaverTriples {
  std::vector<RingElem> a, b, c;
};

class Party {
 public:
  Party(PartyId id, Channel& peer, Channel& dealer, const SessionConfig& cfg);

  PartyId id() const { return id_; }
  bool is_server() const { return id_ == PartyId::kServer; }
  std::mt19937_64& rng() { return rng_; }
  const proto::CostModel& cost() const { return cost_; }
  CommLedger& ledger() { return ledger_; }
  const CommLedger& ledger() const { return ledger_; }
  OpCounters& counters() { return counters_; }

  /// Label attached to subsequent ledger records (usually a graph node).
  void set_label(std::string label) { label_ = std::move(label); }
  const std::string& label() const { return label_; }

  // Counted peer messaging; must run inside a protocol scope.
  void send(MsgTag tag, const ByteWriter& w);
  ByteReader recv(MsgTag tag);

  // Dealer functionalities; counted like peer traffic.
  RandomOtBatch random_ots(size_t count);
  BeaverTriples beaver_triples(size_t n, int bits);
  std::vector<RingElem> compare(CompareMode mode, std::span<const RingElem> inputs,
                                int k, int out_bits);

  // Protocol scopes; one at a time.
  void begin_scope(std::string protocol, Phase phase);
  void charge(uint64_t modeled_bits);
  void end_scope();

  /// Sends kClose to the dealer. Safe to call twice.
  void close_dealer();

  /// Exchanges ledgers with the peer (uncounted) and returns the merged one.
  CommLedger sync_ledger();

 private:
  struct Scope {
    std::string protocol;
    Phase phase;
    uint64_t modeled = 0;
    uint64_t wire = 0;
  };
  void count(size_t payload_bytes);
  ByteReader dealer_call(const ByteWriter& req);

  PartyId id_;
  Channel& peer_;
  Channel& dealer_;
  proto::CostModel cost_;
  std::mt19937_64 rng_;
  CommLedger ledger_;
  OpCounters counters_;
  std::string label_;
  std::optional<Scope> scope_;
  bool dealer_closed_ = false;
};

/// RAII wrapper around begin_scope/end_scope.
class ProtocolScope {
 public:
  ProtocolScope(Party& p, std::string protocol, Phase phase) : p_(p) {
    p_.begin_scope(std::move(protocol), phase);
  }
  ~ProtocolScope() { p_.end_scope(); }
  ProtocolScope(const ProtocolScope&) = delete;
  ProtocolScope& operator=(const ProtocolScope&) = delete;

 private:
  Party& p_;
};

}  // namespace wino2pc::net
