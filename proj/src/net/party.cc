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

#include "wino2pc/net/party.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::net {

Party::Party(PartyId id, Channel& peer, Channel& dealer, const SessionConfig& cfg)
    : id_(id), peer_(peer), dealer_(dealer), cost_(cfg.cost) {
  std::seed_seq seq{cfg.seed, static_cast<uint64_t>(id) + 1};
  rng_.seed(seq);
}

void Party::count(size_t payload_bytes) {
  WINO2PC_ENFORCE(scope_.has_value(), ErrorCode::kInvariantViolation,
                  "communication outside a protocol scope");
  scope_->wire += static_cast<uint64_t>(payload_bytes) * 8;
}

void Party::send(MsgTag tag, const ByteWriter& w) {
  count(w.bytes().size());
  peer_.send(static_cast<uint8_t>(tag), w.bytes());
}

ByteReader Party::recv(MsgTag tag) {
  Message m = peer_.recv();
  WINO2PC_ENFORCE(m.tag == static_cast<uint8_t>(tag), ErrorCode::kProtocolError,
                  fmt::format("{} expected tag {}, got {}", party_name(id_),
                              static_cast<int>(tag), static_cast<int>(m.tag)));
  return ByteReader(std::move(m.payload));
}

ByteReader Party::dealer_call(const ByteWriter& req) {
  count(req.bytes().size());
  dealer_.send(static_cast<uint8_t>(MsgTag::kDealerRequest), req.bytes());
  Message m = dealer_.recv();
  WINO2PC_ENFORCE(m.tag == static_cast<uint8_t>(MsgTag::kDealerReply),
                  ErrorCode::kProtocolError, "unexpected dealer frame");
  count(m.payload.size());
  return ByteReader(std::move(m.payload));
}

RandomOtBatch Party::random_ots(size_t count_ots) {
  ByteWriter req;
  req.put_u8(static_cast<uint8_t>(DealerKind::kRandomOt));
  req.put_u64(count_ots);
  ByteReader r = dealer_call(req);
  RandomOtBatch out;
  if (is_server()) {
    out.choice = r.get_bits(count_ots);
    out.chosen_seed.resize(count_ots);
    for (auto& s : out.chosen_seed) s = r.get_u64();
  } else {
    out.seed0.resize(count_ots);
    out.seed1.resize(count_ots);
    for (size_t i = 0; i < count_ots; ++i) {
      out.seed0[i] = r.get_u64();
      out.seed1[i] = r.get_u64();
    }
  }
  counters_.ots += count_ots;
  return out;
}

BeaverTriples Party::beaver_triples(size_t n, int bits) {
  ByteWriter req;
  req.put_u8(static_cast<uint8_t>(DealerKind::kBeaverTriples));
  req.put_u64(n);
  req.put_u8(static_cast<uint8_t>(bits));
  ByteReader r = dealer_call(req);
  BeaverTriples t;
  t.a = r.get_packed(n, bits);
  t.b = r.get_packed(n, bits);
  t.c = r.get_packed(n, bits);
  return t;
}

std::vector<RingElem> Party::compare(CompareMode mode, std::span<const RingElem> inputs,
                                     int k, int out_bits) {
  ByteWriter req;
  req.put_u8(static_cast<uint8_t>(DealerKind::kCompare));
  req.put_u64(inputs.size());
  req.put_u8(static_cast<uint8_t>(k));
  req.put_u8(static_cast<uint8_t>(out_bits));
  req.put_u8(static_cast<uint8_t>(mode));
  req.put_packed(inputs, k);
  ByteReader r = dealer_call(req);
  return r.get_packed(inputs.size(), out_bits);
}

void Party::begin_scope(std::string protocol, Phase phase) {
  WINO2PC_ENFORCE(!scope_.has_value(), ErrorCode::kInvariantViolation,
                  fmt::format("nested protocol scope {} inside {}", protocol,
                              scope_ ? scope_->protocol : ""));
  scope_ = Scope{std::move(protocol), phase, 0, 0};
}

void Party::charge(uint64_t modeled_bits) {
  WINO2PC_ENFORCE(scope_.has_value(), ErrorCode::kInvariantViolation,
                  "charge outside a protocol scope");
  scope_->modeled += modeled_bits;
}

void Party::end_scope() {
  if (!scope_) return;
  ledger_.add(LedgerRecord{scope_->protocol, label_, scope_->phase, scope_->modeled,
                           scope_->wire});
  scope_.reset();
}

void Party::close_dealer() {
  if (dealer_closed_) return;
  dealer_closed_ = true;
  ByteWriter req;
  req.put_u8(static_cast<uint8_t>(DealerKind::kClose));
  dealer_.send(static_cast<uint8_t>(MsgTag::kDealerRequest), req.bytes());
}

CommLedger Party::sync_ledger() {
  const std::string mine = ledger_.to_json().dump();
  peer_.send(static_cast<uint8_t>(MsgTag::kLedgerSync),
             std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(mine.data()),
                                      mine.size()));
  Message m = peer_.recv();
  WINO2PC_ENFORCE(m.tag == static_cast<uint8_t>(MsgTag::kLedgerSync),
                  ErrorCode::kProtocolError, "expected ledger sync frame");
  const auto theirs = CommLedger::from_json(
      nlohmann::json::parse(std::string(m.payload.begin(), m.payload.end())));
  return is_server() ? CommLedger::merge(ledger_, theirs)
                     : CommLedger::merge(theirs, ledger_);
}

}  // namespace wino2pc::net
