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

#include "wino2pc/net/ledger.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::net {
namespace {

void accumulate(LedgerTotals& t, const LedgerRecord& r) {
  if (r.phase == Phase::kOffline) {
    t.modeled_offline += r.modeled_bits;
    t.wire_offline += r.wire_bits;
  } else {
    t.modeled_online += r.modeled_bits;
    t.wire_online += r.wire_bits;
  }
}

}  // namespace

const char* phase_name(Phase p) { return p == Phase::kOffline ? "offline" : "online"; }

void CommLedger::add(LedgerRecord r) { entries_.push_back(std::move(r)); }

LedgerTotals CommLedger::totals() const {
  LedgerTotals t;
  for (const auto& r : entries_) accumulate(t, r);
  return t;
}

std::map<std::string, LedgerTotals> CommLedger::by_label() const {
  std::map<std::string, LedgerTotals> m;
  for (const auto& r : entries_) accumulate(m[r.label], r);
  return m;
}

std::map<std::string, LedgerTotals> CommLedger::by_protocol() const {
  std::map<std::string, LedgerTotals> m;
  for (const auto& r : entries_) accumulate(m[r.protocol], r);
  return m;
}

CommLedger CommLedger::merge(const CommLedger& server, const CommLedger& client) {
  WINO2PC_ENFORCE(server.entries_.size() == client.entries_.size(),
                  ErrorCode::kInvariantViolation,
                  fmt::format("ledger length mismatch: {} vs {}",
                              server.entries_.size(), client.entries_.size()));
  CommLedger out;
  for (size_t i = 0; i < server.entries_.size(); ++i) {
    const auto& s = server.entries_[i];
    const auto& c = client.entries_[i];
    WINO2PC_ENFORCE(s.protocol == c.protocol && s.phase == c.phase &&
                        s.label == c.label && s.modeled_bits == c.modeled_bits,
                    ErrorCode::kInvariantViolation,
                    fmt::format("ledger record {} disagrees ({} vs {})", i,
                                s.protocol, c.protocol));
    LedgerRecord r = s;
    r.wire_bits = s.wire_bits + c.wire_bits;
    out.add(std::move(r));
  }
  return out;
}

nlohmann::json CommLedger::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : entries_) {
    arr.push_back({{"protocol", r.protocol},
                   {"label", r.label},
                   {"phase", phase_name(r.phase)},
                   {"modeled_bits", r.modeled_bits},
                   {"wire_bits", r.wire_bits}});
  }
  return arr;
}

CommLedger CommLedger::from_json(const nlohmann::json& j) {
  CommLedger out;
  for (const auto& e : j) {
    LedgerRecord r;
    r.protocol = e.at("protocol").get<std::string>();
    r.label = e.at("label").get<std::string>();
    r.phase = e.at("phase").get<std::string>() == "offline" ? Phase::kOffline
                                                             : Phase::kOnline;
    r.modeled_bits = e.at("modeled_bits").get<uint64_t>();
    r.wire_bits = e.at("wire_bits").get<uint64_t>();
    out.add(std::move(r));
  }
  return out;
}

}  // namespace wino2pc::net
