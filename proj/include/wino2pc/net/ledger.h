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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wino2pc::net {

enum class Phase : uint8_t { kOffline = 0, kOnline = 1 };
const char* phase_name(Phase p);

struct LedgerRecord {
  std::string protocol;
  std::string label;
  Phase phase = Phase::kOnline;
  uint64_t modeled_bits = 0;
  uint64_t wire_bits = 0;

  bool operator==(const LedgerRecord&) const = default;
};

struct LedgerTotals {
  uint64_t modeled_offline = 0;
  uint64_t modeled_online = 0;
  uint64_t wire_offline = 0;
  uint64_t wire_online = 0;

  uint64_t modeled() const { return modeled_offline + modeled_online; }
  uint64_t wire() const { return wire_offline + wire_online; }
};

/// Append-only record of protocol invocations and their communication.
class CommLedger {
 public:
  void add(LedgerRecord r);
  const std::vector<LedgerRecord>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  LedgerTotals totals() const;
  std::map<std::string, LedgerTotals> by_label() const;
  std::map<std::string, LedgerTotals> by_protocol() const;

  /// Combines both parties' views of one session: modeled bits must agree
  /// record by record; wire bits are summed.
  static CommLedger merge(const CommLedger& server, const CommLedger& client);

  nlohmann::json to_json() const;
  static CommLedger from_json(const nlohmann::json& j);

 private:
  std::vector<LedgerRecord> entries_;
};

}  // namespace wino2pc::net
