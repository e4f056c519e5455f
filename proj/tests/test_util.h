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

// Helpers shared by the unit and acceptance tests.

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/net/local_session.h"
#include "wino2pc/net/share.h"

namespace wino2pc::testing {

inline QuantParams qp(int bits, int scale_exp = 0, bool msb = false) {
  QuantParams p;
  p.bits = bits;
  p.scale_exp = scale_exp;
  p.msb_known_nonneg = msb;
  return p;
}

inline QTensor random_qtensor(std::mt19937_64& rng, const Shape& shape, const QuantParams& p) {
  std::vector<int64_t> d(static_cast<size_t>(shape_numel(shape)));
  const int64_t lo = p.msb_known_nonneg ? 0 : p.min_value();
  std::uniform_int_distribution<int64_t> dist(lo, p.max_value());
  for (auto& v : d) v = dist(rng);
  return QTensor(shape, std::move(d), p);
}

struct PairRun {
  net::SharePair out;
  net::CommLedger ledger;
  net::OpCounters counters;
};

/// Shares `in` with a fixed-seed mask and runs `fn(party, own_share)` on both
/// parties; returns both output shares and the merged ledger.
template <typename Fn>
PairRun run_pair(const QTensor& in, Fn fn, uint64_t seed = 1,
                 const net::SessionConfig* cfg_override = nullptr) {
  std::mt19937_64 rng(seed * 7919 + 17);
  net::SharePair sp = net::share(in, rng);
  net::SessionConfig cfg;
  if (cfg_override != nullptr) cfg = *cfg_override;
  cfg.seed = seed;
  auto res = net::run_two_party(cfg, [&](net::Party& p) {
    return fn(p, p.is_server() ? sp.server : sp.client);
  });
  return PairRun{{res.server, res.client}, res.ledger, res.server_counters};
}

}  // namespace wino2pc::testing
