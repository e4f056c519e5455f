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

// OT-based GEMM with bit-decomposed server weights (one correlated OT per
// weight bit, carrying an N-vector of ring elements).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wino2pc/linear/bit_importance.h"
#include "wino2pc/net/party.h"
#include "wino2pc/net/share.h"

namespace wino2pc::linear {

using net::Party;
using net::Share;

/// Server-private M x L weight matrix as bits; the client holds the same
/// struct with `bits` empty (shape and importance are public).
struct GemmWeights {
  int64_t rows = 0;
  int64_t cols = 0;
  BitImportance importance;
  std::vector<uint8_t> bits;  // rows * cols * importance.bits(), MSB first

  static GemmWeights from_values(std::span<const int64_t> values, int64_t rows, int64_t cols,
                                 const BitImportance& importance);
  /// Public shape only.
  GemmWeights public_view() const { return GemmWeights{rows, cols, importance, {}}; }
  std::vector<int64_t> decode() const;
  int64_t max_abs() const;
};

/// Minimum accumulator width for L-term dot products of `value_bits` inputs.
int gemm_accumulator_bits(int value_bits, int64_t l, const BitImportance& importance);

/// Y[p] = W[p] X[p] for each of `w.size()` independent products. `x` holds
/// the party's share of X[p] (L x N, row-major) back to back; its ring is
/// the accumulator ring and must satisfy gemm_accumulator_bits(value_bits).
/// Result: Y[p] (M x N) back to back, same ring.
std::vector<RingElem> ot_gemm_batched(Party& p, std::span<const GemmWeights> w,
                                      std::span<const RingElem> x, int64_t n, int ring_bits,
                                      int value_bits);

/// Single product on a Share of shape {L, N}.
Share ot_gemm(Party& p, const GemmWeights& w, const Share& x, int value_bits);

/// Modeled bits for a batch: offline lambda per OT, online n * ring per OT.
uint64_t gemm_offline_cost(const proto::CostModel& c, int64_t ots);
uint64_t gemm_online_cost(const proto::CostModel& c, int64_t ots, int64_t n, int ring_bits);

/// Plaintext oracle with the decoded weights (exact integers).
std::vector<int64_t> gemm_plain(const GemmWeights& w, std::span<const int64_t> x, int64_t n);

}  // namespace wino2pc::linear
