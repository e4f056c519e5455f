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

// Share-level bit-width conversions. Every function is executed by both
// parties with their own share and returns the party's output share.

#pragma once

#include <optional>
#include <vector>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/net/party.h"
#include "wino2pc/net/share.h"

namespace wino2pc::proto {

using net::Party;
using net::Share;

/// Sign extension from x.bits to l2 > x.bits. Charged per element as
/// CostModel::ext (discounted when `msb_known`).
Share ext(Party& p, const Share& x, int l2, bool msb_known = false);

/// Faithful arithmetic right shift by `shift`, width unchanged.
Share trunc(Party& p, const Share& x, int shift, bool msb_known = false);

/// Arithmetic right shift by `shift` that drops the high `shift` bits of
/// the ring: the output lives in Z_{2^(l1-shift)}.
Share truncate_reduce(Party& p, const Share& x, int shift);

/// Local reduction into a narrower ring (wraps). No communication.
Share narrow(const Share& x, int bits);

/// Local multiplication by 2^shift inside the same ring.
Share shift_left(const Share& x, int shift);

/// Moves `x` to the target width and scale by composing TR, Narrow, Ext and
/// local left shifts.
Share requant(Party& p, const Share& x, const QuantParams& to, bool msb_known = false);

/// Client-owned input: the client passes its tensor, the server nullopt.
Share input_share(Party& p, const std::optional<QTensor>& client_value, const Shape& shape,
                  const QuantParams& params);

/// Opens `x` to the client; the server gets nullopt.
std::optional<QTensor> reveal_to_client(Party& p, const Share& x);

enum class StepKind { kTr, kNarrow, kExt, kShl };
struct Step {
  StepKind kind;
  int arg;
};

/// The conversion sequence used by requant(): TR when the scale drops,
/// then Narrow or Ext to the target width, then a left shift when the
/// scale grows.
std::vector<Step> requant_steps(const QuantParams& from, const QuantParams& to);

/// Modeled cost of requant on `n` elements.
uint64_t requant_cost(const CostModel& cost, const QuantParams& from, const QuantParams& to,
                      int64_t n, bool msb_known = false);

// Plaintext oracles with identical semantics.
QTensor ext_plain(const QTensor& x, int l2);
QTensor trunc_plain(const QTensor& x, int shift);
QTensor truncate_reduce_plain(const QTensor& x, int shift);
QTensor narrow_plain(const QTensor& x, int bits);
QTensor shift_left_plain(const QTensor& x, int shift);
QTensor requant_plain(const QTensor& x, const QuantParams& to);

}  // namespace wino2pc::proto
