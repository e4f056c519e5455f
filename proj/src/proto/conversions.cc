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

#include "wino2pc/proto/conversions.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/net/wire.h"

namespace wino2pc::proto {
namespace {

using net::CompareMode;
using net::MsgTag;
using net::Phase;
using net::ProtocolScope;


void check_width(int l1, int shift) {
  WINO2PC_ENFORCE(shift > 0 && shift < l1, ErrorCode::kInvalidWidths,
                  fmt::format("shift {} invalid for {}-bit input", shift, l1));
}

Share with_values(const Share& x, std::vector<RingElem> values, int bits, int scale_exp,
                  bool msb) {
  Share out;
  out.owner = x.owner;
  out.shape = x.shape;
  out.values = std::move(values);
  out.params = x.params;
  out.params.bits = bits;
  out.params.scale_exp = scale_exp;
  out.params.msb_known_nonneg = msb;
  return out;
}

QTensor plain_with(const QTensor& x, std::vector<int64_t> data, int bits, int scale_exp,
                   bool msb) {
  QuantParams p = x.params();
  p.bits = bits;
  p.scale_exp = scale_exp;
  p.msb_known_nonneg = msb;
  return QTensor(x.shape(), std::move(data), p);
}

int64_t floor_shift(int64_t v, int shift) { return v >> shift; }

}  // namespace

std::vector<Step> requant_steps(const QuantParams& from, const QuantParams& to) {
  from.validate();
  to.validate();
  WINO2PC_ENFORCE(from.is_signed && to.is_signed, ErrorCode::kInvalidParams,
                  "requant expects signed params");
  std::vector<Step> steps;
  const int d = from.scale_exp - to.scale_exp;
  int bits = from.bits;
  if (d > 0) {
    WINO2PC_ENFORCE(d < from.bits, ErrorCode::kUnreachableTarget,
                    fmt::format("cannot drop {} fraction bits from a {}-bit value", d, from.bits));
    steps.push_back({StepKind::kTr, d});
    bits -= d;
  } else if (d < 0) {
    WINO2PC_ENFORCE(to.bits >= from.bits - d, ErrorCode::kUnreachableTarget,
                    fmt::format("scale increase by {} needs at least {} bits, target has {}", -d,
                                from.bits - d, to.bits));
  }
  if (to.bits < bits) steps.push_back({StepKind::kNarrow, to.bits});
  if (to.bits > bits) steps.push_back({StepKind::kExt, to.bits});
  if (d < 0) steps.push_back({StepKind::kShl, -d});
  return steps;
}

Share ext(Party& p, const Share& x, int l2, bool msb_known) {
  const int l1 = x.bits();
  WINO2PC_ENFORCE(l2 > l1 && l2 <= kMaxRingBits, ErrorCode::kInvalidWidths,
                  fmt::format("ext needs l2 > l1 (got {} -> {})", l1, l2));
  ProtocolScope scope(p, "ext", Phase::kOnline);
  p.charge(p.cost().ext(l1, l2, msb_known) * x.size());
  const RingElem half = RingElem{1} << (l1 - 1);
  std::vector<RingElem> in(x.values);
  if (p.is_server()) {
    for (auto& v : in) v = ring_add(v, half, l1);
  }
  auto w = p.compare(CompareMode::kCarry, in, l1, l2);
  std::vector<RingElem> out(x.size());
  const RingElem wrap = l1 >= 64 ? 0 : (RingElem{1} << l1);
  for (size_t i = 0; i < x.size(); ++i) {
    RingElem v = ring_sub(in[i], ring_mul(w[i], wrap, l2), l2);
    if (p.is_server()) v = ring_sub(v, half, l2);
    out[i] = v;
  }
  return with_values(x, std::move(out), l2, x.params.scale_exp, x.params.msb_known_nonneg);
}

namespace {

// Shared core of Trunc and TR: returns shares of floor(v / 2^s) + 2^(l1-1-s)
// minus w * 2^(l1-s), reduced to `out_bits`; `w` is only computed when the
// output ring keeps bits above l1 - s.
std::vector<RingElem> shifted_core(Party& p, const Share& x, int shift, int out_bits,
                                   bool with_wrap) {
  const int l1 = x.bits();
  const RingElem half = RingElem{1} << (l1 - 1);
  std::vector<RingElem> a(x.values);
  if (p.is_server()) {
    for (auto& v : a) v = ring_add(v, half, l1);
  }
  std::vector<RingElem> low(a.size()), high(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    low[i] = a[i] & ring_mask(shift);
    high[i] = a[i] >> shift;
  }
  auto c = p.compare(CompareMode::kCarry, low, shift, out_bits);
  std::vector<RingElem> w;
  if (with_wrap) w = p.compare(CompareMode::kCarry, a, l1, out_bits);
  const RingElem bias = RingElem{1} << (l1 - 1 - shift);
  const RingElem top = RingElem{1} << (l1 - shift);
  std::vector<RingElem> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    RingElem v = ring_add(high[i], c[i], out_bits);
    if (with_wrap) v = ring_sub(v, ring_mul(w[i], top, out_bits), out_bits);
    if (p.is_server()) v = ring_sub(v, bias, out_bits);
    out[i] = v;
  }
  return out;
}

}  // namespace

Share trunc(Party& p, const Share& x, int shift, bool msb_known) {
  const int l1 = x.bits();
  check_width(l1, shift);
  ProtocolScope scope(p, "trunc", Phase::kOnline);
  p.charge(p.cost().trunc(l1, shift, msb_known) * x.size());
  auto out = shifted_core(p, x, shift, l1, true);
  return with_values(x, std::move(out), l1, x.params.scale_exp - shift,
                     x.params.msb_known_nonneg);
}

Share truncate_reduce(Party& p, const Share& x, int shift) {
  const int l1 = x.bits();
  check_width(l1, shift);
  ProtocolScope scope(p, "tr", Phase::kOnline);
  p.charge(p.cost().truncate_reduce(l1, shift) * x.size());
  auto out = shifted_core(p, x, shift, l1 - shift, false);
  return with_values(x, std::move(out), l1 - shift, x.params.scale_exp - shift,
                     x.params.msb_known_nonneg);
}

Share narrow(const Share& x, int bits) {
  WINO2PC_ENFORCE(bits >= 1 && bits <= x.bits(), ErrorCode::kInvalidWidths,
                  fmt::format("narrow {} -> {}", x.bits(), bits));
  std::vector<RingElem> out(x.values);
  for (auto& v : out) v &= ring_mask(bits);
  return with_values(x, std::move(out), bits, x.params.scale_exp, false);
}

Share shift_left(const Share& x, int shift) {
  WINO2PC_ENFORCE(shift >= 0 && shift < x.bits(), ErrorCode::kInvalidWidths,
                  fmt::format("left shift {} in {}-bit ring", shift, x.bits()));
  std::vector<RingElem> out(x.values);
  for (auto& v : out) v = (v << shift) & ring_mask(x.bits());
  return with_values(x, std::move(out), x.bits(), x.params.scale_exp + shift, false);
}

Share requant(Party& p, const Share& x, const QuantParams& to, bool msb_known) {
  Share cur = x;
  for (const Step& s : requant_steps(x.params, to)) {
    switch (s.kind) {
      case StepKind::kTr:
        cur = truncate_reduce(p, cur, s.arg);
        break;
      case StepKind::kNarrow:
        cur = narrow(cur, s.arg);
        break;
      case StepKind::kExt:
        cur = ext(p, cur, s.arg, msb_known);
        break;
      case StepKind::kShl:
        cur = shift_left(cur, s.arg);
        break;
    }
  }
  return cur;
}

uint64_t requant_cost(const CostModel& cost, const QuantParams& from, const QuantParams& to,
                      int64_t n, bool msb_known) {
  uint64_t total = 0;
  int bits = from.bits;
  for (const Step& s : requant_steps(from, to)) {
    if (s.kind == StepKind::kTr) {
      total += cost.truncate_reduce(bits, s.arg) * static_cast<uint64_t>(n);
      bits -= s.arg;
    } else if (s.kind == StepKind::kExt) {
      total += cost.ext(bits, s.arg, msb_known) * static_cast<uint64_t>(n);
      bits = s.arg;
    } else if (s.kind == StepKind::kNarrow) {
      bits = s.arg;
    }
  }
  return total;
}

Share input_share(Party& p, const std::optional<QTensor>& client_value, const Shape& shape,
                  const QuantParams& params) {
  params.validate();
  const auto n = static_cast<size_t>(shape_numel(shape));
  ProtocolScope scope(p, "input", Phase::kOnline);
  p.charge(static_cast<uint64_t>(n) * static_cast<uint64_t>(params.bits));
  Share out;
  out.owner = p.id();
  out.shape = shape;
  out.params = params;
  out.params.msb_known_nonneg = false;
  if (p.is_server()) {
    out.values = p.recv(MsgTag::kInputShare).get_packed(n, params.bits);
  } else {
    WINO2PC_ENFORCE(client_value.has_value(), ErrorCode::kInvalidParams,
                    "client must provide the input tensor");
    WINO2PC_ENFORCE(client_value->shape() == shape, ErrorCode::kShapeMismatch,
                    "input shape " + shape_str(client_value->shape()) + " != " + shape_str(shape));
    WINO2PC_ENFORCE(client_value->params().same_format(params), ErrorCode::kParamMismatch,
                    "input params differ from declared params");
    auto mask = net::random_ring(p.rng(), n, params.bits);
    net::ByteWriter w;
    w.put_packed(mask, params.bits);
    p.send(MsgTag::kInputShare, w);
    out.values.resize(n);
    for (size_t i = 0; i < n; ++i) {
      out.values[i] = ring_sub(to_ring((*client_value)[static_cast<int64_t>(i)], params.bits),
                               mask[i], params.bits);
    }
  }
  return out;
}

std::optional<QTensor> reveal_to_client(Party& p, const Share& x) {
  ProtocolScope scope(p, "output", Phase::kOnline);
  p.charge(static_cast<uint64_t>(x.size()) * static_cast<uint64_t>(x.bits()));
  if (p.is_server()) {
    net::ByteWriter w;
    w.put_packed(x.values, x.bits());
    p.send(MsgTag::kOutputReveal, w);
    return std::nullopt;
  }
  Share other = x;
  other.owner = net::PartyId::kServer;
  other.values = p.recv(MsgTag::kOutputReveal).get_packed(x.size(), x.bits());
  QuantParams params = x.params;
  params.msb_known_nonneg = false;
  other.params = params;
  Share mine = x;
  mine.params = params;
  return net::reconstruct(other, mine);
}

QTensor ext_plain(const QTensor& x, int l2) {
  WINO2PC_ENFORCE(l2 > x.params().bits && l2 <= kMaxRingBits, ErrorCode::kInvalidWidths,
                  "ext needs l2 > l1");
  return plain_with(x, x.data(), l2, x.params().scale_exp, x.params().msb_known_nonneg);
}

QTensor trunc_plain(const QTensor& x, int shift) {
  check_width(x.params().bits, shift);
  std::vector<int64_t> d(x.data());
  for (auto& v : d) v = floor_shift(v, shift);
  return plain_with(x, std::move(d), x.params().bits, x.params().scale_exp - shift,
                    x.params().msb_known_nonneg);
}

QTensor truncate_reduce_plain(const QTensor& x, int shift) {
  check_width(x.params().bits, shift);
  std::vector<int64_t> d(x.data());
  for (auto& v : d) v = floor_shift(v, shift);
  return plain_with(x, std::move(d), x.params().bits - shift, x.params().scale_exp - shift,
                    x.params().msb_known_nonneg);
}

QTensor narrow_plain(const QTensor& x, int bits) {
  WINO2PC_ENFORCE(bits >= 1 && bits <= x.params().bits, ErrorCode::kInvalidWidths,
                  "narrow to a wider ring");
  std::vector<int64_t> d(x.data());
  for (auto& v : d) v = ring_reduce(v, bits);
  return plain_with(x, std::move(d), bits, x.params().scale_exp, false);
}

QTensor shift_left_plain(const QTensor& x, int shift) {
  const int bits = x.params().bits;
  WINO2PC_ENFORCE(shift >= 0 && shift < bits, ErrorCode::kInvalidWidths, "left shift");
  std::vector<int64_t> d(x.data());
  for (auto& v : d) v = ring_reduce(static_cast<__int128>(v) << shift, bits);
  return plain_with(x, std::move(d), bits, x.params().scale_exp + shift, false);
}

QTensor requant_plain(const QTensor& x, const QuantParams& to) {
  QTensor cur = x;
  for (const Step& s : requant_steps(x.params(), to)) {
    switch (s.kind) {
      case StepKind::kTr:
        cur = truncate_reduce_plain(cur, s.arg);
        break;
      case StepKind::kNarrow:
        cur = narrow_plain(cur, s.arg);
        break;
      case StepKind::kExt:
        cur = ext_plain(cur, s.arg);
        break;
      case StepKind::kShl:
        cur = shift_left_plain(cur, s.arg);
        break;
    }
  }
  return cur;
}

}  // namespace wino2pc::proto
