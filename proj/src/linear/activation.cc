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

#include "wino2pc/linear/activation.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/net/dealer.h"
#include "wino2pc/net/wire.h"
#include "wino2pc/proto/conversions.h"

namespace wino2pc::linear {

using net::CompareMode;
using net::MsgTag;
using net::Phase;
using net::ProtocolScope;

Share relu_2pc(Party& p, const Share& x) {
  const int l = x.bits();
  const size_t n = x.size();
  ProtocolScope scope(p, "relu", Phase::kOnline);
  p.charge(p.cost().relu(l) * n);

  // d = 1 - msb(x), shared over Z_{2^l}.
  auto msb = p.compare(CompareMode::kMsb, x.values, l, l);
  std::vector<RingElem> d(n);
  for (size_t i = 0; i < n; ++i) {
    d[i] = ring_neg(msb[i], l);
    if (p.is_server()) d[i] = ring_add(d[i], 1, l);
  }

  // Beaver product d * x.
  auto t = p.beaver_triples(n, l);
  std::vector<RingElem> open(2 * n);
  for (size_t i = 0; i < n; ++i) {
    open[i] = ring_sub(d[i], t.a[i], l);
    open[n + i] = ring_sub(x.values[i], t.b[i], l);
  }
  net::ByteWriter w;
  w.put_packed(open, l);
  std::vector<RingElem> theirs;
  if (p.is_server()) {
    p.send(MsgTag::kBeaverOpen, w);
    theirs = p.recv(MsgTag::kBeaverOpen).get_packed(2 * n, l);
  } else {
    theirs = p.recv(MsgTag::kBeaverOpen).get_packed(2 * n, l);
    p.send(MsgTag::kBeaverOpen, w);
  }
  Share out = x;
  out.params.msb_known_nonneg = true;
  for (size_t i = 0; i < n; ++i) {
    const RingElem e = ring_add(open[i], theirs[i], l);
    const RingElem f = ring_add(open[n + i], theirs[n + i], l);
    RingElem z = t.c[i] + e * t.b[i] + f * t.a[i];
    if (p.is_server()) z += e * f;
    out.values[i] = z & ring_mask(l);
  }
  return out;
}

QTensor relu_plain(const QTensor& x) {
  std::vector<int64_t> d(x.data());
  for (auto& v : d) v = v < 0 ? 0 : v;
  QuantParams p = x.params();
  p.msb_known_nonneg = true;
  return QTensor(x.shape(), std::move(d), p);
}

namespace {

int alignment_shift(const QuantParams& main, const QuantParams& residual, int bits) {
  const int d = main.scale_exp - residual.scale_exp;
  WINO2PC_ENFORCE(d >= 0, ErrorCode::kScaleUnalignable,
                  fmt::format("residual scale 2^-{} is finer than the main branch 2^-{}",
                              residual.scale_exp, main.scale_exp));
  WINO2PC_ENFORCE(residual.bits + d <= bits, ErrorCode::kScaleUnalignable,
                  fmt::format("aligned residual needs {} bits, ring has {}", residual.bits + d,
                              bits));
  return d;
}

Share align_and_add(Party& p, const Share& main, const Share& residual) {
  WINO2PC_ENFORCE(main.shape == residual.shape, ErrorCode::kShapeMismatch,
                  "residual shape " + shape_str(residual.shape) + " != " + shape_str(main.shape));
  const int bits = main.bits();
  const int d = alignment_shift(main.params, residual.params, bits);
  Share r = residual;
  if (r.bits() < bits) r = proto::ext(p, r, bits, r.params.msb_known_nonneg);
  r = proto::shift_left(r, d);
  Share out = main;
  out.params.msb_known_nonneg = false;
  for (size_t i = 0; i < out.size(); ++i) out.values[i] = ring_add(out.values[i], r.values[i], bits);
  return out;
}

}  // namespace

Share residual_add_simplified(Party& p, const Share& main, const Share& residual) {
  return align_and_add(p, main, residual);
}

Share residual_add_baseline(Party& p, const Share& main, const Share& residual) {
  Share m = proto::ext(p, main, main.bits() + 1);
  return align_and_add(p, m, residual);
}

QTensor residual_add_plain(const QTensor& main, const QTensor& residual, int bits) {
  WINO2PC_ENFORCE(main.shape() == residual.shape(), ErrorCode::kShapeMismatch,
                  "residual shape mismatch");
  const int d = alignment_shift(main.params(), residual.params(), bits);
  std::vector<int64_t> out(main.data());
  for (size_t i = 0; i < out.size(); ++i) {
    const __int128 v = static_cast<__int128>(out[i]) +
                       (static_cast<__int128>(residual.data()[i]) << d);
    out[i] = ring_reduce(v, bits);
  }
  QuantParams p = main.params();
  p.bits = bits;
  p.msb_known_nonneg = false;
  return QTensor(main.shape(), std::move(out), p);
}

}  // namespace wino2pc::linear
