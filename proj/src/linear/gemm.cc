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

#include "wino2pc/linear/gemm.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/net/dealer.h"
#include "wino2pc/net/wire.h"

namespace wino2pc::linear {

using net::MsgTag;
using net::Phase;
using net::ProtocolScope;

GemmWeights GemmWeights::from_values(std::span<const int64_t> values, int64_t rows, int64_t cols,
                                     const BitImportance& importance) {
  WINO2PC_ENFORCE(static_cast<int64_t>(values.size()) == rows * cols, ErrorCode::kShapeMismatch,
                  "weight matrix size");
  GemmWeights w{rows, cols, importance, {}};
  const int lw = importance.bits();
  w.bits.reserve(values.size() * static_cast<size_t>(lw));
  for (int64_t v : values) {
    auto b = importance.encode(v);
    w.bits.insert(w.bits.end(), b.begin(), b.end());
  }
  return w;
}

std::vector<int64_t> GemmWeights::decode() const {
  const int lw = importance.bits();
  WINO2PC_ENFORCE(static_cast<int64_t>(bits.size()) == rows * cols * lw,
                  ErrorCode::kInvalidParams, "weight bits missing");
  std::vector<int64_t> out(static_cast<size_t>(rows * cols));
  for (size_t i = 0; i < out.size(); ++i) out[i] = importance.decode(bits.data() + i * lw);
  return out;
}

int64_t GemmWeights::max_abs() const {
  int64_t m = 0;
  for (int64_t v : decode()) m = std::max<int64_t>(m, std::llabs(v));
  return m;
}

int gemm_accumulator_bits(int value_bits, int64_t l, const BitImportance& importance) {
  return value_bits + ceil_log2(static_cast<uint64_t>(l)) + importance.accumulator_bits();
}

uint64_t gemm_offline_cost(const proto::CostModel& c, int64_t ots) {
  return c.gemm_offline_per_ot() * static_cast<uint64_t>(ots);
}

uint64_t gemm_online_cost(const proto::CostModel& c, int64_t ots, int64_t n, int ring_bits) {
  return c.gemm_online_per_ot(n, ring_bits) * static_cast<uint64_t>(ots);
}

std::vector<RingElem> ot_gemm_batched(Party& p, std::span<const GemmWeights> w,
                                      std::span<const RingElem> x, int64_t n, int ring_bits,
                                      int value_bits) {
  WINO2PC_ENFORCE(!w.empty() && n > 0, ErrorCode::kShapeMismatch, "empty GEMM batch");
  const int lw = w[0].importance.bits();
  int64_t ots = 0, x_total = 0, y_total = 0;
  for (const auto& wi : w) {
    WINO2PC_ENFORCE(wi.importance.bits() == lw, ErrorCode::kParamMismatch,
                    "GEMM batch mixes weight widths");
    const int need = gemm_accumulator_bits(value_bits, wi.cols, wi.importance);
    WINO2PC_ENFORCE(ring_bits >= need && ring_bits <= kMaxRingBits,
                    ErrorCode::kAccumulatorTooNarrow,
                    fmt::format("accumulator has {} bits, needs {}", ring_bits, need));
    if (p.is_server()) {
      WINO2PC_ENFORCE(static_cast<int64_t>(wi.bits.size()) == wi.rows * wi.cols * lw,
                      ErrorCode::kInvalidParams, "server is missing weight bits");
    }
    ots += wi.rows * wi.cols * lw;
    x_total += wi.cols * n;
    y_total += wi.rows * n;
  }
  WINO2PC_ENFORCE(static_cast<int64_t>(x.size()) == x_total, ErrorCode::kShapeMismatch,
                  fmt::format("GEMM input has {} elements, expected {}", x.size(), x_total));
  const RingElem mask = ring_mask(ring_bits);
  const auto un = static_cast<size_t>(n);

  net::RandomOtBatch rot;
  {
    ProtocolScope scope(p, "gemm", Phase::kOffline);
    p.charge(gemm_offline_cost(p.cost(), ots));
    rot = p.random_ots(static_cast<size_t>(ots));
  }

  ProtocolScope scope(p, "gemm", Phase::kOnline);
  p.charge(gemm_online_cost(p.cost(), ots, n, ring_bits));
  std::vector<RingElem> y(static_cast<size_t>(y_total), 0);

  if (p.is_server()) {
    // Flip bits e = w xor c.
    std::vector<uint8_t> flips(static_cast<size_t>(ots));
    int64_t o = 0;
    for (const auto& wi : w) {
      for (size_t i = 0; i < wi.bits.size(); ++i, ++o) {
        flips[static_cast<size_t>(o)] = wi.bits[i] ^ rot.choice[static_cast<size_t>(o)];
      }
    }
    net::ByteWriter out;
    out.put_bits(flips);
    p.send(MsgTag::kOtChoice, out);
    auto in = p.recv(MsgTag::kOtMasked);

    o = 0;
    int64_t x_off = 0, y_off = 0;
    for (const auto& wi : w) {
      const int64_t L = wi.cols;
      for (int64_t i = 0; i < wi.rows; ++i) {
        RingElem* yrow = y.data() + y_off + i * n;
        for (int64_t j = 0; j < L; ++j) {
          const RingElem* xrow = x.data() + x_off + j * n;
          for (int b = 0; b < lw; ++b, ++o) {
            const uint8_t bit = wi.bits[static_cast<size_t>((i * L + j) * lw + b)];
            const RingElem coef = static_cast<RingElem>(wi.importance.coefficient(b));
            auto d = in.get_packed(un, ring_bits);
            auto r = net::prg_expand(rot.chosen_seed[static_cast<size_t>(o)], un, ring_bits);
            for (size_t k = 0; k < un; ++k) {
              RingElem share = r[k];
              if (bit) share = share - d[k] + xrow[k];
              yrow[k] += coef * share;
            }
          }
        }
        for (int64_t k = 0; k < n; ++k) yrow[k] &= mask;
      }
      p.counters().gemm_mults += static_cast<uint64_t>(wi.rows * wi.cols * n);
      x_off += L * n;
      y_off += wi.rows * n;
    }
  } else {
    auto in = p.recv(MsgTag::kOtChoice);
    auto flips = in.get_bits(static_cast<size_t>(ots));
    net::ByteWriter out;
    int64_t o = 0, x_off = 0, y_off = 0;
    std::vector<RingElem> d(un);
    for (const auto& wi : w) {
      const int64_t L = wi.cols;
      for (int64_t i = 0; i < wi.rows; ++i) {
        RingElem* yrow = y.data() + y_off + i * n;
        for (int64_t j = 0; j < L; ++j) {
          const RingElem* xrow = x.data() + x_off + j * n;
          for (int b = 0; b < lw; ++b, ++o) {
            const uint8_t e = flips[static_cast<size_t>(o)];
            const uint64_t s_e = e ? rot.seed1[static_cast<size_t>(o)] : rot.seed0[static_cast<size_t>(o)];
            const uint64_t s_o = e ? rot.seed0[static_cast<size_t>(o)] : rot.seed1[static_cast<size_t>(o)];
            auto t = net::prg_expand(s_e, un, ring_bits);
            auto u = net::prg_expand(s_o, un, ring_bits);
            const RingElem coef = static_cast<RingElem>(wi.importance.coefficient(b));
            for (size_t k = 0; k < un; ++k) {
              d[k] = (u[k] - t[k] - xrow[k]) & mask;
              yrow[k] -= coef * t[k];
            }
            out.put_packed(d, ring_bits);
          }
        }
        for (int64_t k = 0; k < n; ++k) yrow[k] &= mask;
      }
      x_off += L * n;
      y_off += wi.rows * n;
    }
    p.send(MsgTag::kOtMasked, out);
  }
  return y;
}

Share ot_gemm(Party& p, const GemmWeights& w, const Share& x, int value_bits) {
  WINO2PC_ENFORCE(x.shape.size() == 2 && x.shape[0] == w.cols, ErrorCode::kShapeMismatch,
                  "ot_gemm expects X of shape {L, N}, got " + shape_str(x.shape));
  const int64_t n = x.shape[1];
  auto y = ot_gemm_batched(p, std::span<const GemmWeights>(&w, 1), x.values, n, x.bits(),
                           value_bits);
  Share out;
  out.owner = x.owner;
  out.shape = {w.rows, n};
  out.values = std::move(y);
  out.params = x.params;
  out.params.msb_known_nonneg = false;
  return out;
}

std::vector<int64_t> gemm_plain(const GemmWeights& w, std::span<const int64_t> x, int64_t n) {
  WINO2PC_ENFORCE(static_cast<int64_t>(x.size()) == w.cols * n, ErrorCode::kShapeMismatch,
                  "gemm_plain: input size");
  const auto wv = w.decode();
  std::vector<int64_t> y(static_cast<size_t>(w.rows * n), 0);
  for (int64_t i = 0; i < w.rows; ++i) {
    for (int64_t j = 0; j < w.cols; ++j) {
      const int64_t c = wv[static_cast<size_t>(i * w.cols + j)];
      if (c == 0) continue;
      for (int64_t k = 0; k < n; ++k) y[static_cast<size_t>(i * n + k)] += c * x[static_cast<size_t>(j * n + k)];
    }
  }
  return y;
}

}  // namespace wino2pc::linear
