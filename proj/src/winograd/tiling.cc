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

#include "wino2pc/winograd/tiling.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::winograd {

TileGrid TileGrid::make(int64_t n, int64_t c, int64_t h, int64_t w, int pad,
                        const WinogradPlan& plan) {
  WINO2PC_ENFORCE(n > 0 && c > 0 && h > 0 && w > 0 && pad >= 0, ErrorCode::kShapeMismatch,
                  "invalid tile grid dimensions");
  TileGrid g;
  g.n = n;
  g.c = c;
  g.h = h;
  g.w = w;
  g.pad = pad;
  g.m = plan.m;
  g.r = plan.r;
  g.alpha = plan.alpha;
  g.out_h = h + 2 * pad - plan.r + 1;
  g.out_w = w + 2 * pad - plan.r + 1;
  WINO2PC_ENFORCE(g.out_h > 0 && g.out_w > 0, ErrorCode::kShapeMismatch,
                  "input smaller than the kernel");
  g.tiles_h = (g.out_h + g.m - 1) / g.m;
  g.tiles_w = (g.out_w + g.m - 1) / g.m;
  return g;
}

namespace {

// dst (p x p) = L (p x q) * S (q x q) * L^T over uint64 wraparound.
void ring_sandwich(const RingElem* src, RingElem* dst, const std::vector<int64_t>& l, int p,
                   int q, RingElem mask, std::vector<RingElem>& tmp) {
  tmp.assign(static_cast<size_t>(p * q), 0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      RingElem acc = 0;
      for (int k = 0; k < q; ++k) {
        const int64_t coef = l[static_cast<size_t>(i * q + k)];
        if (coef != 0) acc += static_cast<RingElem>(coef) * src[k * q + j];
      }
      tmp[static_cast<size_t>(i * q + j)] = acc;
    }
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      RingElem acc = 0;
      for (int k = 0; k < q; ++k) {
        const int64_t coef = l[static_cast<size_t>(j * q + k)];
        if (coef != 0) acc += tmp[static_cast<size_t>(i * q + k)] * static_cast<RingElem>(coef);
      }
      dst[i * p + j] = acc & mask;
    }
  }
}

void check_room(int value_bits, int ext_bits, int ring_bits, const char* what) {
  WINO2PC_ENFORCE(ring_bits >= 1 && ring_bits <= kMaxRingBits, ErrorCode::kInvalidWidths,
                  fmt::format("{}: invalid ring width {}", what, ring_bits));
  WINO2PC_ENFORCE(value_bits + ext_bits <= ring_bits, ErrorCode::kOverflowRisk,
                  fmt::format("{}: {}-bit values need {} bits, ring has {}", what, value_bits,
                              value_bits + ext_bits, ring_bits));
}

}  // namespace

std::vector<RingElem> feature_transform(std::span<const RingElem> tiles, int64_t c,
                                        int64_t n_tiles, const WinogradPlan& plan,
                                        int ring_bits, int value_bits) {
  check_room(value_bits, plan.ft_ext_bits, ring_bits, "feature transform");
  const int a = plan.alpha;
  const int64_t aa = a * a;
  WINO2PC_ENFORCE(static_cast<int64_t>(tiles.size()) == c * n_tiles * aa,
                  ErrorCode::kShapeMismatch, "feature transform: tile buffer size");
  const RingElem mask = ring_mask(ring_bits);
  std::vector<RingElem> out(tiles.size());
  std::vector<RingElem> tile(static_cast<size_t>(aa)), tmp;
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t t = 0; t < n_tiles; ++t) {
      ring_sandwich(tiles.data() + (ch * n_tiles + t) * aa, tile.data(), plan.bt_int, a, a, mask,
                    tmp);
      for (int64_t xi = 0; xi < aa; ++xi) {
        out[static_cast<size_t>((xi * c + ch) * n_tiles + t)] = tile[static_cast<size_t>(xi)];
      }
    }
  }
  return out;
}

std::vector<RingElem> output_transform(std::span<const RingElem> m, int64_t k, int64_t n_tiles,
                                       const WinogradPlan& plan, int ring_bits, int value_bits) {
  check_room(value_bits, plan.out_ext_bits, ring_bits, "output transform");
  const int a = plan.alpha;
  const int64_t aa = a * a;
  const int mm = plan.m * plan.m;
  WINO2PC_ENFORCE(static_cast<int64_t>(m.size()) == k * n_tiles * aa, ErrorCode::kShapeMismatch,
                  "output transform: buffer size");
  const RingElem mask = ring_mask(ring_bits);
  std::vector<RingElem> out(static_cast<size_t>(k * n_tiles * mm));
  std::vector<RingElem> tile(static_cast<size_t>(aa)), tmp;
  for (int64_t kk = 0; kk < k; ++kk) {
    for (int64_t t = 0; t < n_tiles; ++t) {
      for (int64_t xi = 0; xi < aa; ++xi) {
        tile[static_cast<size_t>(xi)] = m[static_cast<size_t>((xi * k + kk) * n_tiles + t)];
      }
      ring_sandwich(tile.data(), out.data() + (kk * n_tiles + t) * mm, plan.at_int, plan.m, a,
                    mask, tmp);
    }
  }
  return out;
}

}  // namespace wino2pc::winograd
