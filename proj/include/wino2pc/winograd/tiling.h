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

// Tile partitioning and the local (communication-free) feature and output
// transforms. Layouts:
//   input        [N][C][H][W]
//   input tiles  [C][T][alpha][alpha]      T = N * tiles_h * tiles_w
//   U            [alpha^2][C][T]           position-major, ready for GEMM
//   M            [alpha^2][K][T]
//   output tiles [K][T][m][m]
//   output       [N][K][H'][W']

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wino2pc/core/ring.h"
#include "wino2pc/winograd/plan.h"

namespace wino2pc::winograd {

struct TileGrid {
  int64_t n = 1, c = 1, h = 1, w = 1;
  int pad = 1;
  int m = 2, r = 3, alpha = 4;
  int64_t out_h = 0, out_w = 0;
  int64_t tiles_h = 0, tiles_w = 0;

  static TileGrid make(int64_t n, int64_t c, int64_t h, int64_t w, int pad,
                       const WinogradPlan& plan);
  int64_t tiles() const { return n * tiles_h * tiles_w; }
};

/// Overlapping alpha x alpha tiles with stride m; zero outside the image.
template <typename T>
std::vector<T> tile_partition(std::span<const T> x, const TileGrid& g) {
  const int64_t nt = g.tiles();
  const int a = g.alpha;
  std::vector<T> out(static_cast<size_t>(g.c * nt * a * a), T(0));
  for (int64_t ch = 0; ch < g.c; ++ch) {
    for (int64_t b = 0; b < g.n; ++b) {
      for (int64_t ti = 0; ti < g.tiles_h; ++ti) {
        for (int64_t tj = 0; tj < g.tiles_w; ++tj) {
          const int64_t t = (b * g.tiles_h + ti) * g.tiles_w + tj;
          T* dst = out.data() + (ch * nt + t) * a * a;
          for (int i = 0; i < a; ++i) {
            const int64_t y = ti * g.m - g.pad + i;
            if (y < 0 || y >= g.h) continue;
            for (int j = 0; j < a; ++j) {
              const int64_t xx = tj * g.m - g.pad + j;
              if (xx < 0 || xx >= g.w) continue;
              dst[i * a + j] = x[static_cast<size_t>(((b * g.c + ch) * g.h + y) * g.w + xx)];
            }
          }
        }
      }
    }
  }
  return out;
}

/// Inverse of output_partition: [K][T][m][m] -> [N][K][H'][W'] (cropped).
template <typename T>
std::vector<T> tile_merge(std::span<const T> tiles, const TileGrid& g, int64_t k) {
  const int64_t nt = g.tiles();
  std::vector<T> out(static_cast<size_t>(g.n * k * g.out_h * g.out_w), T(0));
  for (int64_t kk = 0; kk < k; ++kk) {
    for (int64_t b = 0; b < g.n; ++b) {
      for (int64_t ti = 0; ti < g.tiles_h; ++ti) {
        for (int64_t tj = 0; tj < g.tiles_w; ++tj) {
          const int64_t t = (b * g.tiles_h + ti) * g.tiles_w + tj;
          const T* src = tiles.data() + (kk * nt + t) * g.m * g.m;
          for (int i = 0; i < g.m; ++i) {
            const int64_t y = ti * g.m + i;
            if (y >= g.out_h) continue;
            for (int j = 0; j < g.m; ++j) {
              const int64_t xx = tj * g.m + j;
              if (xx >= g.out_w) continue;
              out[static_cast<size_t>(((b * k + kk) * g.out_h + y) * g.out_w + xx)] =
                  src[i * g.m + j];
            }
          }
        }
      }
    }
  }
  return out;
}

/// Non-overlapping m x m view of an [N][K][H'][W'] output.
template <typename T>
std::vector<T> output_partition(std::span<const T> y, const TileGrid& g, int64_t k) {
  const int64_t nt = g.tiles();
  std::vector<T> out(static_cast<size_t>(k * nt * g.m * g.m), T(0));
  for (int64_t kk = 0; kk < k; ++kk) {
    for (int64_t b = 0; b < g.n; ++b) {
      for (int64_t ti = 0; ti < g.tiles_h; ++ti) {
        for (int64_t tj = 0; tj < g.tiles_w; ++tj) {
          const int64_t t = (b * g.tiles_h + ti) * g.tiles_w + tj;
          T* dst = out.data() + (kk * nt + t) * g.m * g.m;
          for (int i = 0; i < g.m; ++i) {
            const int64_t yy = ti * g.m + i;
            if (yy >= g.out_h) continue;
            for (int j = 0; j < g.m; ++j) {
              const int64_t xx = tj * g.m + j;
              if (xx >= g.out_w) continue;
              dst[i * g.m + j] = y[static_cast<size_t>(((b * k + kk) * g.out_h + yy) * g.out_w + xx)];
            }
          }
        }
      }
    }
  }
  return out;
}

/// B^T X B per tile over Z_{2^ring_bits}. Requires value_bits + ft_ext_bits
/// <= ring_bits (kOverflowRisk otherwise). Returns U.
std::vector<RingElem> feature_transform(std::span<const RingElem> tiles, int64_t c,
                                        int64_t n_tiles, const WinogradPlan& plan,
                                        int ring_bits, int value_bits);

/// A^T M A per tile over Z_{2^ring_bits}. Requires value_bits + out_ext_bits
/// <= ring_bits. Returns output tiles.
std::vector<RingElem> output_transform(std::span<const RingElem> m, int64_t k, int64_t n_tiles,
                                       const WinogradPlan& plan, int ring_bits, int value_bits);

}  // namespace wino2pc::winograd
