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

#include "wino2pc/winograd/conv.h"

#include <algorithm>

#include "wino2pc/core/errors.h"
#include "wino2pc/winograd/tiling.h"

namespace wino2pc::winograd {

void ConvShape::validate() const {
  WINO2PC_ENFORCE(n > 0 && c > 0 && h > 0 && w > 0 && k > 0 && r > 0 && stride > 0 && pad >= 0,
                  ErrorCode::kShapeMismatch, "invalid convolution shape");
  WINO2PC_ENFORCE(h + 2 * pad >= r && w + 2 * pad >= r, ErrorCode::kShapeMismatch,
                  "input smaller than the kernel");
}

int64_t direct_conv_mults(const ConvShape& s) {
  return s.n * s.k * s.c * s.r * s.r * s.out_h() * s.out_w();
}

namespace {

template <typename T>
std::vector<T> direct_generic(std::span<const T> w, std::span<const T> x, const ConvShape& s) {
  s.validate();
  WINO2PC_ENFORCE(static_cast<int64_t>(w.size()) == s.weight_numel() &&
                      static_cast<int64_t>(x.size()) == s.input_numel(),
                  ErrorCode::kShapeMismatch, "direct conv operand sizes");
  const int64_t oh = s.out_h(), ow = s.out_w();
  std::vector<T> y(static_cast<size_t>(s.output_numel()), T(0));
  for (int64_t b = 0; b < s.n; ++b) {
    for (int64_t k = 0; k < s.k; ++k) {
      for (int64_t i = 0; i < oh; ++i) {
        for (int64_t j = 0; j < ow; ++j) {
          T acc(0);
          for (int64_t c = 0; c < s.c; ++c) {
            for (int u = 0; u < s.r; ++u) {
              const int64_t yy = i * s.stride - s.pad + u;
              if (yy < 0 || yy >= s.h) continue;
              for (int v = 0; v < s.r; ++v) {
                const int64_t xx = j * s.stride - s.pad + v;
                if (xx < 0 || xx >= s.w) continue;
                acc += w[static_cast<size_t>(((k * s.c + c) * s.r + u) * s.r + v)] *
                       x[static_cast<size_t>(((b * s.c + c) * s.h + yy) * s.w + xx)];
              }
            }
          }
          y[static_cast<size_t>(((b * s.k + k) * oh + i) * ow + j)] = acc;
        }
      }
    }
  }
  return y;
}

// Generic sandwich dst = L S L^T with L p x q, S q x q.
template <typename T>
void sandwich(const T* src, T* dst, const std::vector<T>& l, int p, int q) {
  std::vector<T> tmp(static_cast<size_t>(p * q), T(0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      T acc(0);
      for (int k = 0; k < q; ++k) acc += l[static_cast<size_t>(i * q + k)] * src[k * q + j];
      tmp[static_cast<size_t>(i * q + j)] = acc;
    }
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      T acc(0);
      for (int k = 0; k < q; ++k) acc += tmp[static_cast<size_t>(i * q + k)] * l[static_cast<size_t>(j * q + k)];
      dst[i * p + j] = acc;
    }
  }
}

template <typename T>
std::vector<T> winograd_generic(std::span<const T> w, std::span<const T> x, const ConvShape& s,
                                const WinogradPlan& plan, const std::vector<T>& bt,
                                const std::vector<T>& g, const std::vector<T>& at) {
  s.validate();
  WINO2PC_ENFORCE(s.stride == 1 && s.r == plan.r, ErrorCode::kUnsupportedPlan,
                  "Winograd convolution needs stride 1 and a matching kernel size");
  WINO2PC_ENFORCE(static_cast<int64_t>(w.size()) == s.weight_numel() &&
                      static_cast<int64_t>(x.size()) == s.input_numel(),
                  ErrorCode::kShapeMismatch, "winograd conv operand sizes");
  const TileGrid grid = TileGrid::make(s.n, s.c, s.h, s.w, s.pad, plan);
  const int a = plan.alpha;
  const int64_t aa = a * a;
  const int64_t nt = grid.tiles();
  const auto tiles = tile_partition<T>(x, grid);

  std::vector<T> u(tiles.size());
  for (int64_t i = 0; i < s.c * nt; ++i) sandwich(tiles.data() + i * aa, u.data() + i * aa, bt, a, a);

  std::vector<T> v(static_cast<size_t>(s.k * s.c * aa));
  for (int64_t i = 0; i < s.k * s.c; ++i) {
    sandwich(w.data() + i * s.r * s.r, v.data() + i * aa, g, a, s.r);
  }

  const int mm = plan.m * plan.m;
  std::vector<T> out_tiles(static_cast<size_t>(s.k * nt * mm));
  std::vector<T> acc(static_cast<size_t>(aa));
  for (int64_t k = 0; k < s.k; ++k) {
    for (int64_t t = 0; t < nt; ++t) {
      std::fill(acc.begin(), acc.end(), T(0));
      for (int64_t c = 0; c < s.c; ++c) {
        const T* vv = v.data() + (k * s.c + c) * aa;
        const T* uu = u.data() + (c * nt + t) * aa;
        for (int64_t xi = 0; xi < aa; ++xi) acc[static_cast<size_t>(xi)] += vv[xi] * uu[xi];
      }
      sandwich(acc.data(), out_tiles.data() + (k * nt + t) * mm, at, plan.m, a);
    }
  }
  return tile_merge<T>(out_tiles, grid, s.k);
}

}  // namespace

std::vector<int64_t> direct_conv_plain(std::span<const int64_t> w, std::span<const int64_t> x,
                                       const ConvShape& s) {
  return direct_generic<int64_t>(w, x, s);
}

std::vector<double> direct_conv_plain(std::span<const double> w, std::span<const double> x,
                                      const ConvShape& s) {
  return direct_generic<double>(w, x, s);
}

std::vector<Rational> direct_conv_rational(std::span<const Rational> w,
                                           std::span<const Rational> x, const ConvShape& s) {
  return direct_generic<Rational>(w, x, s);
}

std::vector<Rational> winograd_conv_rational(std::span<const Rational> w,
                                             std::span<const Rational> x, const ConvShape& s,
                                             const WinogradPlan& plan) {
  return winograd_generic<Rational>(w, x, s, plan, plan.B.transpose().v, plan.G.v,
                                    plan.A.transpose().v);
}

std::vector<double> winograd_conv_plain(std::span<const double> w, std::span<const double> x,
                                        const ConvShape& s, const WinogradPlan& plan) {
  return winograd_generic<double>(w, x, s, plan, plan.B.transpose().to_double(),
                                  plan.G.to_double(), plan.A.transpose().to_double());
}

std::vector<int64_t> winograd_conv_plain(std::span<const int64_t> w, std::span<const int64_t> x,
                                         const ConvShape& s, const WinogradPlan& plan) {
  std::vector<Rational> rw(w.begin(), w.end()), rx(x.begin(), x.end());
  const auto y = winograd_conv_rational(rw, rx, s, plan);
  std::vector<int64_t> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    WINO2PC_ENFORCE(y[i].denominator() == 1, ErrorCode::kInvariantViolation,
                    "Winograd result is not integral");
    out[i] = y[i].numerator();
  }
  return out;
}

}  // namespace wino2pc::winograd
