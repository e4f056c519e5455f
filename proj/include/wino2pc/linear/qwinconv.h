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

// Quantized Winograd convolution (QWinConv) and the per-bit direct
// convolution, over shares and in plaintext.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/linear/bit_importance.h"
#include "wino2pc/linear/gemm.h"
#include "wino2pc/winograd/conv.h"
#include "wino2pc/winograd/plan.h"
#include "wino2pc/winograd/tiling.h"

namespace wino2pc::linear {

/// Winograd-domain quantized weights: real value = values / 2^scale_exp.
struct WinogradWeights {
  int64_t k = 0;
  int64_t c = 0;
  int m = 2;
  BitImportance importance;
  int scale_exp = 0;
  std::vector<int64_t> values;  // K x C x alpha^2

  winograd::WinogradPlan plan() const { return winograd::winograd_matrices(m, 3); }
  /// One K x C matrix per Winograd position (server view).
  std::vector<GemmWeights> per_position() const;
  /// Same shapes without weight bits (client view).
  std::vector<GemmWeights> public_per_position() const;
};

/// G W G^T of a K x C x 3 x 3 kernel, scaled by 2^scale_exp and rounded to
/// the nearest value representable under `importance`.
WinogradWeights quantize_winograd_weights(const QTensor& w, int m,
                                          const BitImportance& importance, int scale_exp);

/// Direct-convolution weights: real value = values / 2^scale_exp.
struct DirectWeights {
  int64_t k = 0;
  int64_t c = 0;
  int r = 3;
  BitImportance importance;
  int scale_exp = 0;
  std::vector<int64_t> values;  // K x C x r x r

  GemmWeights as_gemm() const;
};

DirectWeights quantize_direct_weights(const QTensor& w, const BitImportance& importance,
                                      int scale_exp);

/// Ring widths of the unfused QWinConv chain for `in_bits` activations.
struct QWinConvWidths {
  int in_bits = 0;
  int ft_bits = 0;   // after block 2
  int acc_bits = 0;  // after block 3
  int out_bits = 0;  // after block 5
};
QWinConvWidths qwinconv_widths(int in_bits, int64_t c, const BitImportance& importance,
                               const winograd::WinogradPlan& plan);

struct QWinConvOptions {
  // Block 1: requantize the input before the convolution.
  std::optional<QuantParams> requant_to;
  // Fold blocks 2, 3 and 5 into one extension ahead of the feature transform.
  bool fused = false;
  int pad = 1;
};

/// Output: N x K x H' x W' at QWinConvWidths::out_bits, scale e_x + e_w.
Share qwinconv(Party& p, const Share& x, const WinogradWeights& w, const QWinConvOptions& opt);
QTensor qwinconv_plain(const QTensor& x, const WinogradWeights& w, const QWinConvOptions& opt);

/// Local im2col: [N][C][H][W] -> [C r r][N H' W'] (zero padding).
template <typename T>
std::vector<T> im2col(std::span<const T> x, const winograd::ConvShape& s) {
  const int64_t oh = s.out_h(), ow = s.out_w();
  const int64_t cols = s.n * oh * ow;
  std::vector<T> out(static_cast<size_t>(s.c * s.r * s.r * cols), T(0));
  for (int64_t c = 0; c < s.c; ++c) {
    for (int u = 0; u < s.r; ++u) {
      for (int v = 0; v < s.r; ++v) {
        T* row = out.data() + ((c * s.r + u) * s.r + v) * cols;
        for (int64_t b = 0; b < s.n; ++b) {
          for (int64_t i = 0; i < oh; ++i) {
            const int64_t y = i * s.stride - s.pad + u;
            if (y < 0 || y >= s.h) continue;
            for (int64_t j = 0; j < ow; ++j) {
              const int64_t xx = j * s.stride - s.pad + v;
              if (xx < 0 || xx >= s.w) continue;
              row[(b * oh + i) * ow + j] = x[static_cast<size_t>(((b * s.c + c) * s.h + y) * s.w + xx)];
            }
          }
        }
      }
    }
  }
  return out;
}

/// [K][N H' W'] -> [N][K][H'][W'].
template <typename T>
std::vector<T> col2out(std::span<const T> y, int64_t k, const winograd::ConvShape& s) {
  const int64_t hw = s.out_h() * s.out_w();
  std::vector<T> out(y.size());
  for (int64_t kk = 0; kk < k; ++kk) {
    for (int64_t b = 0; b < s.n; ++b) {
      for (int64_t i = 0; i < hw; ++i) {
        out[static_cast<size_t>((b * k + kk) * hw + i)] = y[static_cast<size_t>((kk * s.n + b) * hw + i)];
      }
    }
  }
  return out;
}

/// Direct convolution as one per-bit GEMM over im2col patches. `x` must
/// already live in the accumulator ring; `value_bits` is its value width.
Share direct_conv_2pc(Party& p, const Share& x, const DirectWeights& w, int stride, int pad,
                      int value_bits);

/// Accumulator width of the direct convolution.
int direct_conv_acc_bits(int value_bits, const DirectWeights& w);

}  // namespace wino2pc::linear
