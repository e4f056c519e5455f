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

// Bit-level quantizer: forward pass over relaxed bits and its
// straight-through gradient.

#pragma once

#include <span>

#include "wino2pc/linear/bit_importance.h"

namespace wino2pc::quant {

struct BsqOptions {
  // Round the weighted bit sum (training forward). Off gives the smooth
  // surrogate whose derivative the straight-through estimator uses.
  bool round = true;
  // Head bit counts negatively (two's complement); off sums magnitudes.
  bool twos_complement = false;
};

/// s * Round(sum_b bits[b] * B[b]) / (2^lw - 1). `bits` is ordered like
/// the importance (head first), entries in [0, 1].
double bsq_forward(std::span<const double> bits, const linear::BitImportance& imp, double s,
                   int lw, const BsqOptions& opt = {});

/// 2^b / (2^lw - 1) * upstream, where b is the bit position (0 = least
/// significant) and the importance is standard with unit scale.
double bsq_backward(double upstream, int b, int lw);

/// Gradient of the smooth forward for any importance and scale:
/// upstream * s * B[position b] / (2^lw - 1), sign-adjusted for the head
/// under two's complement.
double bsq_backward(double upstream, int b, const linear::BitImportance& imp, double s, int lw,
                    const BsqOptions& opt = {});

}  // namespace wino2pc::quant
