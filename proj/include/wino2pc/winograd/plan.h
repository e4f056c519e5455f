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

// Winograd F(m, r) plans, transform bit growth, and the offline weight
// transform.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "wino2pc/core/qtensor.h"

namespace wino2pc::winograd {

using Rational = boost::rational<int64_t>;

/// Dense row-major rational matrix.
struct RMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Rational> v;

  Rational at(int i, int j) const { return v[static_cast<size_t>(i * cols + j)]; }
  RMatrix transpose() const;
  bool is_integral() const;
  /// Entries as integers; throws kInvalidParams if any is fractional.
  std::vector<int64_t> to_int() const;
  std::vector<double> to_double() const;
};

RMatrix make_matrix(int rows, int cols, std::initializer_list<Rational> values);

struct WinogradPlan {
  int m = 2;
  int r = 3;
  int alpha = 4;  // m + r - 1
  RMatrix A;      // alpha x m
  RMatrix B;      // alpha x alpha
  RMatrix G;      // alpha x r
  std::vector<int64_t> at_int;  // m x alpha
  std::vector<int64_t> bt_int;  // alpha x alpha
  int ft_ext_bits = 0;
  int out_ext_bits = 0;
  int mults_per_tile = 16;

  int positions() const { return alpha * alpha; }
};

/// Supported: (2, 3) and (4, 3). Otherwise kUnsupportedPlan.
WinogradPlan winograd_matrices(int m, int r);

/// ceil(max_j log2 ||M[:, j]||_1).
int ext_bits_for_transform(const RMatrix& M);

/// G w G^T per (k, c) in exact rationals. `w` is K x C x r x r with value
/// q / 2^scale_exp; the result is K x C x alpha^2.
std::vector<Rational> weight_transform(const QTensor& w, const WinogradPlan& plan);
std::vector<double> weight_transform(std::span<const double> w, int64_t k, int64_t c,
                                     const WinogradPlan& plan);

}  // namespace wino2pc::winograd
