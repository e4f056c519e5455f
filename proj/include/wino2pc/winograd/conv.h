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

// Reference convolutions: direct and Winograd, over integers, doubles and
// exact rationals.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wino2pc/winograd/plan.h"

namespace wino2pc::winograd {

struct ConvShape {
  int64_t n = 1, c = 1, h = 1, w = 1, k = 1;
  int r = 3;
  int stride = 1;
  int pad = 1;

  int64_t out_h() const { return (h + 2 * pad - r) / stride + 1; }
  int64_t out_w() const { return (w + 2 * pad - r) / stride + 1; }
  int64_t weight_numel() const { return k * c * r * r; }
  int64_t input_numel() const { return n * c * h * w; }
  int64_t output_numel() const { return n * k * out_h() * out_w(); }
  void validate() const;
};

/// Weights K x C x r x r, input N x C x H x W, output N x K x H' x W'.
std::vector<int64_t> direct_conv_plain(std::span<const int64_t> w, std::span<const int64_t> x,
                                       const ConvShape& s);
std::vector<double> direct_conv_plain(std::span<const double> w, std::span<const double> x,
                                      const ConvShape& s);
std::vector<Rational> direct_conv_rational(std::span<const Rational> w,
                                           std::span<const Rational> x, const ConvShape& s);

/// Stride-1 Winograd convolution. The integer overload runs in exact
/// rationals and checks that the result is integral.
std::vector<int64_t> winograd_conv_plain(std::span<const int64_t> w, std::span<const int64_t> x,
                                         const ConvShape& s, const WinogradPlan& plan);
std::vector<double> winograd_conv_plain(std::span<const double> w, std::span<const double> x,
                                        const ConvShape& s, const WinogradPlan& plan);
std::vector<Rational> winograd_conv_rational(std::span<const Rational> w,
                                             std::span<const Rational> x, const ConvShape& s,
                                             const WinogradPlan& plan);

/// Scalar weight-by-activation products of a direct convolution.
int64_t direct_conv_mults(const ConvShape& s);

}  // namespace wino2pc::winograd
