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

#include "wino2pc/winograd/ranges.h"

#include <algorithm>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"

namespace wino2pc::winograd {
namespace {

struct Sides {
  const std::vector<int64_t>* l;  // p x q
  int p;
  int q;
};

Sides sides(const WinogradPlan& plan, TransformSide side) {
  if (side == TransformSide::kFeature) return {&plan.bt_int, plan.alpha, plan.alpha};
  return {&plan.at_int, plan.m, plan.alpha};
}

// Coefficient of input (k, l) in output (i, j): L[i][k] * L[j][l].
int64_t coef(const Sides& s, int i, int j, int k, int l) {
  return (*s.l)[static_cast<size_t>(i * s.q + k)] * (*s.l)[static_cast<size_t>(j * s.q + l)];
}

}  // namespace

TransformRange transform_range(const WinogradPlan& plan, TransformSide side, int value_bits) {
  WINO2PC_ENFORCE(value_bits >= 1 && value_bits <= 40, ErrorCode::kInvalidWidths,
                  "transform_range: value bits out of range");
  const Sides s = sides(plan, side);
  const int64_t lo = signed_min(value_bits), hi = signed_max(value_bits);
  TransformRange r;
  for (int i = 0; i < s.p; ++i) {
    for (int j = 0; j < s.p; ++j) {
      int64_t mx = 0, mn = 0;
      for (int k = 0; k < s.q; ++k) {
        for (int l = 0; l < s.q; ++l) {
          const int64_t c = coef(s, i, j, k, l);
          mx += c > 0 ? c * hi : c * lo;
          mn += c > 0 ? c * lo : c * hi;
        }
      }
      r.max_value = std::max(r.max_value, mx);
      r.min_value = std::min(r.min_value, mn);
    }
  }
  return r;
}

TransformRange transform_range_exhaustive(const WinogradPlan& plan, TransformSide side,
                                          int value_bits) {
  const Sides s = sides(plan, side);
  WINO2PC_ENFORCE(s.q == 4, ErrorCode::kUnsupportedPlan,
                  "exhaustive search is limited to 4 x 4 tiles");
  const int64_t lo = signed_min(value_bits), hi = signed_max(value_bits);
  TransformRange r;
  int64_t x[16];
  for (uint32_t pattern = 0; pattern < (1u << 16); ++pattern) {
    for (int b = 0; b < 16; ++b) x[b] = (pattern >> b) & 1 ? hi : lo;
    for (int i = 0; i < s.p; ++i) {
      for (int j = 0; j < s.p; ++j) {
        int64_t v = 0;
        for (int k = 0; k < 4; ++k) {
          for (int l = 0; l < 4; ++l) v += coef(s, i, j, k, l) * x[k * 4 + l];
        }
        r.max_value = std::max(r.max_value, v);
        r.min_value = std::min(r.min_value, v);
      }
    }
  }
  return r;
}

std::vector<int64_t> transform_witness(const WinogradPlan& plan, TransformSide side,
                                       int value_bits) {
  const Sides s = sides(plan, side);
  const int64_t lo = signed_min(value_bits);
  int64_t best = -1;
  std::vector<int64_t> out;
  for (int i = 0; i < s.p; ++i) {
    for (int j = 0; j < s.p; ++j) {
      std::vector<int64_t> x(static_cast<size_t>(s.q * s.q));
      int64_t mag = 0;
      for (int k = 0; k < s.q; ++k) {
        for (int l = 0; l < s.q; ++l) {
          const int64_t c = coef(s, i, j, k, l);
          // Most negative input on positive coefficients: sum = lo * sum|c|.
          x[static_cast<size_t>(k * s.q + l)] = c > 0 ? lo : (c < 0 ? -lo - 1 : 0);
          mag += c > 0 ? c * -lo : -c * (-lo - 1);
        }
      }
      if (mag > best) {
        best = mag;
        out = std::move(x);
      }
    }
  }
  return out;
}

}  // namespace wino2pc::winograd
