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

#include "wino2pc/winograd/plan.h"

#include <cmath>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"

namespace wino2pc::winograd {

RMatrix RMatrix::transpose() const {
  RMatrix t{cols, rows, std::vector<Rational>(v.size())};
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) t.v[static_cast<size_t>(j * rows + i)] = at(i, j);
  }
  return t;
}

bool RMatrix::is_integral() const {
  for (const auto& x : v) {
    if (x.denominator() != 1) return false;
  }
  return true;
}

std::vector<int64_t> RMatrix::to_int() const {
  WINO2PC_ENFORCE(is_integral(), ErrorCode::kInvalidParams, "matrix has fractional entries");
  std::vector<int64_t> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].numerator();
  return out;
}

std::vector<double> RMatrix::to_double() const {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = boost::rational_cast<double>(v[i]);
  return out;
}

RMatrix make_matrix(int rows, int cols, std::initializer_list<Rational> values) {
  WINO2PC_ENFORCE(static_cast<int>(values.size()) == rows * cols, ErrorCode::kInvalidParams,
                  "matrix literal size");
  return RMatrix{rows, cols, std::vector<Rational>(values)};
}

namespace {

Rational q(int64_t n, int64_t d = 1) { return Rational(n, d); }

}  // namespace

int ext_bits_for_transform(const RMatrix& M) {
  WINO2PC_ENFORCE(M.rows > 0 && M.cols > 0, ErrorCode::kInvalidParams, "empty matrix");
  Rational best(0);
  for (int j = 0; j < M.cols; ++j) {
    Rational norm(0);
    for (int i = 0; i < M.rows; ++i) norm += abs(M.at(i, j));
    if (norm > best) best = norm;
  }
  WINO2PC_ENFORCE(best > 0, ErrorCode::kInvalidParams, "zero matrix");
  // Norms below 1 map to 0.
  int k = 0;
  while (Rational(int64_t{1} << k) < best) ++k;
  return k;
}

WinogradPlan winograd_matrices(int m, int r) {
  WinogradPlan p;
  p.m = m;
  p.r = r;
  p.alpha = m + r - 1;
  if (m == 2 && r == 3) {
    const RMatrix bt = make_matrix(4, 4, {q(1), q(0), q(-1), q(0),   //
                                          q(0), q(1), q(1), q(0),    //
                                          q(0), q(-1), q(1), q(0),   //
                                          q(0), q(1), q(0), q(-1)});
    p.G = make_matrix(4, 3, {q(1), q(0), q(0),            //
                             q(1, 2), q(1, 2), q(1, 2),   //
                             q(1, 2), q(-1, 2), q(1, 2),  //
                             q(0), q(0), q(1)});
    const RMatrix at = make_matrix(2, 4, {q(1), q(1), q(1), q(0),  //
                                          q(0), q(1), q(-1), q(-1)});
    p.B = bt.transpose();
    p.A = at.transpose();
  } else if (m == 4 && r == 3) {
    const RMatrix bt = make_matrix(6, 6, {q(4), q(0), q(-5), q(0), q(1), q(0),    //
                                          q(0), q(-4), q(-4), q(1), q(1), q(0),   //
                                          q(0), q(4), q(-4), q(-1), q(1), q(0),   //
                                          q(0), q(-2), q(-1), q(2), q(1), q(0),   //
                                          q(0), q(2), q(-1), q(-2), q(1), q(0),   //
                                          q(0), q(4), q(0), q(-5), q(0), q(1)});
    p.G = make_matrix(6, 3, {q(1, 4), q(0), q(0),                //
                             q(-1, 6), q(-1, 6), q(-1, 6),       //
                             q(-1, 6), q(1, 6), q(-1, 6),        //
                             q(1, 24), q(1, 12), q(1, 6),        //
                             q(1, 24), q(-1, 12), q(1, 6),       //
                             q(0), q(0), q(1)});
    const RMatrix at = make_matrix(4, 6, {q(1), q(1), q(1), q(1), q(1), q(0),     //
                                          q(0), q(1), q(-1), q(2), q(-2), q(0),   //
                                          q(0), q(1), q(1), q(4), q(4), q(0),     //
                                          q(0), q(1), q(-1), q(8), q(-8), q(1)});
    p.B = bt.transpose();
    p.A = at.transpose();
  } else {
    fail(ErrorCode::kUnsupportedPlan, fmt::format("F({},{}) is not supported", m, r));
  }
  p.at_int = p.A.transpose().to_int();
  p.bt_int = p.B.transpose().to_int();
  p.ft_ext_bits = 2 * ext_bits_for_transform(p.B);
  p.out_ext_bits = 2 * ext_bits_for_transform(p.A);
  p.mults_per_tile = p.alpha * p.alpha;
  return p;
}

namespace {

// out = G w G^T for one r x r kernel.
template <typename T, typename GetG>
void sandwich(const T* w, T* out, int alpha, int r, GetG g) {
  std::vector<T> tmp(static_cast<size_t>(alpha * r), T(0));
  for (int i = 0; i < alpha; ++i) {
    for (int j = 0; j < r; ++j) {
      T acc(0);
      for (int k = 0; k < r; ++k) acc += g(i, k) * w[k * r + j];
      tmp[static_cast<size_t>(i * r + j)] = acc;
    }
  }
  for (int i = 0; i < alpha; ++i) {
    for (int j = 0; j < alpha; ++j) {
      T acc(0);
      for (int k = 0; k < r; ++k) acc += tmp[static_cast<size_t>(i * r + k)] * g(j, k);
      out[i * alpha + j] = acc;
    }
  }
}

}  // namespace

std::vector<Rational> weight_transform(const QTensor& w, const WinogradPlan& plan) {
  const auto& s = w.shape();
  WINO2PC_ENFORCE(s.size() == 4 && s[2] == plan.r && s[3] == plan.r, ErrorCode::kShapeMismatch,
                  "weight_transform expects K x C x r x r, got " + shape_str(s));
  const int e = w.params().scale_exp;
  const Rational scale = e >= 0 ? Rational(1, int64_t{1} << e) : Rational(int64_t{1} << -e);
  const int64_t kc = s[0] * s[1];
  const int rr = plan.r * plan.r;
  const int aa = plan.positions();
  std::vector<Rational> out(static_cast<size_t>(kc * aa));
  std::vector<Rational> kernel(static_cast<size_t>(rr));
  for (int64_t t = 0; t < kc; ++t) {
    for (int i = 0; i < rr; ++i) kernel[static_cast<size_t>(i)] = Rational(w[t * rr + i]) * scale;
    sandwich(kernel.data(), out.data() + t * aa, plan.alpha, plan.r,
             [&](int i, int k) { return plan.G.at(i, k); });
  }
  return out;
}

std::vector<double> weight_transform(std::span<const double> w, int64_t k, int64_t c,
                                     const WinogradPlan& plan) {
  const int rr = plan.r * plan.r;
  const int aa = plan.positions();
  WINO2PC_ENFORCE(static_cast<int64_t>(w.size()) == k * c * rr, ErrorCode::kShapeMismatch,
                  "weight_transform: size mismatch");
  const auto g = plan.G.to_double();
  std::vector<double> out(static_cast<size_t>(k * c * aa));
  for (int64_t t = 0; t < k * c; ++t) {
    sandwich(w.data() + t * rr, out.data() + t * aa, plan.alpha, plan.r,
             [&](int i, int kk) { return g[static_cast<size_t>(i * plan.r + kk)]; });
  }
  return out;
}

}  // namespace wino2pc::winograd
