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

#include "wino2pc/linear/qwinconv.h"

#include <cmath>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/proto/conversions.h"

namespace wino2pc::linear {
namespace {

using winograd::TileGrid;
using winograd::WinogradPlan;

Share make_share(const Share& like, Shape shape, std::vector<RingElem> values, int bits,
                 int scale_exp) {
  Share s;
  s.owner = like.owner;
  s.shape = std::move(shape);
  s.values = std::move(values);
  s.params.bits = bits;
  s.params.scale_exp = scale_exp;
  return s;
}

// Restores the caller's ledger label on scope exit.
class LabelGuard {
 public:
  explicit LabelGuard(Party& p) : p_(p), saved_(p.label()) {}
  ~LabelGuard() { p_.set_label(saved_); }
  void set(const std::string& block) {
    p_.set_label(saved_.empty() ? block : saved_ + "/" + block);
  }

 private:
  Party& p_;
  std::string saved_;
};

void check_input(const Shape& s, int64_t c) {
  WINO2PC_ENFORCE(s.size() == 4 && s[1] == c, ErrorCode::kShapeMismatch,
                  fmt::format("convolution input {} does not have {} channels", shape_str(s), c));
}

// Block 1 on shares: baseline uses a faithful Trunc, fused uses TR.
Share requant_block(Party& p, const Share& x, const QuantParams& to, bool fused) {
  const int d = x.params.scale_exp - to.scale_exp;
  if (fused || d <= 0) {
    Share cur = x;
    if (fused && d > 0) {
      cur = proto::truncate_reduce(p, cur, d);
      if (cur.bits() > to.bits) cur = proto::narrow(cur, to.bits);
      return cur;
    }
    return proto::requant(p, cur, to);
  }
  Share cur = proto::trunc(p, x, d);
  if (to.bits < cur.bits()) cur = proto::narrow(cur, to.bits);
  if (to.bits > cur.bits()) cur = proto::ext(p, cur, to.bits);
  return cur;
}

}  // namespace

std::vector<GemmWeights> WinogradWeights::per_position() const {
  const int aa = plan().positions();
  std::vector<GemmWeights> out;
  out.reserve(static_cast<size_t>(aa));
  std::vector<int64_t> mat(static_cast<size_t>(k * c));
  for (int xi = 0; xi < aa; ++xi) {
    for (int64_t i = 0; i < k * c; ++i) mat[static_cast<size_t>(i)] = values[static_cast<size_t>(i * aa + xi)];
    out.push_back(GemmWeights::from_values(mat, k, c, importance));
  }
  return out;
}

std::vector<GemmWeights> WinogradWeights::public_per_position() const {
  const int aa = plan().positions();
  return std::vector<GemmWeights>(static_cast<size_t>(aa), GemmWeights{k, c, importance, {}});
}

WinogradWeights quantize_winograd_weights(const QTensor& w, int m,
                                          const BitImportance& importance, int scale_exp) {
  const auto plan = winograd::winograd_matrices(m, 3);
  const auto t = winograd::weight_transform(w, plan);
  WinogradWeights out;
  out.k = w.shape()[0];
  out.c = w.shape()[1];
  out.m = m;
  out.importance = importance;
  out.scale_exp = scale_exp;
  out.values.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    const double v = std::ldexp(boost::rational_cast<double>(t[i]), scale_exp);
    out.values[i] = importance.nearest(v);
  }
  return out;
}

GemmWeights DirectWeights::as_gemm() const {
  return GemmWeights::from_values(values, k, c * r * r, importance);
}

DirectWeights quantize_direct_weights(const QTensor& w, const BitImportance& importance,
                                      int scale_exp) {
  const auto& s = w.shape();
  WINO2PC_ENFORCE(s.size() == 4 && s[2] == s[3], ErrorCode::kShapeMismatch,
                  "direct weights must be K x C x r x r");
  DirectWeights out;
  out.k = s[0];
  out.c = s[1];
  out.r = static_cast<int>(s[2]);
  out.importance = importance;
  out.scale_exp = scale_exp;
  out.values.resize(static_cast<size_t>(w.numel()));
  for (int64_t i = 0; i < w.numel(); ++i) {
    out.values[static_cast<size_t>(i)] =
        importance.nearest(std::ldexp(static_cast<double>(w[i]), scale_exp - w.params().scale_exp));
  }
  return out;
}

QWinConvWidths qwinconv_widths(int in_bits, int64_t c, const BitImportance& importance,
                               const WinogradPlan& plan) {
  QWinConvWidths wd;
  wd.in_bits = in_bits;
  wd.ft_bits = in_bits + plan.ft_ext_bits;
  wd.acc_bits = gemm_accumulator_bits(wd.ft_bits, c, importance);
  wd.out_bits = wd.acc_bits + plan.out_ext_bits;
  WINO2PC_ENFORCE(wd.out_bits <= kMaxRingBits, ErrorCode::kOverflowRisk,
                  fmt::format("QWinConv needs a {}-bit ring", wd.out_bits));
  return wd;
}

Share qwinconv(Party& p, const Share& x, const WinogradWeights& w, const QWinConvOptions& opt) {
  check_input(x.shape, w.c);
  LabelGuard label(p);
  Share cur = x;
  if (opt.requant_to) {
    label.set("block1");
    cur = requant_block(p, cur, *opt.requant_to, opt.fused);
  }
  const WinogradPlan plan = w.plan();
  const int in_bits = opt.requant_to ? opt.requant_to->bits : cur.bits();
  const QWinConvWidths wd = qwinconv_widths(in_bits, w.c, w.importance, plan);
  const TileGrid grid = TileGrid::make(cur.shape[0], w.c, cur.shape[2], cur.shape[3], opt.pad, plan);
  const int64_t nt = grid.tiles();
  const int64_t aa = plan.positions();
  const int e = cur.params.scale_exp;

  // Fused: the single extension belongs to block 1 when there is one.
  label.set(opt.fused && opt.requant_to ? "block1" : "block2");
  const int ft_ring = opt.fused ? wd.out_bits : wd.ft_bits;
  cur = proto::ext(p, cur, ft_ring);
  auto tiles = winograd::tile_partition<RingElem>(cur.values, grid);
  auto u = winograd::feature_transform(tiles, w.c, nt, plan, ft_ring, in_bits);

  int ring = ft_ring;
  if (!opt.fused) {
    label.set("block3");
    Share us = proto::ext(p, make_share(cur, {aa, w.c, nt}, std::move(u), ring, e), wd.acc_bits);
    u = std::move(us.values);
    ring = wd.acc_bits;
  }

  label.set("block4");
  const auto weights = p.is_server() ? w.per_position() : w.public_per_position();
  auto mres = ot_gemm_batched(p, weights, u, nt, ring, wd.ft_bits);

  if (!opt.fused) {
    label.set("block5");
    Share ms = proto::ext(p, make_share(cur, {aa, w.k, nt}, std::move(mres), ring, e),
                          wd.out_bits);
    mres = std::move(ms.values);
    ring = wd.out_bits;
  }
  auto out_tiles = winograd::output_transform(mres, w.k, nt, plan, ring, wd.acc_bits);
  auto y = winograd::tile_merge<RingElem>(out_tiles, grid, w.k);
  return make_share(cur, {grid.n, w.k, grid.out_h, grid.out_w}, std::move(y), ring,
                    e + w.scale_exp);
}

QTensor qwinconv_plain(const QTensor& x, const WinogradWeights& w, const QWinConvOptions& opt) {
  check_input(x.shape(), w.c);
  QTensor cur = opt.requant_to ? proto::requant_plain(x, *opt.requant_to) : x;
  const WinogradPlan plan = w.plan();
  const QWinConvWidths wd = qwinconv_widths(cur.params().bits, w.c, w.importance, plan);
  const auto& s = cur.shape();
  const TileGrid grid = TileGrid::make(s[0], w.c, s[2], s[3], opt.pad, plan);
  const int64_t nt = grid.tiles();
  const int a = plan.alpha;
  const int64_t aa = a * a;
  const int mm = plan.m * plan.m;

  const auto tiles = winograd::tile_partition<int64_t>(cur.data(), grid);
  // U[c][t][xi] = (B^T X B)[xi]
  std::vector<int64_t> u(tiles.size());
  std::vector<int64_t> tmp(static_cast<size_t>(aa));
  for (int64_t i = 0; i < w.c * nt; ++i) {
    const int64_t* src = tiles.data() + i * aa;
    for (int r = 0; r < a; ++r) {
      for (int q = 0; q < a; ++q) {
        int64_t acc = 0;
        for (int k = 0; k < a; ++k) acc += plan.bt_int[static_cast<size_t>(r * a + k)] * src[k * a + q];
        tmp[static_cast<size_t>(r * a + q)] = acc;
      }
    }
    for (int r = 0; r < a; ++r) {
      for (int q = 0; q < a; ++q) {
        int64_t acc = 0;
        for (int k = 0; k < a; ++k) acc += tmp[static_cast<size_t>(r * a + k)] * plan.bt_int[static_cast<size_t>(q * a + k)];
        u[static_cast<size_t>(i * aa + r * a + q)] = acc;
      }
    }
  }
  std::vector<int64_t> out_tiles(static_cast<size_t>(w.k * nt * mm));
  std::vector<int64_t> mt(static_cast<size_t>(aa)), t2(static_cast<size_t>(plan.m * a));
  for (int64_t k = 0; k < w.k; ++k) {
    for (int64_t t = 0; t < nt; ++t) {
      std::fill(mt.begin(), mt.end(), 0);
      for (int64_t c = 0; c < w.c; ++c) {
        const int64_t* wv = w.values.data() + (k * w.c + c) * aa;
        const int64_t* uv = u.data() + (c * nt + t) * aa;
        for (int64_t xi = 0; xi < aa; ++xi) mt[static_cast<size_t>(xi)] += wv[xi] * uv[xi];
      }
      for (int r = 0; r < plan.m; ++r) {
        for (int q = 0; q < a; ++q) {
          int64_t acc = 0;
          for (int kk = 0; kk < a; ++kk) acc += plan.at_int[static_cast<size_t>(r * a + kk)] * mt[static_cast<size_t>(kk * a + q)];
          t2[static_cast<size_t>(r * a + q)] = acc;
        }
      }
      int64_t* dst = out_tiles.data() + (k * nt + t) * mm;
      for (int r = 0; r < plan.m; ++r) {
        for (int q = 0; q < plan.m; ++q) {
          int64_t acc = 0;
          for (int kk = 0; kk < a; ++kk) acc += t2[static_cast<size_t>(r * a + kk)] * plan.at_int[static_cast<size_t>(q * a + kk)];
          dst[r * plan.m + q] = acc;
        }
      }
    }
  }
  auto y = winograd::tile_merge<int64_t>(out_tiles, grid, w.k);
  QuantParams op;
  op.bits = wd.out_bits;
  op.scale_exp = cur.params().scale_exp + w.scale_exp;
  return QTensor({grid.n, w.k, grid.out_h, grid.out_w}, std::move(y), op);
}

int direct_conv_acc_bits(int value_bits, const DirectWeights& w) {
  return gemm_accumulator_bits(value_bits, w.c * w.r * w.r, w.importance);
}

Share direct_conv_2pc(Party& p, const Share& x, const DirectWeights& w, int stride, int pad,
                      int value_bits) {
  check_input(x.shape, w.c);
  winograd::ConvShape s{x.shape[0], w.c, x.shape[2], x.shape[3], w.k, w.r, stride, pad};
  s.validate();
  auto cols = im2col<RingElem>(x.values, s);
  const int64_t n = s.n * s.out_h() * s.out_w();
  GemmWeights gw = p.is_server() ? w.as_gemm() : GemmWeights{w.k, w.c * w.r * w.r, w.importance, {}};
  auto y = ot_gemm_batched(p, std::span<const GemmWeights>(&gw, 1), cols, n, x.bits(), value_bits);
  return make_share(x, {s.n, w.k, s.out_h(), s.out_w()}, col2out<RingElem>(y, w.k, s), x.bits(),
                    x.params.scale_exp + w.scale_exp);
}

}  // namespace wino2pc::linear
