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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "gtest/gtest.h"
#include "wino2pc/core/errors.h"
#include "wino2pc/core/qtensor.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/core/tensor_io.h"

namespace wino2pc {
namespace {

QuantParams make_params(int bits, int e, bool is_signed = true) {
  QuantParams p;
  p.bits = bits;
  p.scale_exp = e;
  p.is_signed = is_signed;
  return p;
}

TEST(QuantizeTest, Examples) {
  std::vector<double> v = {0.0, 1.75, 100.0, -100.0};
  auto q = quantize(std::span<const double>(v.data(), 2), {2}, make_params(4, 2));
  EXPECT_EQ(q[0], 0);
  EXPECT_EQ(q[1], 7);
  auto c = quantize(std::span<const double>(v.data() + 2, 2), {2}, make_params(4, 0));
  EXPECT_EQ(c[0], 7);
  EXPECT_EQ(c[1], -8);
}

TEST(QuantizeTest, TiesRoundAwayFromZero) {
  std::vector<double> v = {0.5, -0.5, 1.5, -2.5};
  auto q = quantize(v, {4}, make_params(8, 0));
  EXPECT_EQ(q.data(), (std::vector<int64_t>{1, -1, 2, -3}));
}

TEST(QuantizeTest, MsbKnownClampsAtZero) {
  QuantParams p = make_params(6, 0);
  p.msb_known_nonneg = true;
  std::vector<double> v = {-3.0, 4.0};
  auto q = quantize(v, {2}, p);
  EXPECT_EQ(q.data(), (std::vector<int64_t>{0, 4}));
}

TEST(DequantizeTest, Examples) {
  QTensor t({3}, {7, 0, -8}, make_params(4, 2));
  auto d = dequantize(t);
  EXPECT_DOUBLE_EQ(d[0], 1.75);
  EXPECT_DOUBLE_EQ(d[1], 0.0);
  QTensor m({1}, {-8}, make_params(4, 0));
  EXPECT_DOUBLE_EQ(dequantize(m)[0], -8.0);
}

TEST(QuantParamsTest, Validation) {
  EXPECT_THROW(make_params(0, 0).validate(), Error);
  EXPECT_THROW(make_params(65, 0).validate(), Error);
  EXPECT_NO_THROW(make_params(64, 0).validate());
  EXPECT_EQ(make_params(4, 0).min_value(), -8);
  EXPECT_EQ(make_params(4, 0).max_value(), 7);
  EXPECT_EQ(make_params(4, 0, false).max_value(), 15);
}

TEST(QTensorTest, RejectsOutOfRange) {
  EXPECT_THROW(QTensor({1}, {8}, make_params(4, 0)), Error);
  QuantParams p = make_params(4, 0);
  p.msb_known_nonneg = true;
  EXPECT_THROW(QTensor({1}, {-1}, p), Error);
  EXPECT_THROW(QTensor({2}, {1}, make_params(4, 0)), Error);
}

TEST(RingTest, ReduceExamples) {
  EXPECT_EQ(ring_reduce(9, 4), -7);
  EXPECT_EQ(ring_reduce(-1, 4), -1);
  EXPECT_EQ(ring_reduce(16, 4), 0);
  EXPECT_EQ(ring_reduce(static_cast<__int128>(1) << 70, 64), 0);
  EXPECT_EQ(ring_reduce(static_cast<__int128>(-1), 64), -1);
}

TEST(RingTest, CeilLog2) {
  EXPECT_EQ(ceil_log2(0), 0);
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(10), 4);
  EXPECT_EQ(ceil_log2(uint64_t{1} << 63), 63);
}

TEST(RingProperty, ReduceIsIdempotent) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const int bits = 1 + static_cast<int>(rng() % 64);
    const auto x = static_cast<int64_t>(rng());
    const int64_t r = ring_reduce(x, bits);
    EXPECT_EQ(ring_reduce(r, bits), r);
    EXPECT_TRUE(fits_signed(r, bits));
  }
}

TEST(QuantizeProperty, RoundTripWithinHalfStep) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> bits_dist(2, 16);
  std::uniform_int_distribution<int> exp_dist(-4, 8);
  for (int i = 0; i < 1000; ++i) {
    QuantParams p = make_params(bits_dist(rng), exp_dist(rng));
    const double lo = std::ldexp(static_cast<double>(p.min_value()), -p.scale_exp);
    const double hi = std::ldexp(static_cast<double>(p.max_value()), -p.scale_exp);
    std::uniform_real_distribution<double> in(lo, hi);
    std::vector<double> v(8);
    for (auto& x : v) x = in(rng);
    auto q = quantize(v, {8}, p);
    auto d = dequantize(q);
    for (size_t k = 0; k < v.size(); ++k) {
      EXPECT_LE(std::fabs(d[k] - v[k]), std::ldexp(1.0, -p.scale_exp - 1) + 1e-12);
    }
  }
}

TEST(QuantizeProperty, OutputAlwaysValid) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> wide(0.0, 1e6);
  for (int i = 0; i < 500; ++i) {
    QuantParams p = make_params(1 + static_cast<int>(rng() % 63), static_cast<int>(rng() % 9) - 4);
    p.msb_known_nonneg = (i % 3 == 0);
    std::vector<double> v(16);
    for (auto& x : v) x = wide(rng);
    EXPECT_NO_THROW(quantize(v, {4, 4}, p).validate());
  }
}

TEST(TensorIoTest, RoundTrip) {
  QuantParams p = make_params(12, -3);
  p.msb_known_nonneg = true;
  QTensor t({2, 3}, {0, 1, 2, 2047, 5, 9}, p);
  auto bytes = encode_qtensor(t);
  EXPECT_EQ(bytes[0], 'Q');
  EXPECT_EQ(decode_qtensor(bytes), t);

  const auto path = std::filesystem::temp_directory_path() / "wino2pc_core_io.qtsr";
  save_qtensor(path.string(), t);
  EXPECT_EQ(load_qtensor(path.string()), t);
  std::filesystem::remove(path);
}

TEST(TensorIoTest, RejectsCorruptInput) {
  QTensor t({2}, {1, -1}, make_params(4, 0));
  auto bytes = encode_qtensor(t);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_qtensor(bad_magic), Error);
  bytes.pop_back();
  EXPECT_THROW(decode_qtensor(bytes), Error);
  EXPECT_THROW(load_qtensor("/nonexistent/file.qtsr"), Error);
}

}  // namespace
}  // namespace wino2pc
