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
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/quant/bsq.h"
#include "wino2pc/quant/finetune.h"
#include "wino2pc/quant/ilp.h"
#include "wino2pc/quant/outliers.h"
#include "wino2pc/quant/sensitivity.h"

namespace wino2pc::quant {
namespace {

using linear::BitImportance;

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

TEST(Zscore, Examples) {
  const std::vector<double> c{3, 3, 3, 3};
  EXPECT_EQ(code_of([&] { zscore(c); }), ErrorCode::kDegenerateStd);
  const std::vector<double> v{0, 0, 0, 10};
  EXPECT_NEAR(zscore(v), 7.5 / std::sqrt(18.75), 1e-12);
  EXPECT_NEAR(zscore(v), 1.732, 1e-3);
  EXPECT_FALSE(has_outliers(v));
  EXPECT_FALSE(has_outliers(v, std::numeric_limits<double>::infinity()));
  std::vector<double> spike(100, 0.0);
  spike[0] = 1.0;
  spike[1] = -1.0;
  spike[50] = 12.0;
  EXPECT_GT(zscore(spike), 6.0);
  EXPECT_TRUE(has_outliers(spike));
}

TEST(Zscore, GaussianSample) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<double> v(100000);
  for (auto& x : v) x = g(rng);
  EXPECT_NEAR(zscore(v), 4.0, 0.5);
}

TEST(Reweight, Examples) {
  EXPECT_EQ(reweight_bits(4).weights(), (std::vector<int64_t>{16, 4, 2, 1}));
  EXPECT_EQ(reweight_bits(2).weights(), (std::vector<int64_t>{4, 1}));
}

TEST(Reweight, PreservesCountAndGrowsRange) {
  for (int lw = 1; lw <= 8; ++lw) {
    const auto s = BitImportance::standard(lw), r = reweight_bits(lw);
    EXPECT_EQ(r.bits(), lw);
    std::set<int64_t> values;
    for (uint32_t code = 0; code < (1u << lw); ++code) {
      int64_t v = 0;
      for (int i = 0; i < lw; ++i) {
        if ((code >> (lw - 1 - i)) & 1) v += i == 0 ? -r.weights()[0] : r.weights()[static_cast<size_t>(i)];
      }
      values.insert(v);
    }
    EXPECT_EQ(values.size(), size_t{1} << lw) << lw;
    EXPECT_GT(r.sum(), s.sum()) << lw;
    EXPECT_GT(r.max_abs(), s.max_abs()) << lw;
  }
}

TEST(Reweight, NeverWorseOnDominantOutlier) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const int lw = 2 + trial % 5;
    std::vector<double> w(64);
    for (auto& x : w) x = g(rng);
    // one outlier beyond the default range at scale 0
    const double mag = std::ldexp(1.0, lw - 1) + 1.0 + (trial % 7);
    w[static_cast<size_t>(trial % 64)] = trial % 2 ? mag * 1.5 : -mag * 1.5;
    if (!has_outliers(w)) continue;
    const double e_std = max_magnitude_clip_error(w, BitImportance::standard(lw), 0);
    const double e_rw = max_magnitude_clip_error(w, reweight_bits(lw), 0);
    EXPECT_LE(e_rw, e_std) << trial;
  }
}

TEST(Bsq, ForwardExamples) {
  const std::vector<double> b11{1, 1};
  EXPECT_DOUBLE_EQ(bsq_forward(b11, BitImportance::standard(2), 3.0, 2), 3.0);
  const std::vector<double> zero{0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(bsq_forward(zero, reweight_bits(4), 15.0, 4), 0.0);
  const std::vector<double> b1011{1, 0, 1, 1};
  EXPECT_DOUBLE_EQ(bsq_forward(b1011, reweight_bits(4), 15.0, 4), 19.0);
  // signed head
  EXPECT_DOUBLE_EQ(bsq_forward(b1011, reweight_bits(4), 15.0, 4, {.twos_complement = true}),
                   -13.0);
  const std::vector<double> bad{1.5, 0};
  EXPECT_EQ(code_of([&] { bsq_forward(bad, BitImportance::standard(2), 1.0, 2); }),
            ErrorCode::kInvalidParams);
}

TEST(Bsq, BackwardExamples) {
  EXPECT_DOUBLE_EQ(bsq_backward(1.0, 0, 2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(bsq_backward(0.0, 1, 2), 0.0);
  for (int lw = 1; lw <= 8; ++lw) {
    for (int b = 0; b < lw; ++b) {
      EXPECT_DOUBLE_EQ(bsq_backward(0.7, b, lw),
                       bsq_backward(0.7, b, BitImportance::standard(lw), 1.0, lw));
    }
  }
}

TEST(Bsq, BackwardMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95), sd(0.1, 20.0), up(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int lw = 1 + trial % 8;
    const bool rw = trial % 2 == 1 && lw >= 2;
    const bool tc = trial % 3 == 0;
    const auto imp = rw ? reweight_bits(lw) : BitImportance::standard(lw);
    const double s = sd(rng), g = up(rng);
    std::vector<double> bits(static_cast<size_t>(lw));
    for (auto& b : bits) b = u(rng);
    const BsqOptions opt{.round = false, .twos_complement = tc};
    const int pos = static_cast<int>(rng() % static_cast<uint64_t>(lw));
    const size_t idx = static_cast<size_t>(lw - 1 - pos);
    const double h = 1e-4;
    auto plus = bits, minus = bits;
    plus[idx] += h;
    minus[idx] -= h;
    const double fd =
        g * (bsq_forward(plus, imp, s, lw, opt) - bsq_forward(minus, imp, s, lw, opt)) / (2 * h);
    const double an = bsq_backward(g, pos, imp, s, lw, opt);
    EXPECT_NEAR(fd, an, 1e-6 * std::max(1.0, std::abs(an))) << trial;
  }
}

TEST(Hessian, QuadraticLinearScaling) {
  const LayerParams at{{0.3, -1.2, 2.0, 0.5, 0.1, -0.4, 0.9, 1.1}, {1.0, 2.0}};
  auto quad = [](const LayerParams& p) {
    double s = 0;
    for (const auto& l : p) {
      for (double v : l) s += 0.5 * v * v;
    }
    return s;
  };
  EXPECT_NEAR(hessian_sensitivity(quad, at, 0, {.probes = 100}), 1.0, 0.05);
  auto lin = [](const LayerParams& p) { return 3.0 * p[0][0] - 2.0 * p[0][3] + p[1][1]; };
  EXPECT_NEAR(hessian_sensitivity(lin, at, 0, {.probes = 100}), 0.0, 0.05);
  auto quart = [](const LayerParams& p) {
    double s = 0;
    for (double v : p[0]) s += v * v * v * v / 12.0 + 0.25 * v * v;
    return s;
  };
  const double base = hessian_sensitivity(quart, at, 0, {.probes = 50, .seed = 9});
  auto scaled = [&](const LayerParams& p) { return 4.0 * quart(p); };
  EXPECT_NEAR(hessian_sensitivity(scaled, at, 0, {.probes = 50, .seed = 9}), 4.0 * base,
              1e-6 * base);
  auto bad = [](const LayerParams& p) { return p[0][0] > 0.3 ? std::nan("") : 0.0; };
  EXPECT_EQ(code_of([&] { hessian_sensitivity(bad, at, 0); }), ErrorCode::kNonFiniteLoss);
}

TEST(Sensitivity, WinogradLayerTableIsMonotone) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    ConvLayerShape shape{.n = 1, .c = 3, .k = 4, .h = 8, .w = 8, .in_bits = 6, .m = 2};
    std::vector<double> kernel(static_cast<size_t>(shape.k * shape.c * 9));
    for (auto& v : kernel) v = g(rng);
    if (trial % 2) kernel[0] = 8.0;
    const auto t = winograd_layer_sensitivity("conv", kernel, shape, 0.5);
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(t.bits, default_candidate_bits());
  }
}

TEST(Sensitivity, JsonRoundTrip) {
  const std::vector<LayerSensitivity> table{{"a", {2, 4}, {5.0, 1.0}, {10, 20}},
                                            {"b", {2, 3, 4}, {3.0, 2.0, 0.5}, {7, 8, 30}}};
  const auto j = sensitivity_to_json(table);
  ASSERT_EQ(j.size(), 5u);
  EXPECT_EQ(j[0]["layer"], "a");
  EXPECT_EQ(j[0]["comm_bits"], 10);
  const auto back = sensitivity_from_json(j);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].bits, table[1].bits);
  EXPECT_EQ(back[1].comm, table[1].comm);
  nlohmann::json bad = nlohmann::json::array({{{"layer", "a"}, {"bits", 2}, {"omega", 1.0}, {"comm_bits", 10}},
                                              {{"layer", "a"}, {"bits", 4}, {"omega", 2.0}, {"comm_bits", 20}}});
  EXPECT_EQ(code_of([&] { sensitivity_from_json(bad); }), ErrorCode::kInvalidParams);
}

TEST(Ilp, Examples) {
  const std::vector<LayerSensitivity> one{{"l", {2, 4}, {5.0, 1.0}, {10, 20}}};
  EXPECT_EQ(assign_bits_ilp(one, 20).bits, (std::vector<int>{4}));
  EXPECT_EQ(assign_bits_ilp(one, 15).bits, (std::vector<int>{2}));
  EXPECT_EQ(code_of([&] { assign_bits_ilp(one, 9); }), ErrorCode::kInfeasible);
  // tie on omega: lower comm wins, then smaller widths
  const std::vector<LayerSensitivity> tie{{"a", {2, 4}, {1.0, 1.0}, {10, 10}},
                                          {"b", {2, 4}, {1.0, 1.0}, {5, 9}}};
  const auto t = assign_bits_ilp(tie, 100);
  EXPECT_EQ(t.bits, (std::vector<int>{2, 2}));
  EXPECT_EQ(t.comm, 15u);
}

std::vector<LayerSensitivity> random_table(std::mt19937_64& rng, int layers, int options) {
  std::vector<LayerSensitivity> t;
  for (int l = 0; l < layers; ++l) {
    LayerSensitivity s{"L" + std::to_string(l), {}, {}, {}};
    double om = 50.0 + static_cast<double>(rng() % 50);
    uint64_t c = 5 + rng() % 20;
    int b = 2;
    for (int o = 0; o < options; ++o) {
      s.bits.push_back(b);
      s.omega.push_back(om);
      s.comm.push_back(c);
      b += 1 + static_cast<int>(rng() % 2);
      om -= static_cast<double>(rng() % 20);  // ties allowed
      c += rng() % 15;
    }
    t.push_back(std::move(s));
  }
  return t;
}

TEST(Ilp, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int layers = trial < 100 ? 6 : 1 + trial % 8;
    const int options = trial < 100 ? 3 : 2 + trial % 4;
    const auto t = random_table(rng, layers, options);
    uint64_t lo = 0, hi = 0;
    for (const auto& l : t) {
      lo += l.comm.front();
      hi += l.comm.back();
    }
    const uint64_t zeta = lo + rng() % (hi - lo + 1);
    const auto dp = assign_bits_ilp(t, zeta);
    const auto bf = assign_bits_exhaustive(t, zeta);
    EXPECT_EQ(dp.bits, bf.bits) << trial;
    EXPECT_EQ(dp.omega, bf.omega) << trial;
    EXPECT_EQ(dp.comm, bf.comm) << trial;
    EXPECT_LE(dp.comm, zeta);
  }
}

TEST(Finetune, ReachesAccuracyAndLossDrops) {
  const auto data = make_blobs(200, 7);
  EXPECT_EQ(float_oracle_accuracy(data), 1.0);
  const auto r = finetune_toy({.lw = 4, .epochs = 50});
  EXPECT_GE(r.accuracy, 0.95);
  ASSERT_EQ(r.losses.size(), 51u);
  auto avg = [&](size_t from) {
    double s = 0;
    for (size_t i = from; i < from + 5; ++i) s += r.losses[i];
    return s / 5;
  };
  EXPECT_LE(avg(46), avg(0));
  EXPECT_LE(r.losses.back(), r.losses.front());
  for (const auto& bits : r.relaxed_bits) {
    for (double b : bits) EXPECT_TRUE(b >= 0.0 && b <= 1.0);
  }
  const auto j = r.to_model_json();
  EXPECT_EQ(j["layers"][1]["bit_importance"], (std::vector<int64_t>{8, 4, 2, 1}));
  EXPECT_EQ(j["layers"][1]["weight_values"].size(), 2u);
}

TEST(Finetune, ReweightedAlsoTrains) {
  const auto r = finetune_toy({.lw = 4, .epochs = 50, .reweight = true});
  EXPECT_GE(r.accuracy, 0.95);
}

TEST(Finetune, ZeroEpochsLeavesWeights) {
  const auto a = finetune_toy({.epochs = 0});
  const auto b = finetune_toy({.epochs = 50});
  ASSERT_EQ(a.losses.size(), 1u);
  EXPECT_EQ(a.bias, 0.0);
  EXPECT_EQ(a.losses[0], b.losses[0]);
  const auto c = finetune_toy({.epochs = 0});
  EXPECT_EQ(a.relaxed_bits, c.relaxed_bits);
  for (const auto& bits : a.relaxed_bits) {
    for (double x : bits) EXPECT_TRUE(x >= 0.25 && x <= 0.75);
  }
}

}  // namespace
}  // namespace wino2pc::quant
