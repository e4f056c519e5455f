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

#include "wino2pc/graph/random_graph.h"

#include <optional>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"
#include "wino2pc/linear/gemm.h"

namespace wino2pc::graph {
namespace {

class Gen {
 public:
  explicit Gen(std::mt19937_64& rng) : rng_(rng) {}
  int64_t ri(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64& rng_;
};

linear::BitImportance random_importance(Gen& r) {
  const int lw = static_cast<int>(r.ri(1, 4));
  return r.coin(0.3) ? linear::BitImportance::reweighted(lw) : linear::BitImportance::standard(lw);
}

std::optional<QuantParams> random_requant(Gen& r, const ValueType& t) {
  if (r.coin(0.3)) return std::nullopt;
  QuantParams to;
  to.bits = static_cast<int>(r.ri(3, 7));
  const int d = static_cast<int>(r.ri(-1, std::min(6, t.bits - 1)));
  to.scale_exp = t.scale_exp - d;
  if (d < 0) to.bits = std::max(to.bits, t.bits - d);
  return to;
}

int conversion(Gen& r, GraphBuilder& b, int cur, const std::string& label) {
  const ValueType t = b.type_of(cur);
  switch (r.ri(0, 4)) {
    case 0:
      if (t.bits > 2) return b.trunc(cur, static_cast<int>(r.ri(1, std::min(4, t.bits - 1))), label);
      break;
    case 1:
      if (t.bits > 2) return b.tr(cur, static_cast<int>(r.ri(1, std::min(4, t.bits - 1))), label);
      break;
    case 2:
      if (t.bits < 50) return b.ext(cur, t.bits + static_cast<int>(r.ri(1, 6)), label);
      break;
    case 3:
      if (t.bits > 3) return b.narrow(cur, static_cast<int>(r.ri(std::max(2, t.bits - 4), t.bits - 1)), label);
      break;
    default: {
      auto to = random_requant(r, t);
      if (to) return b.requant(cur, *to, label);
    }
  }
  return cur;
}

Graph try_random_graph(Gen& r, const RandomGraphOptions& opt) {
  GraphBuilder b;
  const int64_t c0 = r.ri(1, opt.max_channels);
  QuantParams in;
  in.bits = static_cast<int>(r.ri(4, 7));
  in.scale_exp = static_cast<int>(r.ri(0, 4));
  int cur = b.input({1, c0, r.ri(2, opt.max_spatial), r.ri(2, opt.max_spatial)}, in);
  int skip = -1;
  const int blocks = static_cast<int>(r.ri(1, opt.max_blocks));
  for (int i = 0; i < blocks; ++i) {
    const std::string name = "b" + std::to_string(i);
    const ValueType t = b.type_of(cur);
    if (skip >= 0 && skip != cur && b.type_of(skip).shape == t.shape && r.coin(0.5)) {
      const ValueType st = b.type_of(skip);
      const int d = t.scale_exp - st.scale_exp;
      try {
        int aligned = skip;
        if (d < 0 && st.bits + d >= 2) {
          QuantParams to;
          to.bits = st.bits + d;
          to.scale_exp = t.scale_exp;
          aligned = b.requant(skip, to, name + "/align");
        }
        cur = b.residual_add(cur, aligned, ResidualMode::kBaseline, name + "/residual");
      } catch (const Error&) {
      }
      skip = -1;
      continue;
    }
    switch (r.ri(0, 5)) {
      case 0:
      case 1: {
        const int64_t k = r.coin(0.6) ? t.shape[1] : r.ri(1, opt.max_channels);
        const int m = opt.allow_f43 && r.coin(0.2) ? 4 : 2;
        auto spec = random_gemm(r.rng(), GemmKind::kWinograd, k, t.shape[1], random_importance(r),
                                static_cast<int>(r.ri(0, 3)), m);
        if (r.coin(0.5)) skip = cur;
        cur = b.qwinconv(cur, spec, random_requant(r, t), name);
        break;
      }
      case 2: {
        const int64_t k = r.coin(0.6) ? t.shape[1] : r.ri(1, opt.max_channels);
        auto spec = random_gemm(r.rng(), GemmKind::kDirect, k, t.shape[1], random_importance(r),
                                static_cast<int>(r.ri(0, 3)));
        if (r.coin(0.3)) {
          auto s = std::make_shared<GemmSpec>(*spec);
          s->stride = 2;
          spec = s;
        }
        cur = b.direct_conv(cur, spec, random_requant(r, t), name);
        break;
      }
      case 3:
        cur = b.relu(cur, name + "/relu");
        break;
      case 4:
        cur = conversion(r, b, cur, name + "/conv");
        break;
      default:
        skip = cur;
    }
  }
  if (r.coin(0.2)) {
    const ValueType t = b.type_of(cur);
    const int64_t c = t.numel() / t.shape[0];
    auto spec = random_gemm(r.rng(), GemmKind::kDense, r.ri(1, 4), c, random_importance(r), 0);
    const int acc = linear::gemm_accumulator_bits(t.range.value_bits(), c, spec->importance);
    if (acc > t.bits) cur = b.ext(cur, acc, "fc/ext");
    cur = b.gemm(cur, spec, "fc/gemm");
  }
  b.output(cur);
  return b.build();
}

}  // namespace

std::shared_ptr<GemmSpec> random_gemm(std::mt19937_64& rng, GemmKind kind, int64_t k, int64_t c,
                                      const linear::BitImportance& imp, int scale_exp, int m) {
  auto s = std::make_shared<GemmSpec>();
  s->kind = kind;
  s->k = k;
  s->c = c;
  s->m = m;
  s->importance = imp;
  s->scale_exp = scale_exp;
  const auto vals = imp.values();
  s->values.resize(static_cast<size_t>(s->weight_count()));
  for (auto& v : s->values) v = vals[rng() % vals.size()];
  return s;
}

Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt) {
  Gen r(rng);
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      return try_random_graph(r, opt);
    } catch (const Error&) {
    }
  }
  fail(ErrorCode::kInvariantViolation, "could not generate a valid random graph");
}

QTensor random_input(std::mt19937_64& rng, const Graph& g) {
  const Node& in = g.node(g.input_id());
  const auto n = static_cast<size_t>(shape_numel(in.shape));
  std::vector<int64_t> d(n);
  std::uniform_int_distribution<int64_t> dist(in.params.min_value(), in.params.max_value());
  for (auto& v : d) v = dist(rng);
  return QTensor(in.shape, std::move(d), in.params);
}

}  // namespace wino2pc::graph
