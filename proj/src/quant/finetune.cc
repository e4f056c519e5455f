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

#include "wino2pc/quant/finetune.h"

#include <cmath>
#include <random>

#include "wino2pc/core/errors.h"
#include "wino2pc/quant/bsq.h"

namespace wino2pc::quant {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Eval {
  double loss = 0.0;
  double gw[2] = {0, 0};
  double gb = 0.0;
  double accuracy = 0.0;
};

Eval evaluate(const Blobs& d, const double w[2], double b) {
  Eval e;
  const double n = static_cast<double>(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    const double x0 = d.x[2 * i], x1 = d.x[2 * i + 1];
    const double z = w[0] * x0 + w[1] * x1 + b;
    const double p = sigmoid(z);
    const int y = d.y[i];
    // log(1 + e^-|z|) form keeps the loss finite
    e.loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y * z;
    e.gw[0] += (p - y) * x0 / n;
    e.gw[1] += (p - y) * x1 / n;
    e.gb += (p - y) / n;
    e.accuracy += ((z > 0) == (y == 1)) ? 1.0 : 0.0;
  }
  e.loss /= n;
  e.accuracy /= n;
  return e;
}

}  // namespace

Blobs make_blobs(int points, uint64_t seed, double spread) {
  WINO2PC_ENFORCE(points > 0, ErrorCode::kInvalidParams, "need at least one point");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Blobs d;
  for (int i = 0; i < points; ++i) {
    const int y = i % 2;
    const double c = y ? 2.0 : -2.0;
    d.x.push_back(c + noise(rng));
    d.x.push_back(c + noise(rng));
    d.y.push_back(y);
  }
  return d;
}

ToyResult finetune_toy(const ToyOptions& opt) {
  WINO2PC_ENFORCE(opt.epochs >= 0 && opt.lr > 0 && opt.scale > 0, ErrorCode::kInvalidParams,
                  "bad training options");
  const Blobs data = make_blobs(opt.points, opt.seed);
  ToyResult r;
  r.importance = opt.reweight ? linear::BitImportance::reweighted(opt.lw)
                              : linear::BitImportance::standard(opt.lw);
  r.scale = opt.scale;
  const BsqOptions train{.round = true, .twos_complement = true};

  std::mt19937_64 rng(opt.seed ^ 0x5eed);
  std::uniform_real_distribution<double> init(0.25, 0.75);
  r.relaxed_bits.assign(2, std::vector<double>(static_cast<size_t>(opt.lw)));
  for (auto& bits : r.relaxed_bits) {
    for (auto& b : bits) b = init(rng);
  }

  auto forward = [&](double w[2]) {
    for (int j = 0; j < 2; ++j) {
      w[j] = bsq_forward(r.relaxed_bits[static_cast<size_t>(j)], r.importance, r.scale, opt.lw, train);
    }
  };

  double w[2];
  for (int epoch = 0; epoch <= opt.epochs; ++epoch) {
    forward(w);
    const Eval e = evaluate(data, w, r.bias);
    r.losses.push_back(e.loss);
    if (epoch == opt.epochs) break;
    for (int j = 0; j < 2; ++j) {
      auto& bits = r.relaxed_bits[static_cast<size_t>(j)];
      for (int pos = 0; pos < opt.lw; ++pos) {
        const double g = bsq_backward(e.gw[j], pos, r.importance, r.scale, opt.lw, train);
        double& b = bits[static_cast<size_t>(opt.lw - 1 - pos)];
        b = std::clamp(b - opt.lr * g, 0.0, 1.0);
      }
    }
    r.bias -= opt.lr * e.gb;
  }

  // Export: bits hard-thresholded at 0.5.
  const double step = r.scale / (std::ldexp(1.0, opt.lw) - 1.0);
  for (int j = 0; j < 2; ++j) {
    int64_t v = 0;
    for (int i = 0; i < opt.lw; ++i) {
      if (r.relaxed_bits[static_cast<size_t>(j)][static_cast<size_t>(i)] >= 0.5) {
        const int64_t c = r.importance.weights()[static_cast<size_t>(i)];
        v += i == 0 ? -c : c;
      }
    }
    r.values.push_back(v);
    r.weights.push_back(static_cast<double>(v) * step);
  }
  const double hard[2] = {r.weights[0], r.weights[1]};
  r.accuracy = evaluate(data, hard, r.bias).accuracy;
  return r;
}

nlohmann::json ToyResult::to_model_json() const {
  nlohmann::json layers = nlohmann::json::array();
  layers.push_back({{"name", "x"}, {"kind", "input"}, {"channels", 2}, {"spatial", {1, 1}}});
  layers.push_back({{"name", "fc"},
                    {"kind", "fc"},
                    {"in_channels", 2},
                    {"out_channels", 1},
                    {"l_w", importance.bits()},
                    {"bit_importance", importance.weights()},
                    {"weight_values", values},
                    {"weight_scale", scale / (std::ldexp(1.0, importance.bits()) - 1.0)},
                    {"bias", bias}});
  layers.push_back({{"name", "y"}, {"kind", "output"}});
  return {{"format", "wino2pc-toy-model"}, {"version", 1}, {"layers", layers}};
}

double float_oracle_accuracy(const Blobs& data, int epochs, double lr) {
  double w[2] = {0, 0}, b = 0;
  for (int e = 0; e < epochs; ++e) {
    const Eval ev = evaluate(data, w, b);
    w[0] -= lr * ev.gw[0];
    w[1] -= lr * ev.gw[1];
    b -= lr * ev.gb;
  }
  return evaluate(data, w, b).accuracy;
}

}  // namespace wino2pc::quant
