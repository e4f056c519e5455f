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

// Toy bit-level quantization-aware training: a logistic classifier on
// two 2-D Gaussian blobs with BSQ-parameterized weights.

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "wino2pc/linear/bit_importance.h"

namespace wino2pc::quant {

struct Blobs {
  std::vector<double> x;  // points x 2
  std::vector<int> y;     // 0 or 1
  size_t size() const { return y.size(); }
};

/// Class 0 around (-2, -2), class 1 around (2, 2), unit-free std `spread`.
Blobs make_blobs(int points, uint64_t seed, double spread = 0.7);

struct ToyOptions {
  int lw = 4;
  int epochs = 50;
  double lr = 0.05;
  uint64_t seed = 7;
  int points = 200;
  bool reweight = false;
  // Weight step is scale / (2^lw - 1).
  double scale = 3.75;
};

struct ToyResult {
  linear::BitImportance importance;
  double scale = 0.0;
  std::vector<std::vector<double>> relaxed_bits;  // per weight, head first
  std::vector<int64_t> values;                    // hard-thresholded integers
  std::vector<double> weights;                    // dequantized
  double bias = 0.0;
  std::vector<double> losses;  // epochs + 1 entries, losses[0] before training
  double accuracy = 0.0;       // with the exported weights

  /// Model document: input -> fc -> output with per-layer importance.
  nlohmann::json to_model_json() const;
};

ToyResult finetune_toy(const ToyOptions& opt = {});

/// Full-precision logistic regression on the same data (reference).
double float_oracle_accuracy(const Blobs& data, int epochs = 200, double lr = 0.1);

}  // namespace wino2pc::quant
