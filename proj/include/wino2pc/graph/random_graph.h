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

// Random well-typed protocol graphs for property tests.

#pragma once

#include <random>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/graph/ir.h"

namespace wino2pc::graph {

struct RandomGraphOptions {
  int max_blocks = 4;
  int64_t max_channels = 3;
  int64_t max_spatial = 6;
  bool allow_f43 = true;
};

Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt = {});

/// Uniform tensor matching the graph's Input node.
QTensor random_input(std::mt19937_64& rng, const Graph& g);

/// Random server weights for a Gemm of the given shape.
std::shared_ptr<GemmSpec> random_gemm(std::mt19937_64& rng, GemmKind kind, int64_t k, int64_t c,
                                      const linear::BitImportance& imp, int scale_exp, int m = 2);

}  // namespace wino2pc::graph
