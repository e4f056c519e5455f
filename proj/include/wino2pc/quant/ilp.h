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

// Bit-width assignment under a communication budget.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wino2pc/quant/sensitivity.h"

namespace wino2pc::quant {

struct BitAssignment {
  std::vector<int> bits;  // one width per layer
  double omega = 0.0;
  uint64_t comm = 0;
};

/// Minimizes total omega subject to total comm <= zeta. Ties go to the
/// lower total comm, then the lexicographically smaller width vector.
/// Exact Pareto-frontier DP. Throws kInfeasible when the cheapest
/// assignment already exceeds zeta.
BitAssignment assign_bits_ilp(std::span<const LayerSensitivity> sens, uint64_t zeta);

/// Enumerates every assignment (at most 12 layers). Same objective.
BitAssignment assign_bits_exhaustive(std::span<const LayerSensitivity> sens, uint64_t zeta);

}  // namespace wino2pc::quant
