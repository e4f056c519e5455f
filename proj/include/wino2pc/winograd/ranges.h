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

// Overflow analysis of the integer transforms B^T X B and A^T M A over
// signed inputs of a given width.

#pragma once

#include <cstdint>
#include <vector>

#include "wino2pc/winograd/plan.h"

namespace wino2pc::winograd {

enum class TransformSide { kFeature, kOutput };

struct TransformRange {
  int64_t max_value = 0;
  int64_t min_value = 0;
  int64_t max_abs() const { return max_value > -min_value ? max_value : -min_value; }
};

/// Exact output range of the transform over all inputs in
/// [-2^(value_bits-1), 2^(value_bits-1) - 1], from sign-matched extremal
/// inputs per output element.
TransformRange transform_range(const WinogradPlan& plan, TransformSide side, int value_bits);

/// Same range by enumerating every extremal (vertex) input of one tile.
/// Only for 4 x 4 transform inputs (F(2,3)), i.e. 2^16 tiles.
TransformRange transform_range_exhaustive(const WinogradPlan& plan, TransformSide side,
                                          int value_bits);

/// Input tile attaining max_abs for the transform.
std::vector<int64_t> transform_witness(const WinogradPlan& plan, TransformSide side,
                                       int value_bits);

}  // namespace wino2pc::winograd
