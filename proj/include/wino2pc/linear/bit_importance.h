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

// Per-bit weight importance: a signed weight with bits (b_0, ..., b_{l-1}),
// most significant first, decodes to -B[0] * b_0 + sum_{i>0} B[i] * b_i.

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace wino2pc::linear {

class BitImportance {
 public:
  BitImportance() = default;
  explicit BitImportance(std::vector<int64_t> weights);

  /// {2^(l-1), ..., 2, 1}.
  static BitImportance standard(int lw);
  /// Head replaced by 2^l: {2^l, 2^(l-2), ..., 1}.
  static BitImportance reweighted(int lw);

  int bits() const { return static_cast<int>(weights_.size()); }
  const std::vector<int64_t>& weights() const { return weights_; }
  /// Signed contribution of bit i (the head is negative).
  int64_t coefficient(int i) const { return i == 0 ? -weights_[0] : weights_[i]; }
  int64_t sum() const;
  int64_t min_value() const { return -weights_[0]; }
  int64_t max_value() const { return sum() - weights_[0]; }
  int64_t max_abs() const;
  bool is_standard() const;

  /// Bits MSB first.
  int64_t decode(const uint8_t* bits) const;
  /// Throws kInvalidParams if `value` is not representable.
  std::vector<uint8_t> encode(int64_t value) const;
  bool representable(int64_t value) const;
  /// Sorted distinct representable values.
  std::vector<int64_t> values() const;
  /// Nearest representable value; ties go to the larger magnitude.
  int64_t nearest(double v) const;

  /// Extra accumulator bits for one weight: ceil(log2(sum + 1)).
  int accumulator_bits() const;

  bool operator==(const BitImportance&) const = default;

  nlohmann::json to_json() const { return weights_; }
  static BitImportance from_json(const nlohmann::json& j);

 private:
  std::vector<int64_t> weights_;
};

}  // namespace wino2pc::linear
