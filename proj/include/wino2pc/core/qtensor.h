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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wino2pc {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Bit width and dyadic scale of a quantized value: real = q / 2^scale_exp.
struct QuantParams {
  int bits = 8;
  int scale_exp = 0;
  bool is_signed = true;
  bool msb_known_nonneg = false;

  void validate() const;
  int64_t min_value() const;
  int64_t max_value() const;

  // Equality ignores the msb flag, which only tags knowledge about values.
  bool same_format(const QuantParams& o) const {
    return bits == o.bits && scale_exp == o.scale_exp && is_signed == o.is_signed;
  }
  bool operator==(const QuantParams&) const = default;
};

/// Integer tensor with quantization parameters. Elements are kept in the
/// signed (or unsigned) range implied by `params`.
class QTensor {
 public:
  QTensor() = default;
  QTensor(Shape shape, std::vector<int64_t> data, QuantParams params);

  static QTensor zeros(Shape shape, QuantParams params);

  const Shape& shape() const { return shape_; }
  const std::vector<int64_t>& data() const { return data_; }
  std::vector<int64_t>& mutable_data() { return data_; }
  const QuantParams& params() const { return params_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  int64_t operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  /// Throws kInvalidParams if any element violates the range or msb flag.
  void validate() const;

  bool operator==(const QTensor&) const = default;

 private:
  Shape shape_;
  std::vector<int64_t> data_;
  QuantParams params_;
};

/// Round half away from zero.
int64_t round_half_away(double v);

QTensor quantize(std::span<const double> values, const Shape& shape,
                 const QuantParams& params);
std::vector<double> dequantize(const QTensor& t);

}  // namespace wino2pc
