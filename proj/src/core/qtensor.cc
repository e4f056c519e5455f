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

#include "wino2pc/core/qtensor.h"

#include <cmath>
#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"

namespace wino2pc {

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    WINO2PC_ENFORCE(d >= 0, ErrorCode::kShapeMismatch, "negative dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void QuantParams::validate() const {
  WINO2PC_ENFORCE(bits >= 1 && bits <= kMaxRingBits, ErrorCode::kInvalidParams,
                  fmt::format("bit width {} outside [1, 64]", bits));
  WINO2PC_ENFORCE(is_signed || bits <= 63, ErrorCode::kInvalidParams,
                  "unsigned tensors are limited to 63 bits");
}

int64_t QuantParams::min_value() const {
  return is_signed ? signed_min(bits) : 0;
}

int64_t QuantParams::max_value() const {
  return is_signed ? signed_max(bits) : static_cast<int64_t>(ring_mask(bits));
}

QTensor::QTensor(Shape shape, std::vector<int64_t> data, QuantParams params)
    : shape_(std::move(shape)), data_(std::move(data)), params_(params) {
  params_.validate();
  WINO2PC_ENFORCE(shape_numel(shape_) == static_cast<int64_t>(data_.size()),
                  ErrorCode::kShapeMismatch,
                  fmt::format("shape {} does not match {} elements",
                              shape_str(shape_), data_.size()));
  validate();
}

QTensor QTensor::zeros(Shape shape, QuantParams params) {
  const auto n = static_cast<size_t>(shape_numel(shape));
  return QTensor(std::move(shape), std::vector<int64_t>(n, 0), params);
}

void QTensor::validate() const {
  const int64_t lo = params_.min_value();
  const int64_t hi = params_.max_value();
  for (int64_t v : data_) {
    WINO2PC_ENFORCE(v >= lo && v <= hi, ErrorCode::kInvalidParams,
                    fmt::format("element {} outside {}-bit range", v, params_.bits));
    WINO2PC_ENFORCE(!params_.msb_known_nonneg || v >= 0,
                    ErrorCode::kInvalidParams,
                    "negative element in tensor flagged nonnegative");
  }
}

int64_t round_half_away(double v) {
  // std::round rounds halfway cases away from zero.
  return static_cast<int64_t>(std::round(v));
}

QTensor quantize(std::span<const double> values, const Shape& shape,
                 const QuantParams& params) {
  params.validate();
  WINO2PC_ENFORCE(shape_numel(shape) == static_cast<int64_t>(values.size()),
                  ErrorCode::kShapeMismatch, "quantize: shape/value mismatch");
  const double lo = static_cast<double>(params.msb_known_nonneg ? 0 : params.min_value());
  const double hi = static_cast<double>(params.max_value());
  const double factor = std::ldexp(1.0, params.scale_exp);
  std::vector<int64_t> out;
  out.reserve(values.size());
  for (double v : values) {
    double scaled = v * factor;
    // Clamp before rounding so huge inputs cannot overflow the cast.
    scaled = std::fmin(std::fmax(scaled, lo), hi);
    out.push_back(round_half_away(scaled));
  }
  return QTensor(shape, std::move(out), params);
}

std::vector<double> dequantize(const QTensor& t) {
  std::vector<double> out;
  out.reserve(t.data().size());
  for (int64_t q : t.data())
    out.push_back(std::ldexp(static_cast<double>(q), -t.params().scale_exp));
  return out;
}

}  // namespace wino2pc
