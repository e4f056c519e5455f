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

#include "wino2pc/linear/bit_importance.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/core/ring.h"

namespace wino2pc::linear {

BitImportance::BitImportance(std::vector<int64_t> weights) : weights_(std::move(weights)) {
  WINO2PC_ENFORCE(!weights_.empty() && weights_.size() <= 16, ErrorCode::kInvalidParams,
                  "bit importance needs 1..16 entries");
  for (size_t i = 0; i < weights_.size(); ++i) {
    const int64_t w = weights_[i];
    WINO2PC_ENFORCE(w > 0 && (w & (w - 1)) == 0, ErrorCode::kInvalidParams,
                    fmt::format("bit importance entry {} is not a power of two", w));
    WINO2PC_ENFORCE(i == 0 || w < weights_[i - 1], ErrorCode::kInvalidParams,
                    "bit importance must be strictly decreasing");
  }
}

BitImportance BitImportance::standard(int lw) {
  WINO2PC_ENFORCE(lw >= 1 && lw <= 16, ErrorCode::kInvalidParams, "weight bits out of range");
  std::vector<int64_t> w(static_cast<size_t>(lw));
  for (int i = 0; i < lw; ++i) w[static_cast<size_t>(i)] = int64_t{1} << (lw - 1 - i);
  return BitImportance(std::move(w));
}

BitImportance BitImportance::reweighted(int lw) {
  auto w = standard(lw).weights_;
  w[0] = int64_t{1} << lw;
  return BitImportance(std::move(w));
}

int64_t BitImportance::sum() const {
  int64_t s = 0;
  for (auto w : weights_) s += w;
  return s;
}

int64_t BitImportance::max_abs() const { return std::max(-min_value(), max_value()); }

bool BitImportance::is_standard() const { return *this == standard(bits()); }

int64_t BitImportance::decode(const uint8_t* bits) const {
  int64_t v = 0;
  for (int i = 0; i < this->bits(); ++i) {
    if (bits[i]) v += coefficient(i);
  }
  return v;
}

std::vector<uint8_t> BitImportance::encode(int64_t value) const {
  std::vector<uint8_t> out(weights_.size(), 0);
  int64_t rest = value;
  if (rest < 0) {
    out[0] = 1;
    rest += weights_[0];
  }
  for (size_t i = 1; i < weights_.size(); ++i) {
    if (rest >= weights_[i]) {
      out[i] = 1;
      rest -= weights_[i];
    }
  }
  WINO2PC_ENFORCE(rest == 0, ErrorCode::kInvalidParams,
                  fmt::format("value {} is not representable with this bit importance", value));
  return out;
}

bool BitImportance::representable(int64_t value) const {
  try {
    encode(value);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<int64_t> BitImportance::values() const {
  const int n = bits();
  std::vector<int64_t> out;
  out.reserve(size_t{1} << n);
  std::vector<uint8_t> b(static_cast<size_t>(n));
  for (uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
    for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = (pattern >> (n - 1 - i)) & 1;
    out.push_back(decode(b.data()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int64_t BitImportance::nearest(double v) const {
  const auto vals = values();
  auto it = std::lower_bound(vals.begin(), vals.end(), v,
                             [](int64_t a, double b) { return static_cast<double>(a) < b; });
  if (it == vals.begin()) return *it;
  if (it == vals.end()) return vals.back();
  const int64_t hi = *it, lo = *(it - 1);
  const double dh = static_cast<double>(hi) - v, dl = v - static_cast<double>(lo);
  if (dh < dl) return hi;
  if (dl < dh) return lo;
  return std::llabs(hi) >= std::llabs(lo) ? hi : lo;
}

int BitImportance::accumulator_bits() const {
  return ceil_log2(static_cast<uint64_t>(sum()) + 1);
}

BitImportance BitImportance::from_json(const nlohmann::json& j) {
  WINO2PC_ENFORCE(j.is_array(), ErrorCode::kInvalidParams, "bit importance must be a list");
  return BitImportance(j.get<std::vector<int64_t>>());
}

}  // namespace wino2pc::linear
