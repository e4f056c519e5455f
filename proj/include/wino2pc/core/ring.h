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

// Arithmetic over Z_{2^l} for 1 <= l <= 64. Ring elements are stored as
// uint64_t in [0, 2^l); signed views use the two's-complement representative.

#pragma once

#include <cstdint>

namespace wino2pc {

using RingElem = uint64_t;

inline constexpr int kMaxRingBits = 64;

constexpr uint64_t ring_mask(int bits) {
  return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
}

constexpr RingElem to_ring(int64_t v, int bits) {
  return static_cast<uint64_t>(v) & ring_mask(bits);
}

// `v` must already lie in [0, 2^bits).
constexpr int64_t to_signed(RingElem v, int bits) {
  if (bits >= 64) return static_cast<int64_t>(v);
  const uint64_t half = uint64_t{1} << (bits - 1);
  return v >= half ? static_cast<int64_t>(v) - static_cast<int64_t>(half << 1)
                   : static_cast<int64_t>(v);
}

constexpr RingElem ring_add(RingElem a, RingElem b, int bits) {
  return (a + b) & ring_mask(bits);
}
constexpr RingElem ring_sub(RingElem a, RingElem b, int bits) {
  return (a - b) & ring_mask(bits);
}
constexpr RingElem ring_mul(RingElem a, RingElem b, int bits) {
  return (a * b) & ring_mask(bits);
}
constexpr RingElem ring_neg(RingElem a, int bits) {
  return (~a + 1) & ring_mask(bits);
}

/// Canonical signed representative of `value mod 2^bits`.
int64_t ring_reduce(__int128 value, int bits);

inline int64_t ring_reduce(int64_t value, int bits) {
  return to_signed(to_ring(value, bits), bits);
}
inline int64_t ring_reduce(int value, int bits) {
  return ring_reduce(static_cast<int64_t>(value), bits);
}

constexpr int64_t signed_min(int bits) {
  return bits >= 64 ? INT64_MIN : -(int64_t{1} << (bits - 1));
}
constexpr int64_t signed_max(int bits) {
  return bits >= 64 ? INT64_MAX : (int64_t{1} << (bits - 1)) - 1;
}

inline bool fits_signed(int64_t v, int bits) {
  return v >= signed_min(bits) && v <= signed_max(bits);
}

/// Smallest k with 2^k >= x; ceil_log2(0) = ceil_log2(1) = 0.
int ceil_log2(uint64_t x);

}  // namespace wino2pc
