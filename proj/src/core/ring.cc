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

#include "wino2pc/core/ring.h"

#include <bit>

namespace wino2pc {

int64_t ring_reduce(__int128 value, int bits) {
  // Truncating to 64 bits keeps the residue mod 2^64, hence mod 2^bits.
  return to_signed(static_cast<uint64_t>(value) & ring_mask(bits), bits);
}

int ceil_log2(uint64_t x) {
  if (x <= 1) return 0;
  return 64 - std::countl_zero(x - 1);
}

}  // namespace wino2pc
