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

// Per-element communication formulas (bits) for the conversion, ReLU and
// GEMM protocols. The bracketed expressions of the asymptotic cost table are
// used as exact counts so that fusion identities can be checked on ledgers.

#pragma once

#include <cstdint>
#include <string_view>

namespace wino2pc::proto {

struct CostModel {
  int lambda = 128;
  // Charge the cheaper formulas when the input MSB is known to be zero.
  bool msb_discount = true;

  /// Ext(l1 -> l2): lambda(l1+1) + 13 l1 + l2; MSB known: lambda + l1 + l2.
  uint64_t ext(int l1, int l2, bool msb_known = false) const;
  /// Trunc(l1, s): lambda(l1+3) + 15 l1 + s + 20; MSB known: lambda(l1+1) + 13 l1.
  uint64_t trunc(int l1, int shift, bool msb_known = false) const;
  /// TR(l1, s): lambda(s+1) + 13 s + l1.
  uint64_t truncate_reduce(int l1, int shift) const;
  /// ReLU(l): lambda(l+2) + 14 l.
  uint64_t relu(int l) const;
  /// One OT per weight bit: lambda offline, n * acc_bits online.
  uint64_t gemm_offline_per_ot() const { return static_cast<uint64_t>(lambda); }
  uint64_t gemm_online_per_ot(int64_t n, int acc_bits) const {
    return static_cast<uint64_t>(n) * static_cast<uint64_t>(acc_bits);
  }

  /// Lookup by protocol name ("ext", "trunc", "tr", "relu"); `a`/`b` are the
  /// two width arguments in the order of the corresponding method.
  uint64_t per_element(std::string_view protocol, int a, int b,
                       bool msb_known = false) const;
};

}  // namespace wino2pc::proto
