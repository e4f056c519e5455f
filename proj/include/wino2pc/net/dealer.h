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

// Ideal-functionality dealer. It serves both parties in lockstep: each
// request is read from the server link, then from the client link, checked
// for agreement, and answered on both links.
//
// Functionalities:
//  - random OT: client gets seed pairs (s0, s1); server gets (c, s_c).
//  - Beaver triples over Z_{2^l}.
//  - comparison: server inputs a, client inputs b (k-bit values); both get
//    additive shares over Z_{2^out} of 1{a + b >= 2^k} (carry) or of the
//    MSB of (a + b) mod 2^k.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wino2pc/core/ring.h"
#include "wino2pc/net/channel.h"

namespace wino2pc::net {

enum class DealerKind : uint8_t {
  kRandomOt = 1,
  kBeaverTriples = 2,
  kCompare = 3,
  kClose = 255,
};

enum class CompareMode : uint8_t {
  kCarry = 0,
  kMsb = 1,
};

/// Deterministic expansion of an OT seed into `n` ring elements.
std::vector<RingElem> prg_expand(uint64_t seed, size_t n, int bits);

class Dealer {
 public:
  Dealer(Channel& server, Channel& client, uint64_t seed);

  /// Serves requests until both parties send kClose.
  void serve();

 private:
  void random_ot(uint64_t count);
  void triples(uint64_t n, int bits);
  void compare(std::vector<uint8_t> server_req, std::vector<uint8_t> client_req);

  Channel& server_;
  Channel& client_;
  std::mt19937_64 rng_;
};

}  // namespace wino2pc::net
