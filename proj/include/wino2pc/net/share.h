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

// Additive secret sharing over Z_{2^bits}.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "wino2pc/core/qtensor.h"
#include "wino2pc/core/ring.h"

namespace wino2pc::net {

enum class PartyId : uint8_t { kServer = 0, kClient = 1 };

inline PartyId other(PartyId p) {
  return p == PartyId::kServer ? PartyId::kClient : PartyId::kServer;
}
const char* party_name(PartyId p);

/// One party's additive share of a tensor. `params.bits` defines the ring.
struct Share {
  PartyId owner = PartyId::kServer;
  Shape shape;
  std::vector<RingElem> values;
  QuantParams params;

  int bits() const { return params.bits; }
  size_t size() const { return values.size(); }
};

/// Both shares of one logical tensor; used by tests and the in-process harness.
struct SharePair {
  Share server;
  Share client;
};

/// Server share is uniform over the ring; client share = t - server share.
SharePair share(const QTensor& t, std::mt19937_64& rng);

/// Same as share() with an explicit server share (ring elements).
SharePair share_with_mask(const QTensor& t, std::span<const RingElem> server_values);

/// Element-wise ring addition reduced to the signed representative.
QTensor reconstruct(const Share& a, const Share& b);
inline QTensor reconstruct(const SharePair& p) { return reconstruct(p.server, p.client); }

/// Ring-uniform vector of `n` elements.
std::vector<RingElem> random_ring(std::mt19937_64& rng, size_t n, int bits);

}  // namespace wino2pc::net
