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

#include "wino2pc/net/share.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::net {

const char* party_name(PartyId p) {
  return p == PartyId::kServer ? "server" : "client";
}

std::vector<RingElem> random_ring(std::mt19937_64& rng, size_t n, int bits) {
  std::vector<RingElem> out(n);
  const uint64_t mask = ring_mask(bits);
  for (auto& v : out) v = rng() & mask;
  return out;
}

SharePair share_with_mask(const QTensor& t, std::span<const RingElem> server_values) {
  const int bits = t.params().bits;
  WINO2PC_ENFORCE(server_values.size() == t.data().size(), ErrorCode::kShapeMismatch,
                  "mask size does not match tensor");
  SharePair p;
  p.server = Share{PartyId::kServer, t.shape(), {}, t.params()};
  p.client = Share{PartyId::kClient, t.shape(), {}, t.params()};
  p.server.values.reserve(server_values.size());
  p.client.values.reserve(server_values.size());
  for (size_t i = 0; i < server_values.size(); ++i) {
    const RingElem s = server_values[i] & ring_mask(bits);
    p.server.values.push_back(s);
    p.client.values.push_back(ring_sub(to_ring(t.data()[i], bits), s, bits));
  }
  return p;
}

SharePair share(const QTensor& t, std::mt19937_64& rng) {
  const auto mask = random_ring(rng, t.data().size(), t.params().bits);
  return share_with_mask(t, mask);
}

QTensor reconstruct(const Share& a, const Share& b) {
  WINO2PC_ENFORCE(a.shape == b.shape && a.values.size() == b.values.size(),
                  ErrorCode::kShapeMismatch,
                  fmt::format("share shapes {} vs {}", shape_str(a.shape),
                              shape_str(b.shape)));
  WINO2PC_ENFORCE(a.params.same_format(b.params), ErrorCode::kParamMismatch,
                  fmt::format("share widths {} vs {}", a.params.bits, b.params.bits));
  WINO2PC_ENFORCE(a.owner != b.owner, ErrorCode::kParamMismatch,
                  "reconstruct needs one share from each party");
  const int bits = a.params.bits;
  std::vector<int64_t> data(a.values.size());
  for (size_t i = 0; i < data.size(); ++i)
    data[i] = to_signed(ring_add(a.values[i], b.values[i], bits), bits);
  QuantParams p = a.params;
  p.msb_known_nonneg = a.params.msb_known_nonneg && b.params.msb_known_nonneg;
  return QTensor(a.shape, std::move(data), p);
}

}  // namespace wino2pc::net
