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

#include "wino2pc/net/dealer.h"

#include <fmt/format.h>

#include "wino2pc/core/errors.h"
#include "wino2pc/net/wire.h"

namespace wino2pc::net {
namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Request {
  DealerKind kind;
  ByteReader body;
};

Request parse(Message m) {
  WINO2PC_ENFORCE(m.tag == static_cast<uint8_t>(MsgTag::kDealerRequest),
                  ErrorCode::kProtocolError, "dealer expected a request frame");
  ByteReader r(std::move(m.payload));
  const auto kind = static_cast<DealerKind>(r.get_u8());
  return Request{kind, std::move(r)};
}

void reply(Channel& ch, const ByteWriter& w) {
  ch.send(static_cast<uint8_t>(MsgTag::kDealerReply), w.bytes());
}

}  // namespace

std::vector<RingElem> prg_expand(uint64_t seed, size_t n, int bits) {
  std::vector<RingElem> out(n);
  const uint64_t mask = ring_mask(bits);
  uint64_t state = seed;
  for (auto& v : out) {
    state += 0x9E3779B97F4A7C15ULL;
    v = splitmix64(state) & mask;
  }
  return out;
}

Dealer::Dealer(Channel& server, Channel& client, uint64_t seed)
    : server_(server), client_(client) {
  std::seed_seq seq{seed, uint64_t{0xdea1e7}};
  rng_.seed(seq);
}

void Dealer::serve() {
  for (;;) {
    Message ms = server_.recv();
    Message mc = client_.recv();
    const std::vector<uint8_t> raw_s = ms.payload;
    const std::vector<uint8_t> raw_c = mc.payload;
    Request rs = parse(std::move(ms));
    Request rc = parse(std::move(mc));
    WINO2PC_ENFORCE(rs.kind == rc.kind, ErrorCode::kProtocolError,
                    fmt::format("parties requested different functionalities ({} vs {})",
                                static_cast<int>(rs.kind), static_cast<int>(rc.kind)));
    switch (rs.kind) {
      case DealerKind::kClose:
        return;
      case DealerKind::kRandomOt: {
        const uint64_t n = rs.body.get_u64();
        WINO2PC_ENFORCE(n == rc.body.get_u64(), ErrorCode::kProtocolError,
                        "random OT count mismatch");
        random_ot(n);
        break;
      }
      case DealerKind::kBeaverTriples: {
        const uint64_t n = rs.body.get_u64();
        const int bits = rs.body.get_u8();
        WINO2PC_ENFORCE(n == rc.body.get_u64() && bits == rc.body.get_u8(),
                        ErrorCode::kProtocolError, "triple request mismatch");
        triples(n, bits);
        break;
      }
      case DealerKind::kCompare:
        compare(raw_s, raw_c);
        break;
      default:
        fail(ErrorCode::kProtocolError, "unknown dealer request");
    }
  }
}

void Dealer::random_ot(uint64_t count) {
  ByteWriter ws, wc;
  std::vector<uint8_t> choice(count);
  std::vector<uint64_t> s0(count), s1(count);
  for (uint64_t i = 0; i < count; ++i) {
    s0[i] = rng_();
    s1[i] = rng_();
    choice[i] = static_cast<uint8_t>(rng_() & 1);
  }
  ws.put_bits(choice);
  for (uint64_t i = 0; i < count; ++i) ws.put_u64(choice[i] ? s1[i] : s0[i]);
  for (uint64_t i = 0; i < count; ++i) {
    wc.put_u64(s0[i]);
    wc.put_u64(s1[i]);
  }
  reply(server_, ws);
  reply(client_, wc);
}

void Dealer::triples(uint64_t n, int bits) {
  std::vector<RingElem> a_s(n), b_s(n), c_s(n), a_c(n), b_c(n), c_c(n);
  const uint64_t mask = ring_mask(bits);
  for (uint64_t i = 0; i < n; ++i) {
    const RingElem a = rng_() & mask, b = rng_() & mask;
    const RingElem c = ring_mul(a, b, bits);
    a_s[i] = rng_() & mask;
    b_s[i] = rng_() & mask;
    c_s[i] = rng_() & mask;
    a_c[i] = ring_sub(a, a_s[i], bits);
    b_c[i] = ring_sub(b, b_s[i], bits);
    c_c[i] = ring_sub(c, c_s[i], bits);
  }
  ByteWriter ws, wc;
  for (const auto* v : {&a_s, &b_s, &c_s}) ws.put_packed(*v, bits);
  for (const auto* v : {&a_c, &b_c, &c_c}) wc.put_packed(*v, bits);
  reply(server_, ws);
  reply(client_, wc);
}

void Dealer::compare(std::vector<uint8_t> server_req, std::vector<uint8_t> client_req) {
  ByteReader rs(std::move(server_req)), rc(std::move(client_req));
  rs.get_u8();
  rc.get_u8();
  const uint64_t n = rs.get_u64();
  const int k = rs.get_u8();
  const int out_bits = rs.get_u8();
  const auto mode = static_cast<CompareMode>(rs.get_u8());
  WINO2PC_ENFORCE(n == rc.get_u64() && k == rc.get_u8() && out_bits == rc.get_u8() &&
                      mode == static_cast<CompareMode>(rc.get_u8()),
                  ErrorCode::kProtocolError, "comparison request mismatch");
  WINO2PC_ENFORCE(k >= 1 && k <= 64 && out_bits >= 1 && out_bits <= 64,
                  ErrorCode::kProtocolError, "comparison widths out of range");
  const auto a = rs.get_packed(n, k);
  const auto b = rc.get_packed(n, k);
  std::vector<RingElem> out_s(n), out_c(n);
  const uint64_t mask = ring_mask(out_bits);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t bit;
    if (mode == CompareMode::kCarry) {
      const unsigned __int128 sum = static_cast<unsigned __int128>(a[i]) + b[i];
      bit = (sum >> k) != 0 ? 1 : 0;
    } else {
      const uint64_t sum = ring_add(a[i], b[i], k);
      bit = (sum >> (k - 1)) & 1;
    }
    out_s[i] = rng_() & mask;
    out_c[i] = ring_sub(bit, out_s[i], out_bits);
  }
  ByteWriter ws, wc;
  ws.put_packed(out_s, out_bits);
  wc.put_packed(out_c, out_bits);
  reply(server_, ws);
  reply(client_, wc);
}

}  // namespace wino2pc::net
