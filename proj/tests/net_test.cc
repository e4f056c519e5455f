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

#include <random>
#include <thread>

#include "gtest/gtest.h"
#include "wino2pc/core/errors.h"
#include "wino2pc/net/channel.h"
#include "wino2pc/net/dealer.h"
#include "wino2pc/net/ledger.h"
#include "wino2pc/net/local_session.h"
#include "wino2pc/net/party.h"
#include "wino2pc/net/share.h"
#include "wino2pc/net/wire.h"

namespace wino2pc::net {
namespace {

QuantParams bits_params(int bits) {
  QuantParams p;
  p.bits = bits;
  return p;
}

TEST(ShareTest, Examples) {
  QTensor t({1}, {5}, bits_params(4));
  std::vector<RingElem> mask = {3};
  auto sp = share_with_mask(t, mask);
  EXPECT_EQ(sp.client.values[0], 2u);
  EXPECT_EQ(reconstruct(sp), t);

  QTensor m({1}, {-8}, bits_params(4));
  std::vector<RingElem> mask7 = {7};
  auto sm = share_with_mask(m, mask7);
  EXPECT_EQ(sm.client.values[0], 1u);
  EXPECT_EQ(reconstruct(sm), m);
}

TEST(ShareTest, ReconstructExamples) {
  Share a{PartyId::kServer, {1}, {15}, bits_params(4)};
  Share b{PartyId::kClient, {1}, {1}, bits_params(4)};
  EXPECT_EQ(reconstruct(a, b)[0], 0);
  a.values[0] = 3;
  b.values[0] = 2;
  EXPECT_EQ(reconstruct(a, b)[0], 5);
  a.values[0] = 0;
  b.values[0] = 0;
  EXPECT_EQ(reconstruct(a, b)[0], 0);
}

TEST(ShareTest, ReconstructErrors) {
  Share a{PartyId::kServer, {1}, {1}, bits_params(4)};
  Share b{PartyId::kClient, {2}, {1, 2}, bits_params(4)};
  try {
    reconstruct(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  Share c{PartyId::kClient, {1}, {1}, bits_params(5)};
  try {
    reconstruct(a, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParamMismatch);
  }
  Share d{PartyId::kServer, {1}, {1}, bits_params(4)};
  EXPECT_THROW(reconstruct(a, d), Error);
}

TEST(ShareProperty, ThousandRandomTensorsRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const int bits = 1 + static_cast<int>(rng() % 64);
    QuantParams p = bits_params(bits);
    const int n = 1 + static_cast<int>(rng() % 16);
    std::vector<int64_t> data(n);
    for (auto& v : data) v = to_signed(rng() & ring_mask(bits), bits);
    QTensor t({n}, data, p);
    EXPECT_EQ(reconstruct(share(t, rng)), t);
  }
}

TEST(WireTest, PackedRoundTrip) {
  std::mt19937_64 rng(5);
  for (int bits : {1, 3, 7, 8, 13, 31, 57, 63, 64}) {
    auto v = random_ring(rng, 37, bits);
    ByteWriter w;
    w.put_u8(9);
    w.put_packed(v, bits);
    w.put_u64(0xabcdef);
    EXPECT_EQ(w.bytes().size(), 1 + (37 * static_cast<size_t>(bits) + 7) / 8 + 8);
    ByteReader r(w.take());
    EXPECT_EQ(r.get_u8(), 9);
    EXPECT_EQ(r.get_packed(37, bits), v);
    EXPECT_EQ(r.get_u64(), 0xabcdefu);
    EXPECT_TRUE(r.at_end());
  }
}

TEST(WireTest, TruncatedReadThrows) {
  ByteWriter w;
  w.put_u32(1);
  ByteReader r(w.take());
  EXPECT_THROW(r.get_u64(), Error);
}

TEST(LedgerTest, TotalsMergeAndJson) {
  CommLedger s, c;
  s.add({"ext", "n1", Phase::kOnline, 988, 100});
  s.add({"gemm", "n2", Phase::kOffline, 128, 64});
  c.add({"ext", "n1", Phase::kOnline, 988, 40});
  c.add({"gemm", "n2", Phase::kOffline, 128, 8});
  auto m = CommLedger::merge(s, c);
  auto t = m.totals();
  EXPECT_EQ(t.modeled_online, 988u);
  EXPECT_EQ(t.modeled_offline, 128u);
  EXPECT_EQ(t.wire_online, 140u);
  EXPECT_EQ(t.wire_offline, 72u);
  EXPECT_EQ(m.by_label().at("n2").modeled(), 128u);
  EXPECT_EQ(CommLedger::from_json(m.to_json()).entries(), m.entries());

  c.add({"relu", "n3", Phase::kOnline, 1, 1});
  EXPECT_THROW(CommLedger::merge(s, c), Error);
}

TEST(ChannelTest, InprocOrderedAndClose) {
  auto [a, b] = make_inproc_pair();
  std::vector<uint8_t> p1 = {1, 2, 3};
  a->send(4, p1);
  a->send(5, {});
  auto m1 = b->recv();
  EXPECT_EQ(m1.tag, 4);
  EXPECT_EQ(m1.payload, p1);
  EXPECT_EQ(b->recv().tag, 5);
  std::thread t([&] { EXPECT_THROW(b->recv(), Error); });
  a->close();
  t.join();
}

TEST(ChannelTest, TcpRoundTrip) {
  TcpListener listener(0);
  const uint16_t port = listener.port();
  std::unique_ptr<Channel> server_side;
  std::thread t([&] { server_side = listener.accept(); });
  auto client_side = tcp_connect("127.0.0.1", port);
  t.join();
  std::vector<uint8_t> big(100000, 7);
  client_side->send(3, big);
  auto m = server_side->recv();
  EXPECT_EQ(m.tag, 3);
  EXPECT_EQ(m.payload, big);
  server_side->send(8, {});
  EXPECT_EQ(client_side->recv().payload.size(), 0u);
  client_side->close();
  EXPECT_THROW(server_side->recv(), Error);
}

TEST(DealerTest, PrgIsDeterministicAndInRange) {
  auto a = prg_expand(42, 100, 5);
  EXPECT_EQ(a, prg_expand(42, 100, 5));
  EXPECT_NE(a, prg_expand(43, 100, 5));
  for (auto v : a) EXPECT_LT(v, 32u);
}

struct Views {
  RandomOtBatch ot;
  BeaverTriples triples;
  std::vector<RingElem> carry;
  std::vector<RingElem> msb;
  std::vector<RingElem> inputs;
};

TEST(DealerTest, CorrelationsAreConsistent) {
  SessionConfig cfg;
  cfg.seed = 99;
  auto res = run_two_party(cfg, [](Party& p) {
    Views v;
    ProtocolScope scope(p, "test", Phase::kOffline);
    v.ot = p.random_ots(50);
    v.triples = p.beaver_triples(40, 12);
    v.inputs = random_ring(p.rng(), 64, 6);
    v.carry = p.compare(CompareMode::kCarry, v.inputs, 6, 9);
    v.msb = p.compare(CompareMode::kMsb, v.inputs, 6, 9);
    return v;
  });
  const auto& s = res.server;
  const auto& c = res.client;
  for (size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(s.ot.chosen_seed[i], s.ot.choice[i] ? c.ot.seed1[i] : c.ot.seed0[i]);
  }
  for (size_t i = 0; i < 40; ++i) {
    const RingElem a = ring_add(s.triples.a[i], c.triples.a[i], 12);
    const RingElem b = ring_add(s.triples.b[i], c.triples.b[i], 12);
    EXPECT_EQ(ring_add(s.triples.c[i], c.triples.c[i], 12), ring_mul(a, b, 12));
  }
  for (size_t i = 0; i < 64; ++i) {
    const RingElem sum = s.inputs[i] + c.inputs[i];
    EXPECT_EQ(ring_add(s.carry[i], c.carry[i], 9), sum >= 64 ? 1u : 0u);
    EXPECT_EQ(ring_add(s.msb[i], c.msb[i], 9), (sum >> 5) & 1);
  }
  EXPECT_EQ(res.ledger.entries().size(), 1u);
  EXPECT_GT(res.ledger.totals().wire_offline, 0u);
  EXPECT_EQ(res.ledger.totals().modeled(), 0u);
}

TEST(PartyTest, TrafficOutsideScopeIsRejected) {
  SessionConfig cfg;
  try {
    run_two_party(cfg, [](Party& p) {
      p.random_ots(1);
      return 0;
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
  }
}

TEST(PartyTest, NestedScopeIsRejected) {
  SessionConfig cfg;
  EXPECT_THROW(run_two_party(cfg,
                             [](Party& p) {
                               ProtocolScope a(p, "a", Phase::kOnline);
                               ProtocolScope b(p, "b", Phase::kOnline);
                               return 0;
                             }),
               Error);
}

TEST(PartyTest, DeterministicAcrossRuns) {
  auto body = [](Party& p) {
    ProtocolScope scope(p, "mix", Phase::kOnline);
    p.charge(7);
    auto in = random_ring(p.rng(), 10, 8);
    ByteWriter w;
    w.put_packed(in, 8);
    p.send(MsgTag::kInputShare, w);
    auto r = p.recv(MsgTag::kInputShare);
    auto out = p.compare(CompareMode::kMsb, r.get_packed(10, 8), 8, 8);
    return out;
  };
  SessionConfig cfg;
  cfg.seed = 5;
  auto a = run_two_party(cfg, body);
  auto b = run_two_party(cfg, body);
  EXPECT_EQ(a.server, b.server);
  EXPECT_EQ(a.client, b.client);
  EXPECT_EQ(a.ledger.entries(), b.ledger.entries());
  EXPECT_EQ(a.ledger.totals().modeled_online, 7u);
}

TEST(PartyTest, TcpLedgerSyncMatchesInproc) {
  auto body = [](Party& p) {
    {
      ProtocolScope scope(p, "x", Phase::kOnline);
      p.charge(3);
      ByteWriter w;
      w.put_u64(p.is_server() ? 1 : 2);
      p.send(MsgTag::kInputShare, w);
      p.recv(MsgTag::kInputShare);
      p.beaver_triples(5, 10);
    }
    return 0;
  };
  SessionConfig cfg;
  auto inproc = run_two_party(cfg, body);

  CommLedger server_view, client_view;
  TcpListener p2(0), ds(0), dc(0);
  std::thread dealer_thread([&] {
    auto s = ds.accept();
    auto c = dc.accept();
    Dealer d(*s, *c, cfg.seed);
    d.serve();
  });
  std::thread client_thread([&] {
    auto peer = tcp_connect("127.0.0.1", p2.port());
    auto dealer = tcp_connect("127.0.0.1", dc.port());
    Party p(PartyId::kClient, *peer, *dealer, cfg);
    body(p);
    p.close_dealer();
    client_view = p.sync_ledger();
  });
  auto peer = p2.accept();
  auto dealer = tcp_connect("127.0.0.1", ds.port());
  Party p(PartyId::kServer, *peer, *dealer, cfg);
  body(p);
  p.close_dealer();
  server_view = p.sync_ledger();
  client_thread.join();
  dealer_thread.join();
  EXPECT_EQ(server_view.entries(), inproc.ledger.entries());
  EXPECT_EQ(client_view.entries(), inproc.ledger.entries());
}

}  // namespace
}  // namespace wino2pc::net
