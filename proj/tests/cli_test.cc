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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "wino2pc/cli/commands.h"
#include "wino2pc/cli/model.h"
#include "wino2pc/cli/tcp.h"
#include "wino2pc/core/tensor_io.h"
#include "wino2pc/graph/estimate.h"
#include "wino2pc/graph/exec.h"
#include "wino2pc/net/channel.h"
#include "wino2pc/quant/ilp.h"
#include "wino2pc/winograd/conv.h"
#include "wino2pc/winograd/plan.h"

namespace wino2pc::cli {
namespace {

using nlohmann::json;

const fs::path kSource = WINO2PC_SOURCE_DIR;

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / fmt::format("wino2pc_cli_{}_{}", name, ::getpid());
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

json conv_model(int64_t c, int64_t k, int64_t h, int64_t w, const std::vector<double>& kernel,
                json conv_extra = json::object()) {
  json conv = {{"name", "conv"}, {"kind", "conv3x3"}, {"out_channels", k}, {"weight_values", kernel}};
  if (!conv_extra.contains("bit_importance")) conv["l_w"] = 8;
  conv.update(conv_extra);
  return {{"layers",
           {{{"name", "x"}, {"kind", "input"}, {"channels", c}, {"spatial", {h, w}}, {"l_a", 6}},
            conv,
            {{"name", "y"}, {"kind", "output"}}}}};
}

TEST(Model, ValidationErrors) {
  auto bad = [](json doc) { return code_of([&] { model_from_json(doc); }); };
  EXPECT_EQ(bad(json::object()), ErrorCode::kInvalidParams);
  EXPECT_EQ(bad({{"layers", {{{"name", "a"}, {"kind", "pool"}}}}}), ErrorCode::kInvalidParams);
  json dup = conv_model(1, 1, 4, 4, std::vector<double>(9, 0.0));
  dup["layers"][1]["name"] = "x";
  EXPECT_EQ(bad(dup), ErrorCode::kInvalidParams);
  json no_out = conv_model(1, 1, 4, 4, std::vector<double>(9, 0.0));
  no_out["layers"].erase(2);
  EXPECT_EQ(bad(no_out), ErrorCode::kInvalidParams);
  json wrong_count = conv_model(1, 1, 4, 4, std::vector<double>(8, 0.0));
  EXPECT_EQ(code_of([&] { lower_model(model_from_json(wrong_count)); }), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of([&] { load_model("/nonexistent/model.json"); }), ErrorCode::kIoError);
}

TEST(Model, SingleConvMatchesIntegerConvolution) {
  // integer kernels and scale 2^2 make the F(2,3) weight transform exact
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const int64_t c = 2, k = 3, h = 6, w = 5;
    std::vector<double> kernel(static_cast<size_t>(k * c * 9));
    std::vector<int64_t> ik(kernel.size());
    for (size_t i = 0; i < kernel.size(); ++i) {
      ik[i] = static_cast<int64_t>(rng() % 5) - 2;
      kernel[i] = static_cast<double>(ik[i]);
    }
    const auto m = model_from_json(conv_model(c, k, h, w, kernel, {{"weight_scale_exp", 2}, {"reweight", false}}));
    RunOptions opt;
    opt.seed = static_cast<uint64_t>(trial);
    const auto g = prepare_graph(m, opt);
    const QTensor x = model_input(g, std::nullopt, opt.seed);
    const QTensor y = graph::run_plain(g, x);
    const winograd::ConvShape s{1, c, h, w, k};
    const auto ref = winograd::winograd_conv_plain(ik, x.data(), s, winograd::winograd_matrices(2, 3));
    ASSERT_EQ(y.data().size(), ref.size());
    for (size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(y.data()[i], 4 * ref[i]) << i;
    EXPECT_EQ(y.params().scale_exp, x.params().scale_exp + 2);
  }
}

TEST(Model, ZeroInputZeroOutputAndDeterminism) {
  std::mt19937_64 rng(8);
  const auto m = model_from_json(random_conv_model(rng, 2, 6));
  const auto g = prepare_graph(m, {});
  const QTensor x = model_input(g, std::nullopt, 1);
  const QTensor zero(x.shape(), std::vector<int64_t>(x.data().size(), 0), x.params());
  for (int64_t v : graph::run_plain(g, zero).data()) EXPECT_EQ(v, 0);
  const auto a = cmd_run_plain(m, std::nullopt, {});
  const auto b = cmd_run_plain(m, std::nullopt, {});
  EXPECT_EQ(a.output->data(), b.output->data());
}

TEST(TransformWeights, RoundTripIdempotentAndUsable) {
  const auto m = load_model(kSource / "models/resnet/model.json");
  const auto dir = temp_dir("tw");
  const auto r1 = cmd_transform_weights(m, 2, dir);
  ASSERT_EQ(r1["files"].size(), 5u);
  const auto first = slurp(dir / "stem.wq.json");
  cmd_transform_weights(m, 2, dir);
  EXPECT_EQ(slurp(dir / "stem.wq.json"), first);
  const auto loaded = load_transformed_weights(dir);
  ASSERT_EQ(loaded.size(), 5u);
  // load = save
  json reread = json::parse(first);
  reread.erase("layer");
  EXPECT_EQ(gemm_spec_to_json(*loaded.at("stem")), reread);

  RunOptions with;
  with.weights_dir = dir;
  EXPECT_EQ(cmd_run_plain(m, std::nullopt, with).output->data(),
            cmd_run_plain(m, std::nullopt, {}).output->data());
  const auto inproc = cmd_run_2pc_inproc(m, std::nullopt, with);
  EXPECT_EQ(inproc.output->data(), cmd_run_plain(m, std::nullopt, {}).output->data());
  fs::remove_all(dir);
}

TEST(TransformWeights, ZeroWeightsGiveZeroFiles) {
  const auto m = model_from_json(conv_model(2, 2, 4, 4, std::vector<double>(36, 0.0)));
  const auto dir = temp_dir("zero");
  cmd_transform_weights(m, 2, dir);
  const auto w = load_transformed_weights(dir);
  for (int64_t v : w.at("conv")->values) EXPECT_EQ(v, 0);
  fs::remove_all(dir);
}

TEST(OptimizeGraph, IdentityAndReduction) {
  const auto m = load_model(kSource / "models/resnet/model.json");
  RunOptions none;
  none.passes = {};
  const auto id = cmd_optimize_graph(m, none);
  EXPECT_TRUE(id.after == id.before);
  EXPECT_TRUE(id.report["steps"].empty());

  const auto r = cmd_optimize_graph(m, {});
  const auto before = graph::estimate_comm(r.before);
  const auto after = graph::estimate_comm(r.after);
  EXPECT_LT(after.total(), before.total());
  EXPECT_EQ(r.report["after"]["totals"]["modeled"].get<uint64_t>(), after.total());
  EXPECT_EQ(r.report["before"]["totals"]["modeled"].get<uint64_t>(), before.total());
  uint64_t sum = 0;
  for (const auto& [k, v] : r.report["after"]["by_protocol"].items()) sum += v["modeled"].get<uint64_t>();
  EXPECT_EQ(sum, after.total());
  EXPECT_EQ(r.report["steps"].back()["after"].get<uint64_t>(), after.total());
  EXPECT_NE(r.table.find("decompose_trunc"), std::string::npos);
}

TEST(Run2pc, InprocMatchesPlainOnBundledModels) {
  for (const char* name : {"models/resnet/model.json", "models/minionn/model.json"}) {
    const auto m = load_model(kSource / name);
    const auto r = cmd_run_2pc_inproc(m, std::nullopt, {});
    EXPECT_EQ(r.output->data(), cmd_run_plain(m, std::nullopt, {}).output->data()) << name;
    const auto t = r.ledger.totals();
    EXPECT_GT(t.modeled_offline, 0u);
    EXPECT_GT(t.modeled_online, 0u);
    EXPECT_GE(t.wire(), 0u);
    EXPECT_EQ(r.report["ledger"]["totals"]["modeled"].get<uint64_t>(), t.modeled());
  }
}

TEST(Run2pc, TcpThreadsMatchInproc) {
  std::mt19937_64 rng(12);
  const auto m = model_from_json(random_conv_model(rng, 4, 4));
  RunOptions opt;
  opt.seed = 5;
  const auto g = prepare_graph(m, opt);
  const QTensor x = model_input(g, std::nullopt, opt.seed);
  net::SessionConfig cfg;
  cfg.seed = opt.seed;
  net::TcpListener peer(0), dealer(0);
  net::CommLedger server_ledger;
  std::thread server([&] { server_ledger = serve_2pc_tcp(g, peer, dealer, cfg); });
  const auto client = connect_2pc_tcp(g.public_view(), x, "127.0.0.1", peer.port(), dealer.port(), cfg);
  server.join();
  const auto inproc = cmd_run_2pc_inproc(m, std::nullopt, opt);
  EXPECT_EQ(client.output.data(), inproc.output->data());
  EXPECT_EQ(client.ledger.entries(), server_ledger.entries());
  EXPECT_TRUE(graph::same_modeled(client.ledger, inproc.ledger));
}

uint16_t free_port_pair() {
  for (int attempt = 0; attempt < 50; ++attempt) {
    uint16_t p = 0;
    {
      net::TcpListener a(0);
      p = a.port();
    }
    if (p == 65535) continue;
    try {
      net::TcpListener a(p), b(static_cast<uint16_t>(p + 1));
      return p;
    } catch (const Error&) {
    }
  }
  return 0;
}

int run_cmd(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Process, TcpRolesMatchInproc) {
  const auto dir = temp_dir("proc");
  const std::string bin = WINO2PC_BIN;
  const auto model = (kSource / "models/resnet/model.json").string();
  const uint16_t port = free_port_pair();
  ASSERT_NE(port, 0);
  const auto peer = fmt::format("127.0.0.1:{}", port);
  int server_rc = -1;
  std::thread server([&] {
    server_rc = run_cmd(fmt::format("{} run-2pc --model {} --transport tcp --role server --peer {} --seed 3 "
                                    "--report {}",
                                    bin, model, peer, (dir / "server.json").string()));
  });
  const int client_rc = run_cmd(fmt::format(
      "{} run-2pc --model {} --transport tcp --role client --peer {} --seed 3 --out {} --report {}", bin,
      model, peer, (dir / "tcp.qtsr").string(), (dir / "client.json").string()));
  server.join();
  ASSERT_EQ(client_rc, 0);
  ASSERT_EQ(server_rc, 0);
  ASSERT_EQ(run_cmd(fmt::format("{} run-2pc --model {} --seed 3 --out {} > /dev/null", bin, model,
                                (dir / "inproc.qtsr").string())),
            0);
  ASSERT_EQ(run_cmd(fmt::format("{} run-plain --model {} --seed 3 --out {} > /dev/null", bin, model,
                                (dir / "plain.qtsr").string())),
            0);
  EXPECT_EQ(slurp(dir / "tcp.qtsr"), slurp(dir / "inproc.qtsr"));
  EXPECT_EQ(slurp(dir / "tcp.qtsr"), slurp(dir / "plain.qtsr"));
  std::ifstream s(dir / "server.json"), c(dir / "client.json");
  const json sj = json::parse(s), cj = json::parse(c);
  EXPECT_EQ(sj["ledger"], cj["ledger"]);
  fs::remove_all(dir);
}

TEST(Process, ExitCodes) {
  const auto dir = temp_dir("exit");
  const std::string bin = WINO2PC_BIN;
  EXPECT_EQ(run_cmd(fmt::format("{} run-plain --model {} 2>/dev/null", bin, (dir / "missing.json").string())), 3);
  std::ofstream(dir / "table.json") << R"([{"layer":"a","bits":2,"omega":5,"comm_bits":10},
                                          {"layer":"a","bits":4,"omega":1,"comm_bits":20}])";
  EXPECT_EQ(run_cmd(fmt::format("{} assign-bits --table {} --zeta 5 2>/dev/null >/dev/null", bin,
                                (dir / "table.json").string())),
            3);
  EXPECT_EQ(run_cmd(fmt::format("{} assign-bits --table {} --zeta 20 > /dev/null --report {}", bin,
                                (dir / "table.json").string(), (dir / "r.json").string())),
            0);
  std::ifstream r(dir / "r.json");
  EXPECT_EQ(json::parse(r)["layers"][0]["bits"], 4);
  EXPECT_EQ(run_cmd(fmt::format("{} bogus-verb 2>/dev/null >/dev/null", bin)), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::kInvariantViolation), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::kInfeasible), 3);
  fs::remove_all(dir);
}

TEST(AssignBits, PassThroughAndModelUpdate) {
  const json one = json::parse(R"([{"layer":"conv","bits":2,"omega":5,"comm_bits":10},
                                   {"layer":"conv","bits":4,"omega":1,"comm_bits":20}])");
  EXPECT_EQ(cmd_assign_bits(one, 20, std::nullopt).bits, (std::vector<int>{4}));
  EXPECT_EQ(cmd_assign_bits(one, 15, std::nullopt).bits, (std::vector<int>{2}));
  EXPECT_EQ(code_of([&] { cmd_assign_bits(one, 9, std::nullopt); }), ErrorCode::kInfeasible);
  const auto m = model_from_json(conv_model(1, 1, 4, 4, std::vector<double>(9, 0.5)));
  const auto r = cmd_assign_bits(one, 15, m);
  ASSERT_TRUE(r.model.has_value());
  EXPECT_EQ((*r.model)["layers"][1]["l_w"], 2);
  EXPECT_NO_THROW(lower_model(model_from_json(*r.model)));

  std::mt19937_64 rng(2);
  json six = json::array();
  std::vector<quant::LayerSensitivity> sens;
  for (int l = 0; l < 6; ++l) {
    quant::LayerSensitivity s{fmt::format("l{}", l), {2, 4, 8}, {}, {}};
    double om = 100.0 + static_cast<double>(rng() % 100);
    uint64_t c = 10 + rng() % 10;
    for (int i = 0; i < 3; ++i) {
      s.omega.push_back(om);
      s.comm.push_back(c);
      om -= static_cast<double>(rng() % 40);
      c += 5 + rng() % 20;
    }
    sens.push_back(s);
  }
  const auto table = quant::sensitivity_to_json(sens);
  const auto ours = cmd_assign_bits(table, 150, std::nullopt);
  const auto bf = quant::assign_bits_exhaustive(sens, 150);
  EXPECT_EQ(ours.bits, bf.bits);
  EXPECT_EQ(ours.report["comm_total"].get<uint64_t>(), bf.comm);
}

TEST(QuantizeToy, ReportAndExport) {
  quant::ToyOptions opt;
  const auto j = cmd_quantize_toy(opt);
  EXPECT_GE(j["accuracy"].get<double>(), 0.95);
  EXPECT_EQ(j["losses"].size(), 51u);
  EXPECT_EQ(j["model"]["layers"][1]["kind"], "fc");
}

TEST(Parsing, PlanAndPeer) {
  EXPECT_EQ(parse_plan("F(2,3)"), 2);
  EXPECT_EQ(parse_plan("F(4, 3)"), 4);
  EXPECT_EQ(parse_plan("4"), 4);
  EXPECT_EQ(code_of([] { parse_plan("F(6,3)"); }), ErrorCode::kUnsupportedPlan);
  EXPECT_EQ(code_of([] { parse_plan("winograd"); }), ErrorCode::kInvalidParams);
  const auto p = parse_peer("10.0.0.2:9000");
  EXPECT_EQ(p.host, "10.0.0.2");
  EXPECT_EQ(p.port, 9000);
  EXPECT_EQ(parse_peer("9100").host, "127.0.0.1");
  EXPECT_EQ(code_of([] { parse_peer("host:x"); }), ErrorCode::kInvalidParams);
}

TEST(Table, AlignsColumns) {
  const auto t = format_table({{"a", "num"}, {"xyz", "5"}, {"b", "12345"}});
  EXPECT_EQ(t, "a    num  \n----------\nxyz      5\nb    12345\n");
}

}  // namespace
}  // namespace wino2pc::cli
