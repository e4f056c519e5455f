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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wino2pc/cli/commands.h"
#include "wino2pc/core/tensor_io.h"
#include "wino2pc/graph/serialize.h"

namespace {

using namespace wino2pc;
using nlohmann::json;

struct Flags {
  std::string model;
  std::string plan;
  int lambda = 128;
  uint64_t seed = 1;
  std::string transport = "inproc";
  std::string role;
  std::string peer = "127.0.0.1:9400";
  std::string report;
  std::string input;
  std::string out;
  std::string passes = "default";
  std::string weights;
  bool direct = false;
  std::string table;
  uint64_t zeta = 0;
  int epochs = 50;
  int lw = 4;
  bool reweight = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIoError, "cannot write " + path);
  f << text;
}

void emit_report(const Flags& f, const json& report) {
  if (!f.report.empty()) write_text(f.report, report.dump(2) + "\n");
}

std::vector<std::string> split_passes(const std::string& s) {
  if (s == "default") return graph::default_pipeline();
  std::vector<std::string> out;
  if (s == "none" || s.empty()) return out;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = s.find(',', start);
    const auto name = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) out.push_back(name);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

cli::RunOptions run_options(const Flags& f) {
  cli::RunOptions o;
  o.seed = f.seed;
  o.lambda = f.lambda;
  o.m = f.plan.empty() ? 0 : cli::parse_plan(f.plan);
  o.force_direct = f.direct;
  o.passes = split_passes(f.passes);
  if (!f.weights.empty()) o.weights_dir = f.weights;
  return o;
}

std::optional<cli::fs::path> input_path(const Flags& f) {
  if (f.input.empty()) return std::nullopt;
  return cli::fs::path(f.input);
}

void print_ledger_summary(const json& ledger) {
  const auto& t = ledger["totals"];
  fmt::print("modeled bits: {} (offline {}, online {})\n", t["modeled"].get<uint64_t>(),
             t["modeled_offline"].get<uint64_t>(), t["modeled_online"].get<uint64_t>());
  fmt::print("wire bits:    {} (offline {}, online {})\n", t["wire"].get<uint64_t>(),
             t["wire_offline"].get<uint64_t>(), t["wire_online"].get<uint64_t>());
}

int run(int argc, char** argv) {
  CLI::App app{"wino2pc: quantized Winograd convolution for two-party inference"};
  app.require_subcommand(1);
  Flags f;

  auto add_model = [&](CLI::App* c) { c->add_option("--model", f.model, "Model JSON")->required(); };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--plan", f.plan, "Winograd plan for every conv layer, F(2,3) or F(4,3)");
    c->add_option("--lambda", f.lambda, "Security parameter used by the cost model");
    c->add_option("--seed", f.seed, "Session and input seed");
    c->add_option("--report", f.report, "Write the JSON report here");
    c->add_option("--passes", f.passes, "Comma-separated passes, 'default' or 'none'");
    c->add_option("--weights", f.weights, "Directory written by transform-weights");
    c->add_flag("--direct", f.direct, "Lower conv layers to the direct per-bit convolution");
  };

  auto* tw = app.add_subcommand("transform-weights", "Write Winograd-domain quantized weights");
  add_model(tw);
  tw->add_option("--plan", f.plan, "Winograd plan, F(2,3) or F(4,3)");
  tw->add_option("--out", f.out, "Output directory")->required();
  tw->add_option("--report", f.report, "Write the JSON report here");

  auto* og = app.add_subcommand("optimize-graph", "Run the pass pipeline and report estimates");
  add_model(og);
  add_common(og);
  og->add_option("--out", f.out, "Write the optimized graph JSON here");

  auto* r2 = app.add_subcommand("run-2pc", "Execute the model between two parties");
  add_model(r2);
  add_common(r2);
  r2->add_option("--transport", f.transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
  r2->add_option("--role", f.role, "server or client (tcp)")->check(CLI::IsMember({"server", "client"}));
  r2->add_option("--peer", f.peer, "host:port of the server (dealer on port + 1)");
  r2->add_option("--input", f.input, "Client input tensor (.qtsr); seeded random if absent");
  r2->add_option("--out", f.out, "Write the reconstructed output tensor here (client)");

  auto* rp = app.add_subcommand("run-plain", "Plaintext quantized execution (the oracle)");
  add_model(rp);
  add_common(rp);
  rp->add_option("--input", f.input, "Input tensor (.qtsr); seeded random if absent");
  rp->add_option("--out", f.out, "Write the output tensor here");

  auto* ab = app.add_subcommand("assign-bits", "Choose per-layer weight widths under a budget");
  ab->add_option("--table", f.table, "Sensitivity table JSON")->required();
  ab->add_option("--zeta", f.zeta, "Communication budget in modeled bits")->required();
  ab->add_option("--model", f.model, "Model JSON to update");
  ab->add_option("--out", f.out, "Write the updated model here");
  ab->add_option("--report", f.report, "Write the JSON report here");

  auto* qt = app.add_subcommand("quantize-toy", "Bit-level quantization-aware training on toy data");
  qt->add_option("--epochs", f.epochs, "Training epochs");
  qt->add_option("--lw", f.lw, "Weight bit width");
  qt->add_option("--seed", f.seed, "Data and init seed");
  qt->add_flag("--reweight", f.reweight, "Use the re-weighted bit importance");
  qt->add_option("--out", f.out, "Write the exported model here");
  qt->add_option("--report", f.report, "Write the JSON report here");

  auto* iw = app.add_subcommand("init-weights", "Create missing weight files with seeded values");
  add_model(iw);
  iw->add_option("--seed", f.seed, "Weight seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (tw->parsed()) {
    const auto m = cli::load_model(f.model);
    const auto report = cli::cmd_transform_weights(m, f.plan.empty() ? 0 : cli::parse_plan(f.plan), f.out);
    for (const auto& file : report["files"]) fmt::print("{}\n", file["file"].get<std::string>());
    emit_report(f, report);
  } else if (og->parsed()) {
    const auto m = cli::load_model(f.model);
    const auto r = cli::cmd_optimize_graph(m, run_options(f));
    fmt::print("{}", r.table);
    if (!f.out.empty()) graph::save_graph(f.out, r.after);
    emit_report(f, r.report);
  } else if (r2->parsed()) {
    const auto m = cli::load_model(f.model);
    const auto opt = run_options(f);
    cli::RunResult r;
    if (f.transport == "inproc") {
      r = cli::cmd_run_2pc_inproc(m, input_path(f), opt);
    } else {
      if (f.role.empty()) fail(ErrorCode::kInvalidParams, "tcp transport needs --role");
      r = cli::cmd_run_2pc_tcp(m, f.role == "server" ? cli::Role::kServer : cli::Role::kClient,
                               cli::parse_peer(f.peer), input_path(f), opt);
    }
    if (r.output && !f.out.empty()) save_qtensor(f.out, *r.output);
    print_ledger_summary(r.report["ledger"]);
    emit_report(f, r.report);
  } else if (rp->parsed()) {
    const auto m = cli::load_model(f.model);
    const auto r = cli::cmd_run_plain(m, input_path(f), run_options(f));
    if (!f.out.empty()) save_qtensor(f.out, *r.output);
    fmt::print("output shape [{}]\n", fmt::join(r.output->shape(), ", "));
    emit_report(f, r.report);
  } else if (ab->parsed()) {
    std::ifstream in(f.table);
    if (!in) fail(ErrorCode::kIoError, "cannot read " + f.table);
    json table;
    try {
      table = json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorCode::kInvalidParams, e.what());
    }
    std::optional<cli::Model> model;
    if (!f.model.empty()) model = cli::load_model(f.model);
    const auto r = cli::cmd_assign_bits(table, f.zeta, model);
    fmt::print("bits: [{}]\nomega total: {}\ncomm total: {}\n", fmt::join(r.bits, ", "), r.omega, r.comm);
    if (r.model && !f.out.empty()) write_text(f.out, r.model->dump(2) + "\n");
    emit_report(f, r.report);
  } else if (qt->parsed()) {
    quant::ToyOptions o;
    o.epochs = f.epochs;
    o.lw = f.lw;
    o.seed = f.seed;
    o.reweight = f.reweight;
    const auto report = cli::cmd_quantize_toy(o);
    fmt::print("accuracy: {:.3f}\nloss: {:.4f} -> {:.4f}\n", report["accuracy"].get<double>(),
               report["losses"].front().get<double>(), report["losses"].back().get<double>());
    if (!f.out.empty()) write_text(f.out, report["model"].dump(2) + "\n");
    emit_report(f, report);
  } else if (iw->parsed()) {
    const auto m = cli::load_model(f.model);
    for (const auto& p : cli::init_missing_weights(m, f.seed)) fmt::print("{}\n", p);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wino2pc::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(wino2pc::error_code_name(e.code())).c_str(),
                 e.what());
    return wino2pc::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
