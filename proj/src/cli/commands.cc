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

#include "wino2pc/cli/commands.h"

#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "wino2pc/cli/tcp.h"
#include "wino2pc/core/tensor_io.h"
#include "wino2pc/graph/estimate.h"
#include "wino2pc/graph/exec.h"
#include "wino2pc/graph/random_graph.h"
#include "wino2pc/graph/serialize.h"
#include "wino2pc/quant/ilp.h"
#include "wino2pc/quant/sensitivity.h"

namespace wino2pc::cli {

using nlohmann::json;

namespace {

json totals_json(const net::LedgerTotals& t) {
  return {{"modeled_offline", t.modeled_offline}, {"modeled_online", t.modeled_online},
          {"modeled", t.modeled()},               {"wire_offline", t.wire_offline},
          {"wire_online", t.wire_online},         {"wire", t.wire()}};
}

json shape_json(const QTensor& t) { return t.shape(); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  WINO2PC_ENFORCE(out.good(), ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void check_ledger(const net::CommLedger& ledger, const graph::Graph& g,
                  const proto::CostModel& cost) {
  const auto est = graph::estimate_comm(g, cost);
  WINO2PC_ENFORCE(graph::same_modeled(ledger, est.records), ErrorCode::kInvariantViolation,
                  fmt::format("executed ledger ({} bits) differs from the estimate ({} bits)",
                              ledger.totals().modeled(), est.total()));
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kProtocolError:
      return 2;
    case ErrorCode::kChannelClosed:
      return 1;
    default:
      return 3;
  }
}

int parse_plan(const std::string& plan) {
  static const std::regex re(R"(\s*(?:F\(\s*)?([0-9]+)\s*(?:,\s*3\s*\))?\s*)");
  std::smatch mt;
  WINO2PC_ENFORCE(std::regex_match(plan, mt, re), ErrorCode::kInvalidParams,
                  "plan must look like F(2,3) or F(4,3)");
  const int m = std::stoi(mt[1].str());
  WINO2PC_ENFORCE(m == 2 || m == 4, ErrorCode::kUnsupportedPlan,
                  fmt::format("unsupported plan F({},3)", m));
  return m;
}

proto::CostModel cost_model(const RunOptions& opt) {
  WINO2PC_ENFORCE(opt.lambda > 0, ErrorCode::kInvalidParams, "lambda must be positive");
  proto::CostModel c;
  c.lambda = opt.lambda;
  return c;
}

graph::Graph prepare_graph(const Model& m, const RunOptions& opt) {
  LowerOptions lo;
  lo.m = opt.m;
  lo.force_direct = opt.force_direct;
  if (opt.weights_dir) lo.weights = load_transformed_weights(*opt.weights_dir);
  return graph::run_pipeline(lower_model(m, lo).graph, opt.passes, cost_model(opt));
}

QTensor model_input(const graph::Graph& g, const std::optional<fs::path>& file, uint64_t seed) {
  const graph::Node& in = g.node(g.input_id());
  if (!file) {
    std::mt19937_64 rng(seed);
    return graph::random_input(rng, g);
  }
  QTensor t = load_qtensor(file->string());
  WINO2PC_ENFORCE(t.shape() == in.shape, ErrorCode::kShapeMismatch, "input tensor shape mismatch");
  WINO2PC_ENFORCE(t.params().same_format(in.params), ErrorCode::kParamMismatch,
                  "input tensor format mismatch");
  return t;
}

json ledger_report(const net::CommLedger& ledger) {
  json by_protocol = json::object(), by_label = json::object();
  for (const auto& [k, v] : ledger.by_protocol()) by_protocol[k] = totals_json(v);
  for (const auto& [k, v] : ledger.by_label()) by_label[k] = totals_json(v);
  return {{"records", ledger.to_json()},
          {"totals", totals_json(ledger.totals())},
          {"by_protocol", by_protocol},
          {"by_label", by_label}};
}

json cmd_transform_weights(const Model& m, int plan_m, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  LowerOptions lo;
  lo.m = plan_m;
  const auto lowered = lower_model(m, lo);
  json files = json::array();
  for (const auto& n : lowered.graph.nodes()) {
    if (n.kind != graph::NodeKind::kGemm) continue;
    // label is <layer>/block4, <layer>/gemm or <layer>/gemm for fc
    const auto layer = n.label.substr(0, n.label.rfind('/'));
    json doc = gemm_spec_to_json(*n.gemm);
    doc["layer"] = layer;
    const auto path = out_dir / (layer + ".wq.json");
    write_json(path, doc);
    files.push_back({{"layer", layer}, {"file", path.string()}, {"kind", doc["kind"]},
                     {"bit_importance", doc["bit_importance"]}, {"scale_exp", doc["scale_exp"]}});
  }
  return {{"command", "transform-weights"}, {"files", files}};
}

std::map<std::string, std::shared_ptr<const graph::GemmSpec>> load_transformed_weights(
    const fs::path& dir) {
  WINO2PC_ENFORCE(fs::is_directory(dir), ErrorCode::kIoError, "no weight directory " + dir.string());
  std::map<std::string, std::shared_ptr<const graph::GemmSpec>> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() < 8 || name.substr(name.size() - 8) != ".wq.json") continue;
    std::ifstream in(e.path());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& ex) {
      fail(ErrorCode::kInvalidParams, fmt::format("{}: {}", e.path().string(), ex.what()));
    }
    out[j.at("layer").get<std::string>()] = std::make_shared<graph::GemmSpec>(gemm_spec_from_json(j));
  }
  return out;
}

OptimizeResult cmd_optimize_graph(const Model& m, const RunOptions& opt) {
  OptimizeResult r;
  const auto cost = cost_model(opt);
  LowerOptions lo;
  lo.m = opt.m;
  lo.force_direct = opt.force_direct;
  if (opt.weights_dir) lo.weights = load_transformed_weights(*opt.weights_dir);
  r.before = lower_model(m, lo).graph;
  r.after = graph::run_pipeline(r.before, opt.passes, cost, &r.steps);
  const auto eb = graph::estimate_comm(r.before, cost);
  const auto ea = graph::estimate_comm(r.after, cost);

  json steps = json::array();
  std::vector<std::vector<std::string>> rows{{"round", "pass", "before", "after", "delta"}};
  for (const auto& s : r.steps) {
    const int64_t delta = static_cast<int64_t>(s.after) - static_cast<int64_t>(s.before);
    steps.push_back({{"round", s.round}, {"pass", s.pass}, {"before", s.before}, {"after", s.after},
                     {"delta", delta}});
    rows.push_back({std::to_string(s.round), s.pass, std::to_string(s.before),
                    std::to_string(s.after), std::to_string(delta)});
  }
  std::vector<std::vector<std::string>> proto_rows{{"protocol", "before", "after"}};
  const auto pb = eb.records.by_protocol(), pa = ea.records.by_protocol();
  std::set<std::string> names;
  for (const auto& [k, v] : pb) names.insert(k);
  for (const auto& [k, v] : pa) names.insert(k);
  for (const auto& k : names) {
    proto_rows.push_back({k, std::to_string(pb.count(k) ? pb.at(k).modeled() : 0),
                          std::to_string(pa.count(k) ? pa.at(k).modeled() : 0)});
  }
  proto_rows.push_back({"total", std::to_string(eb.total()), std::to_string(ea.total())});
  r.table = format_table(rows) + "\n" + format_table(proto_rows);
  r.report = {{"command", "optimize-graph"},
              {"lambda", opt.lambda},
              {"passes", opt.passes},
              {"steps", steps},
              {"before", ledger_report(eb.records)},
              {"after", ledger_report(ea.records)},
              {"nodes_before", r.before.size()},
              {"nodes_after", r.after.size()}};
  return r;
}

RunResult cmd_run_plain(const Model& m, const std::optional<fs::path>& input, const RunOptions& opt) {
  const auto g = prepare_graph(m, opt);
  const QTensor x = model_input(g, input, opt.seed);
  RunResult r;
  r.output = graph::run_plain(g, x);
  r.report = {{"command", "run-plain"}, {"seed", opt.seed}, {"output_shape", shape_json(*r.output)}};
  return r;
}

RunResult cmd_run_2pc_inproc(const Model& m, const std::optional<fs::path>& input,
                             const RunOptions& opt) {
  const auto g = prepare_graph(m, opt);
  const QTensor x = model_input(g, input, opt.seed);
  net::SessionConfig cfg;
  cfg.seed = opt.seed;
  cfg.cost = cost_model(opt);
  auto res = graph::run_2pc_inproc(g, x, cfg);
  const QTensor plain = graph::run_plain(g, x);
  WINO2PC_ENFORCE(res.output.data() == plain.data() && res.output.params() == plain.params(),
                  ErrorCode::kInvariantViolation, "2PC output differs from the plaintext oracle");
  check_ledger(res.ledger, g, cfg.cost);
  RunResult r;
  r.output = std::move(res.output);
  r.ledger = std::move(res.ledger);
  r.report = {{"command", "run-2pc"},
              {"transport", "inproc"},
              {"seed", opt.seed},
              {"lambda", opt.lambda},
              {"output_shape", shape_json(*r.output)},
              {"matches_plain", true},
              {"gemm_mults", res.counters.gemm_mults},
              {"ots", res.counters.ots},
              {"ledger", ledger_report(r.ledger)}};
  return r;
}

Peer parse_peer(const std::string& s) {
  const auto colon = s.rfind(':');
  Peer p;
  try {
    if (colon == std::string::npos) {
      p.port = static_cast<uint16_t>(std::stoul(s));
    } else {
      p.host = s.substr(0, colon);
      const unsigned long port = std::stoul(s.substr(colon + 1));
      WINO2PC_ENFORCE(port > 0 && port < 65535, ErrorCode::kInvalidParams, "port out of range");
      p.port = static_cast<uint16_t>(port);
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::kInvalidParams, "peer must be host:port");
  }
  if (p.host.empty()) p.host = "127.0.0.1";
  return p;
}

RunResult cmd_run_2pc_tcp(const Model& m, Role role, const Peer& peer,
                          const std::optional<fs::path>& input, const RunOptions& opt) {
  const auto g = prepare_graph(m, opt);
  net::SessionConfig cfg;
  cfg.seed = opt.seed;
  cfg.cost = cost_model(opt);
  RunResult r;
  if (role == Role::kServer) {
    net::TcpListener peer_l(peer.port);
    net::TcpListener dealer_l(static_cast<uint16_t>(peer.port + 1));
    r.ledger = serve_2pc_tcp(g, peer_l, dealer_l, cfg);
  } else {
    const auto pub = g.public_view();
    const QTensor x = model_input(pub, input, opt.seed);
    auto c = connect_2pc_tcp(pub, x, peer.host, peer.port, static_cast<uint16_t>(peer.port + 1), cfg);
    r.output = std::move(c.output);
    r.ledger = std::move(c.ledger);
  }
  check_ledger(r.ledger, g, cfg.cost);
  r.report = {{"command", "run-2pc"},
              {"transport", "tcp"},
              {"role", role == Role::kServer ? "server" : "client"},
              {"seed", opt.seed},
              {"lambda", opt.lambda},
              {"ledger", ledger_report(r.ledger)}};
  if (r.output) r.report["output_shape"] = shape_json(*r.output);
  return r;
}

AssignResult cmd_assign_bits(const json& table, uint64_t zeta, const std::optional<Model>& model) {
  const auto sens = quant::sensitivity_from_json(table);
  const auto a = quant::assign_bits_ilp(sens, zeta);
  AssignResult r;
  r.bits = a.bits;
  r.omega = a.omega;
  r.comm = a.comm;
  json layers = json::array();
  for (size_t i = 0; i < sens.size(); ++i) layers.push_back({{"layer", sens[i].layer}, {"bits", a.bits[i]}});
  r.report = {{"command", "assign-bits"}, {"zeta", zeta},         {"layers", layers},
              {"omega_total", a.omega},   {"comm_total", a.comm}};
  if (model) {
    json doc = model->doc;
    std::map<std::string, int> chosen;
    for (size_t i = 0; i < sens.size(); ++i) chosen[sens[i].layer] = a.bits[i];
    for (auto& l : doc["layers"]) {
      auto it = chosen.find(l["name"].get<std::string>());
      if (it == chosen.end()) continue;
      l["l_w"] = it->second;
      // a fixed importance of another width no longer applies
      if (l.contains("bit_importance") && static_cast<int>(l["bit_importance"].size()) != it->second) {
        l.erase("bit_importance");
      }
      chosen.erase(it);
    }
    WINO2PC_ENFORCE(chosen.empty(), ErrorCode::kInvalidParams,
                    "sensitivity table names layer " + (chosen.empty() ? "" : chosen.begin()->first) +
                        " that the model does not have");
    r.model = std::move(doc);
  }
  return r;
}

json cmd_quantize_toy(const quant::ToyOptions& opt, quant::ToyResult* result) {
  auto t = quant::finetune_toy(opt);
  json j = {{"command", "quantize-toy"},
            {"epochs", opt.epochs},
            {"l_w", opt.lw},
            {"seed", opt.seed},
            {"accuracy", t.accuracy},
            {"losses", t.losses},
            {"weights", t.weights},
            {"bias", t.bias},
            {"model", t.to_model_json()}};
  if (result) *result = std::move(t);
  return j;
}

std::string format_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      if (i) os << "  ";
      const auto& cell = rows[r][i];
      const bool numeric = !cell.empty() && cell.find_first_not_of("-0123456789.") == std::string::npos;
      if (!numeric || r == 0) {
        os << fmt::format("{:<{}}", rows[r][i], width[i]);
      } else {
        os << fmt::format("{:>{}}", rows[r][i], width[i]);
      }
    }
    os << "\n";
    if (r == 0) {
      size_t total = 0;
      for (size_t w : width) total += w;
      os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
    }
  }
  return os.str();
}

}  // namespace wino2pc::cli
