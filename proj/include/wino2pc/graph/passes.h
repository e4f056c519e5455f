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

// Rewrite passes over the protocol graph. Each pass is a pure function; a
// candidate rewrite is kept only if the rewritten graph type-checks and its
// estimated communication does not grow.

#pragma once

#include <string>
#include <vector>

#include "wino2pc/graph/ir.h"
#include "wino2pc/proto/cost_model.h"

namespace wino2pc::graph {

/// Trunc(l1, s) -> TR(l1, s); Ext(l1 - s, l1).
Graph decompose_trunc(const Graph& g, const proto::CostModel& cost = {});
/// Moves an Ext up through FeatureTransform / Gemm / OutputTransform nodes
/// (running them in the wider ring) and merges it with an Ext found there.
Graph fuse_across_local(const Graph& g, const proto::CostModel& cost = {});
/// Ext; Ext -> Ext. Ext; Narrow -> Narrow or Ext. Narrow; Narrow -> Narrow.
Graph fuse_ext_ext(const Graph& g, const proto::CostModel& cost = {});
/// Trunc; Ext -> TR; Ext. Trunc; Narrow -> TR (; Narrow or Ext).
Graph fuse_trunc_ext(const Graph& g, const proto::CostModel& cost = {});
/// Baseline residual additions -> simplified ones where the sum provably fits.
Graph simplify_residual(const Graph& g, const proto::CostModel& cost = {});
/// Marks Ext / Trunc / Requant nodes whose input is known nonnegative.
Graph propagate_msb(const Graph& g, const proto::CostModel& cost = {});

const std::vector<std::string>& pass_names();
/// decompose_trunc, fuse_across_local, fuse_ext_ext, fuse_trunc_ext,
/// simplify_residual, propagate_msb.
const std::vector<std::string>& default_pipeline();
Graph run_pass(const std::string& name, const Graph& g, const proto::CostModel& cost = {});

struct PassStep {
  int round = 0;
  std::string pass;
  uint64_t before = 0;
  uint64_t after = 0;
};

/// Runs `passes` in order, repeating the sequence until the graph stops
/// changing. Every application is appended to `steps` when given.
Graph run_pipeline(const Graph& g, const std::vector<std::string>& passes,
                   const proto::CostModel& cost = {}, std::vector<PassStep>* steps = nullptr);

}  // namespace wino2pc::graph
