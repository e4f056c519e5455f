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

// JSON form of the protocol graph.

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "wino2pc/graph/ir.h"

namespace wino2pc::graph {

nlohmann::json graph_to_json(const Graph& g);
/// Validates structure and types; throws kGraphError.
Graph graph_from_json(const nlohmann::json& j);

void save_graph(const std::string& path, const Graph& g);
Graph load_graph(const std::string& path);

}  // namespace wino2pc::graph
