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

#include "wino2pc/quant/ilp.h"

#include <algorithm>
#include <limits>
#include <tuple>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::quant {
namespace {

bool better(const BitAssignment& a, const BitAssignment& b) {
  return std::tie(a.omega, a.comm, a.bits) < std::tie(b.omega, b.comm, b.bits);
}

void check_feasible(std::span<const LayerSensitivity> sens, uint64_t zeta) {
  uint64_t least = 0;
  for (const auto& l : sens) {
    l.validate();
    least += *std::min_element(l.comm.begin(), l.comm.end());
  }
  WINO2PC_ENFORCE(least <= zeta, ErrorCode::kInfeasible,
                  fmt::format("budget {} below the minimum communication {}", zeta, least));
}

}  // namespace

BitAssignment assign_bits_ilp(std::span<const LayerSensitivity> sens, uint64_t zeta) {
  check_feasible(sens, zeta);
  std::vector<BitAssignment> states{BitAssignment{}};
  for (const auto& l : sens) {
    std::vector<BitAssignment> next;
    for (const auto& s : states) {
      for (size_t i = 0; i < l.size(); ++i) {
        if (s.comm + l.comm[i] > zeta) continue;
        BitAssignment t = s;
        t.bits.push_back(l.bits[i]);
        t.omega += l.omega[i];
        t.comm += l.comm[i];
        next.push_back(std::move(t));
      }
    }
    // Keep a state only if no better-ranked state is at least as cheap.
    std::sort(next.begin(), next.end(), better);
    states.clear();
    uint64_t cheapest = std::numeric_limits<uint64_t>::max();
    for (auto& s : next) {
      if (s.comm < cheapest) {
        cheapest = s.comm;
        states.push_back(std::move(s));
      }
    }
  }
  return states.front();
}

BitAssignment assign_bits_exhaustive(std::span<const LayerSensitivity> sens, uint64_t zeta) {
  WINO2PC_ENFORCE(sens.size() <= 12, ErrorCode::kInvalidParams,
                  "exhaustive search limited to 12 layers");
  check_feasible(sens, zeta);
  std::vector<size_t> pick(sens.size(), 0);
  BitAssignment best;
  bool found = false;
  while (true) {
    BitAssignment a;
    for (size_t i = 0; i < sens.size(); ++i) {
      a.bits.push_back(sens[i].bits[pick[i]]);
      a.omega += sens[i].omega[pick[i]];
      a.comm += sens[i].comm[pick[i]];
    }
    if (a.comm <= zeta && (!found || better(a, best))) {
      best = std::move(a);
      found = true;
    }
    size_t i = 0;
    while (i < pick.size() && ++pick[i] == sens[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return best;
}

}  // namespace wino2pc::quant
