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

#include "wino2pc/proto/cost_model.h"

#include <string>

#include "wino2pc/core/errors.h"

namespace wino2pc::proto {
namespace {
uint64_t u(int v) { return static_cast<uint64_t>(v); }
}  // namespace

uint64_t CostModel::ext(int l1, int l2, bool msb_known) const {
  if (msb_known && msb_discount) return u(lambda) + u(l1) + u(l2);
  return u(lambda) * u(l1 + 1) + 13 * u(l1) + u(l2);
}

uint64_t CostModel::trunc(int l1, int shift, bool msb_known) const {
  if (msb_known && msb_discount) return u(lambda) * u(l1 + 1) + 13 * u(l1);
  return u(lambda) * u(l1 + 3) + 15 * u(l1) + u(shift) + 20;
}

uint64_t CostModel::truncate_reduce(int l1, int shift) const {
  return u(lambda) * u(shift + 1) + 13 * u(shift) + u(l1);
}

uint64_t CostModel::relu(int l) const { return u(lambda) * u(l + 2) + 14 * u(l); }

uint64_t CostModel::per_element(std::string_view protocol, int a, int b,
                                bool msb_known) const {
  if (protocol == "ext") return ext(a, b, msb_known);
  if (protocol == "trunc") return trunc(a, b, msb_known);
  if (protocol == "tr") return truncate_reduce(a, b);
  if (protocol == "relu") return relu(a);
  fail(ErrorCode::kInvalidParams, "no cost formula for " + std::string(protocol));
}

}  // namespace wino2pc::proto
