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

#include "wino2pc/quant/bsq.h"

#include <cmath>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::quant {
namespace {

double denom(int lw) {
  WINO2PC_ENFORCE(lw >= 1 && lw <= 30, ErrorCode::kInvalidParams,
                  fmt::format("bit width {} out of range", lw));
  return std::ldexp(1.0, lw) - 1.0;
}

double weight(const linear::BitImportance& imp, int index, const BsqOptions& opt) {
  const double w = static_cast<double>(imp.weights()[static_cast<size_t>(index)]);
  return opt.twos_complement && index == 0 ? -w : w;
}

}  // namespace

double bsq_forward(std::span<const double> bits, const linear::BitImportance& imp, double s,
                   int lw, const BsqOptions& opt) {
  WINO2PC_ENFORCE(static_cast<int>(bits.size()) == imp.bits(), ErrorCode::kInvalidParams,
                  fmt::format("{} bits for a {}-entry importance", bits.size(), imp.bits()));
  double acc = 0.0;
  for (size_t i = 0; i < bits.size(); ++i) {
    WINO2PC_ENFORCE(bits[i] >= 0.0 && bits[i] <= 1.0, ErrorCode::kInvalidParams,
                    "relaxed bits must lie in [0, 1]");
    acc += bits[i] * weight(imp, static_cast<int>(i), opt);
  }
  if (opt.round) acc = std::nearbyint(acc);
  return s * acc / denom(lw);
}

double bsq_backward(double upstream, int b, int lw) {
  WINO2PC_ENFORCE(b >= 0 && b < lw, ErrorCode::kInvalidParams, "bit position out of range");
  return std::ldexp(1.0, b) / denom(lw) * upstream;
}

double bsq_backward(double upstream, int b, const linear::BitImportance& imp, double s, int lw,
                    const BsqOptions& opt) {
  WINO2PC_ENFORCE(b >= 0 && b < imp.bits(), ErrorCode::kInvalidParams,
                  "bit position out of range");
  const int index = imp.bits() - 1 - b;
  return upstream * s * weight(imp, index, opt) / denom(lw);
}

}  // namespace wino2pc::quant
