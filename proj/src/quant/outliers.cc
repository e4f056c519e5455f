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

#include "wino2pc/quant/outliers.h"

#include <cmath>
#include <numeric>

#include "wino2pc/core/errors.h"

namespace wino2pc::quant {

double zscore(std::span<const double> w) {
  WINO2PC_ENFORCE(!w.empty(), ErrorCode::kDegenerateStd, "z-score of an empty tensor");
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double var = 0.0, mx = w[0];
  for (double v : w) {
    var += (v - mean) * (v - mean);
    mx = std::max(mx, v);
  }
  const double sd = std::sqrt(var / n);
  WINO2PC_ENFORCE(sd > 0.0 && std::isfinite(sd), ErrorCode::kDegenerateStd,
                  "z-score undefined: zero standard deviation");
  return (mx - mean) / sd;
}

bool has_outliers(std::span<const double> w, double threshold) {
  if (std::isinf(threshold) && threshold > 0) return false;
  return zscore(w) > threshold;
}

linear::BitImportance reweight_bits(int lw) { return linear::BitImportance::reweighted(lw); }

double max_magnitude_clip_error(std::span<const double> w, const linear::BitImportance& imp,
                                int scale_exp) {
  WINO2PC_ENFORCE(!w.empty(), ErrorCode::kInvalidParams, "empty tensor");
  double big = w[0];
  for (double v : w) {
    if (std::abs(v) > std::abs(big)) big = v;
  }
  const double q = std::ldexp(static_cast<double>(imp.nearest(std::ldexp(big, scale_exp))), -scale_exp);
  return std::abs(big - q);
}

}  // namespace wino2pc::quant
