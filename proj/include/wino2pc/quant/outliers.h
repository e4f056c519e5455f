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

// Outlier statistics of Winograd-domain weights and bit re-weighting.

#pragma once

#include <span>

#include "wino2pc/linear/bit_importance.h"

namespace wino2pc::quant {

inline constexpr double kDefaultOutlierThreshold = 4.0;

/// (max(w) - mean(w)) / std(w) with the population std. Throws
/// kDegenerateStd when std is zero (or w is empty).
double zscore(std::span<const double> w);

bool has_outliers(std::span<const double> w, double threshold = kDefaultOutlierThreshold);

/// {2^lw, 2^(lw-2), ..., 2, 1}: the head of the standard importance doubled.
linear::BitImportance reweight_bits(int lw);

/// |w* - q(w*)| for the element w* of largest magnitude, where q rounds
/// w * 2^scale_exp to the nearest representable value.
double max_magnitude_clip_error(std::span<const double> w, const linear::BitImportance& imp,
                                int scale_exp);

}  // namespace wino2pc::quant
