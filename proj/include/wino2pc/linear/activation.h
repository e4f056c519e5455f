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

// Two-party ReLU and residual additions.

#pragma once

#include "wino2pc/core/qtensor.h"
#include "wino2pc/net/party.h"
#include "wino2pc/net/share.h"

namespace wino2pc::linear {

using net::Party;
using net::Share;

/// max(0, x) via a secure MSB and a Beaver multiplication. The output is
/// flagged msb_known_nonneg.
Share relu_2pc(Party& p, const Share& x);
QTensor relu_plain(const QTensor& x);

/// Aligns `residual` to the width and scale of `main` (extension plus local
/// left shift) and adds. Fails with kScaleUnalignable if the residual scale
/// is finer than the main branch or the shifted residual cannot fit.
Share residual_add_simplified(Party& p, const Share& main, const Share& residual);

/// Extends both branches to main.bits + 1 before the aligned addition.
Share residual_add_baseline(Party& p, const Share& main, const Share& residual);

/// Plaintext aligned addition into a `bits`-wide ring at main's scale.
QTensor residual_add_plain(const QTensor& main, const QTensor& residual, int bits);

}  // namespace wino2pc::linear
