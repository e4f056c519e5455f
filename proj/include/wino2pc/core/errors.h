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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wino2pc {

enum class ErrorCode {
  kInvalidParams,
  kShapeMismatch,
  kParamMismatch,
  kInvalidWidths,
  kUnreachableTarget,
  kUnsupportedPlan,
  kOverflowRisk,
  kAccumulatorTooNarrow,
  kScaleUnalignable,
  kDegenerateStd,
  kNonFiniteLoss,
  kInfeasible,
  kProtocolError,
  kChannelClosed,
  kGraphError,
  kIoError,
  kInvariantViolation,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg);

#define WINO2PC_ENFORCE(cond, code, msg)   \
  do {                                     \
    if (!(cond)) ::wino2pc::fail(code, msg); \
  } while (0)

}  // namespace wino2pc
