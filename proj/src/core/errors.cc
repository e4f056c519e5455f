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

#include "wino2pc/core/errors.h"

namespace wino2pc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kParamMismatch: return "ParamMismatch";
    case ErrorCode::kInvalidWidths: return "InvalidWidths";
    case ErrorCode::kUnreachableTarget: return "UnreachableTarget";
    case ErrorCode::kUnsupportedPlan: return "UnsupportedPlan";
    case ErrorCode::kOverflowRisk: return "OverflowRisk";
    case ErrorCode::kAccumulatorTooNarrow: return "AccumulatorTooNarrow";
    case ErrorCode::kScaleUnalignable: return "ScaleUnalignable";
    case ErrorCode::kDegenerateStd: return "DegenerateStd";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kChannelClosed: return "ChannelClosed";
    case ErrorCode::kGraphError: return "GraphError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& msg)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
      code_(code) {}

void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace wino2pc
