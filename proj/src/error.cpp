// Copyright (c) 2026 The tripoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripoint/error.hpp"

namespace tripoint {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kDegenerateExtent: return "DegenerateExtent";
    case ErrorCode::kBadCount: return "BadCount";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kBadThreshold: return "BadThreshold";
    case ErrorCode::kEmptyReferenceSet: return "EmptyReferenceSet";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kAxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::kNotScalarLoss: return "NotScalarLoss";
    case ErrorCode::kMissingGrad: return "MissingGrad";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDegenerateOcclusion: return "DegenerateOcclusion";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kBadFormat: return "BadFormat";
    case ErrorCode::kUnsupportedIsa: return "UnsupportedIsa";
  }
  return "Unknown";
}

}  // namespace tripoint
