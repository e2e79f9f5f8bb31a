// Copyright 2026 The MVPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvps/error.hpp"

namespace mvps {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroMass: return "ZeroMass";
    case ErrorCode::kSpaceMismatch: return "SpaceMismatch";
    case ErrorCode::kBadCoefficients: return "BadCoefficients";
    case ErrorCode::kEmptyPositivePart: return "EmptyPositivePart";
    case ErrorCode::kPositiveSupportRequired: return "PositiveSupportRequired";
    case ErrorCode::kBadPartition: return "BadPartition";
    case ErrorCode::kBadNullSet: return "BadNullSet";
    case ErrorCode::kSamplerFailure: return "SamplerFailure";
    case ErrorCode::kFiniteOnly: return "FiniteOnly";
    case ErrorCode::kBadQ: return "BadQ";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kHypothesisViolated: return "HypothesisViolated";
    case ErrorCode::kNegativeEntries: return "NegativeEntries";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace mvps
