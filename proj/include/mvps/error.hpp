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

#ifndef MVPS_ERROR_HPP_
#define MVPS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mvps {

// Numeric values are mirrored by mvps_status in mvps.h.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kZeroMass = 2,
  kSpaceMismatch = 3,
  kBadCoefficients = 4,
  kEmptyPositivePart = 5,
  kPositiveSupportRequired = 6,
  kBadPartition = 7,
  kBadNullSet = 8,
  kSamplerFailure = 9,
  kFiniteOnly = 10,
  kBadQ = 11,
  kTooLarge = 12,
  kHypothesisViolated = 13,
  kNegativeEntries = 14,
  kConfigInvalid = 15,
  kIo = 16,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Absolute tolerance for every exact (enumeration-based) comparison.
inline constexpr double kTol = 1e-12;

}  // namespace mvps

#endif  // MVPS_ERROR_HPP_
