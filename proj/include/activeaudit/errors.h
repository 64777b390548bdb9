// Copyright 2026 The ActiveAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTIVEAUDIT_ERRORS_H_
#define ACTIVEAUDIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace activeaudit {

enum class ErrorCode {
  kDuplicateId,
  kInconsistentDimension,
  kNonBinaryField,
  kParseError,
  kEmptyPool,
  kDimensionMismatch,
  kRemoteProtocolError,
  kTimeout,
  kInvalidProbability,
  kMissingScore,
  kDegenerateGroup,
  kCurveTooShort,
  kInvertedInterval,
  kInvalidRange,
  kInvalidArchitecture,
  kNonDifferentiableObjective,
  kSingularKernel,
  kUnfittedGp,
  kPoolExhausted,
  kInfeasibleCalibration,
  kPrecondition,
  kConfigError,
  kIoError,
};

const char* error_code_name(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above; the
// message holds the offending id/row/field.
class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorCode code, const std::string& detail);

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_ERRORS_H_
