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

#include "activeaudit/errors.h"

namespace activeaudit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInconsistentDimension: return "InconsistentDimension";
    case ErrorCode::kNonBinaryField: return "NonBinaryField";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRemoteProtocolError: return "RemoteProtocolError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kDegenerateGroup: return "DegenerateGroup";
    case ErrorCode::kCurveTooShort: return "CurveTooShort";
    case ErrorCode::kInvertedInterval: return "InvertedInterval";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kInvalidArchitecture: return "InvalidArchitecture";
    case ErrorCode::kNonDifferentiableObjective: return "NonDifferentiableObjective";
    case ErrorCode::kSingularKernel: return "SingularKernel";
    case ErrorCode::kUnfittedGp: return "UnfittedGP";
    case ErrorCode::kPoolExhausted: return "PoolExhausted";
    case ErrorCode::kInfeasibleCalibration: return "InfeasibleCalibration";
    case ErrorCode::kPrecondition: return "PreconditionViolation";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

AuditError::AuditError(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_code_name(code)) + "(" + detail + ")"),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) {
  throw AuditError(code, detail);
}

}  // namespace activeaudit
