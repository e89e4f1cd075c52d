// Copyright 2026 The DIPS Eval Authors
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

#include "dips/error.h"

namespace dips {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kRowSumViolation: return "RowSumViolation";
    case ErrorCode::kNegativeProbability: return "NegativeProbability";
    case ErrorCode::kUnsortedIterations: return "UnsortedIterations";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kSubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kTooManyClasses: return "TooManyClasses";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kSingleClassPresent: return "SingleClassPresent";
    case ErrorCode::kNotBinary: return "NotBinary";
    case ErrorCode::kMissingTrueLabels: return "MissingTrueLabels";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNotPsd: return "NotPsd";
    case ErrorCode::kEigenFailure: return "EigenFailure";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kEmptyCluster: return "EmptyCluster";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateInput:
    case ErrorCode::kNotSymmetric:
    case ErrorCode::kNotPsd:
    case ErrorCode::kEigenFailure:
    case ErrorCode::kSingularCovariance:
    case ErrorCode::kZeroVariance:
    case ErrorCode::kEmptyCluster:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void rethrow_with_context(const Error& e, const std::string& context) {
  std::string what = e.what();
  // Strip the "<Code>: " prefix so it is not repeated.
  const std::string prefix = std::string(error_code_name(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  throw Error(e.code(), context + ": " + what);
}

}  // namespace dips
