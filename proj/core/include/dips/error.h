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

#ifndef DIPS_ERROR_H_
#define DIPS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dips {

enum class ErrorCode {
  // Input / file errors.
  kIoFailure,
  kMalformedHeader,
  kNonFiniteValue,
  kDuplicateId,
  kRowSumViolation,
  kNegativeProbability,
  kUnsortedIterations,
  kInvalidArgument,
  kDimMismatch,
  kLengthMismatch,
  kLabelOutOfRange,
  kTooFewSamples,
  kSubsetTooLarge,
  kEmptyInput,
  kTooManyClasses,
  kIdMismatch,
  kSingleClassPresent,
  kNotBinary,
  kMissingTrueLabels,
  // Numerical failures.
  kDegenerateInput,
  kNotSymmetric,
  kNotPsd,
  kEigenFailure,
  kSingularCovariance,
  kZeroVariance,
  kEmptyCluster,
};

std::string_view error_code_name(ErrorCode code);

// True for codes that signal a numerical failure rather than bad input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Prefixes the message of `e` with a context string, keeping the code.
[[noreturn]] void rethrow_with_context(const Error& e,
                                       const std::string& context);

}  // namespace dips

#endif  // DIPS_ERROR_H_
