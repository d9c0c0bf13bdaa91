// Copyright 2026 The trustauth Authors
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

#ifndef TRUSTAUTH_ERROR_HPP_
#define TRUSTAUTH_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trustauth {

// Every domain failure carries one of these codes. The service maps them to
// HTTP statuses and the CLI maps them to exit code 1.
enum class ErrorCode {
  kInvalidName,
  kUnknownIdentity,
  kMalformedSample,
  kIncompleteEnrollment,
  kAlreadyEnrolled,
  kNotEnrolled,
  kCorruptLog,
  kStorage,
  kAudioTooShort,
  kAllSilent,
  kUnsupportedFormat,
  kTooFewFrames,
  kDegenerateComponent,
  kDimensionMismatch,
  kSingularSystem,
  kDigestMismatch,
  kEmptyProbe,
  kEmptyInput,
  kUnsortedStream,
  kNegativeDwell,
  kTooFewKeystrokes,
  kProbeTooShort,
  kNoModel,
  kSingleClassData,
  kEmptyScores,
  kUnreachableTarget,
  kInstrumentUnavailable,
  kUnknownActivity,
  kInvalidArgument,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string &detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &message) {
  throw Error(code, message);
}

}  // namespace trustauth

#endif  // TRUSTAUTH_ERROR_HPP_
