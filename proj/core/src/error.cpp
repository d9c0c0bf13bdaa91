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

#include "trustauth/error.hpp"

namespace trustauth {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidName: return "InvalidName";
    case ErrorCode::kUnknownIdentity: return "UnknownIdentity";
    case ErrorCode::kMalformedSample: return "MalformedSample";
    case ErrorCode::kIncompleteEnrollment: return "IncompleteEnrollment";
    case ErrorCode::kAlreadyEnrolled: return "AlreadyEnrolled";
    case ErrorCode::kNotEnrolled: return "NotEnrolled";
    case ErrorCode::kCorruptLog: return "CorruptLog";
    case ErrorCode::kStorage: return "StorageFailure";
    case ErrorCode::kAudioTooShort: return "AudioTooShort";
    case ErrorCode::kAllSilent: return "AllSilent";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kDegenerateComponent: return "DegenerateComponent";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kDigestMismatch: return "DigestMismatch";
    case ErrorCode::kEmptyProbe: return "EmptyProbe";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnsortedStream: return "UnsortedStream";
    case ErrorCode::kNegativeDwell: return "NegativeDwell";
    case ErrorCode::kTooFewKeystrokes: return "TooFewKeystrokes";
    case ErrorCode::kProbeTooShort: return "ProbeTooShort";
    case ErrorCode::kNoModel: return "NoModel";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kEmptyScores: return "EmptyScores";
    case ErrorCode::kUnreachableTarget: return "UnreachableTarget";
    case ErrorCode::kInstrumentUnavailable: return "InstrumentUnavailable";
    case ErrorCode::kUnknownActivity: return "UnknownActivity";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace trustauth
