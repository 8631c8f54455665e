// Copyright 2026 The texcorpus Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace texcorpus {

enum class ErrorCode {
  kNoEntry,
  kAmbiguousEntry,
  kIncludeCycle,
  kExpansionDepthExceeded,
  kUnbalancedEnvironment,
  kEmptyTable,
  kEmptyCorpus,
  kContextTooSmall,
  kTaggerUnavailable,
  kInvalidDatabase,
  kInvalidArgument,
  kSerialization,
  kIo,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoEntry: return "NoEntry";
    case ErrorCode::kAmbiguousEntry: return "AmbiguousEntry";
    case ErrorCode::kIncludeCycle: return "IncludeCycle";
    case ErrorCode::kExpansionDepthExceeded: return "ExpansionDepthExceeded";
    case ErrorCode::kUnbalancedEnvironment: return "UnbalancedEnvironment";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kContextTooSmall: return "ContextTooSmall";
    case ErrorCode::kTaggerUnavailable: return "TaggerUnavailable";
    case ErrorCode::kInvalidDatabase: return "InvalidDatabase";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSerialization: return "SerializationError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

// All pipeline failures are reported as Error; the code identifies the
// failure class so batch drivers can log it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics. Functions that may warn take an optional sink.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace texcorpus
