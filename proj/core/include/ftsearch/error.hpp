// Copyright 2026 ftsearch Authors
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

namespace fts {

enum class ErrorCode {
  kInvalidConfig,
  kInvalidUtf8,
  kIndexClosed,
  kStorageFull,
  kIoFailure,
  kBadMagic,
  kUnsupportedVersion,
  kCorrupt,
  kUnknownField,
  kEmptyQueryAfterAnalysis,
  kBadQuery,
  kInfeasibleBudget,
  kInputUnreadable,
  kShardUnavailable,
  kSourceUnreachable,
  kDestNotEmpty,
  kEmptyDictionary,
  kMalformedCsv,
  kUnknownLanguage,
  kCorpusTooSmall,
  kAlreadyExists,
  kUnknownIndex,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fts
