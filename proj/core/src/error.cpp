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

#include "ftsearch/error.hpp"

namespace fts {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidUtf8: return "InvalidUtf8";
    case ErrorCode::kIndexClosed: return "IndexClosed";
    case ErrorCode::kStorageFull: return "StorageFull";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kCorrupt: return "Corrupt";
    case ErrorCode::kUnknownField: return "UnknownField";
    case ErrorCode::kEmptyQueryAfterAnalysis: return "EmptyQueryAfterAnalysis";
    case ErrorCode::kBadQuery: return "BadQuery";
    case ErrorCode::kInfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::kInputUnreadable: return "InputUnreadable";
    case ErrorCode::kShardUnavailable: return "ShardUnavailable";
    case ErrorCode::kSourceUnreachable: return "SourceUnreachable";
    case ErrorCode::kDestNotEmpty: return "DestNotEmpty";
    case ErrorCode::kEmptyDictionary: return "EmptyDictionary";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kUnknownLanguage: return "UnknownLanguage";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kAlreadyExists: return "AlreadyExists";
    case ErrorCode::kUnknownIndex: return "UnknownIndex";
  }
  return "Unknown";
}

}  // namespace fts
