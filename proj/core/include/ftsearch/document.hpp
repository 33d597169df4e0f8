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

#include <cstdint>
#include <string>

#include "ftsearch/sha256.hpp"

namespace fts {

/// A corpus record before admission. `language` is an ISO 639-3 code;
/// documents without one are filed under "und".
struct DocumentInput {
  std::string external_id;
  std::string text;
  std::string source;
  std::string language;
  std::string url;

  uint64_t byte_size() const {
    return text.size() + external_id.size() + source.size() + language.size() + url.size();
  }
};

/// A stored document as returned by the document store.
struct StoredDocument {
  uint64_t doc_id = 0;
  std::string external_id;
  std::string text;
  std::string source;
  std::string language;
  std::string url;
  Sha256Digest content_hash{};
};

}  // namespace fts
