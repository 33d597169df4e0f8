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
#include <filesystem>
#include <string>
#include <vector>

#include "ftsearch/document.hpp"

namespace fts::synth {

/// Seeded synthetic-corpus parameters. The same spec always generates the
/// same documents.
struct CorpusSpec {
  uint64_t docs = 1000;
  uint32_t vocabulary = 1000;
  uint32_t words_min = 50;
  uint32_t words_max = 150;
  uint64_t seed = 42;
  std::vector<std::string> languages = {"eng"};
  /// Each unique document is emitted this many times (content duplicates
  /// with distinct external ids).
  uint32_t replicate = 1;
  std::string id_prefix = "doc";
};

/// Deterministic English-looking word list: common words first, then
/// syllable-built pseudo-words.
std::vector<std::string> make_vocabulary(uint32_t size, uint64_t seed);

std::vector<DocumentInput> generate_corpus(const CorpusSpec& spec);

/// Streams the corpus straight to a JSONL file; returns documents written.
uint64_t write_corpus_jsonl(const CorpusSpec& spec, const std::filesystem::path& path);

}  // namespace fts::synth
