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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftsearch/index.hpp"

namespace fts::query {

struct Ast;

/// Documents containing at least one analyzed query term.
struct Match {
  std::string field = "text";
  std::string text;
};

/// Ordered phrase with up to `slop` intervening tokens in total.
struct MatchPhrase {
  std::string field = "text";
  std::string text;
  uint32_t slop = 0;
};

struct MatchAll {};

struct Bool {
  std::vector<Ast> must;
  std::vector<Ast> should;
  std::vector<Ast> must_not;
  /// Default: 1 when there are should clauses but no must clauses, else 0.
  std::optional<uint32_t> minimum_should_match;
};

struct Ast {
  std::variant<Match, MatchPhrase, MatchAll, Bool> node;
};

struct SearchHit {
  uint64_t doc_id = 0;
  std::string external_id;
  std::string matched_field = "text";
  uint64_t occurrence_count = 0;
};

struct SearchResult {
  uint64_t total_docs = 0;
  std::vector<SearchHit> hits;
  double took_ms = 0.0;
};

/// Optional metadata scoping applied before matching.
struct DocFilter {
  std::optional<std::string> language;
};

/// True iff positions p1 < p2 < ... < pn can be drawn in order from the
/// per-term lists with at most `slop` intervening tokens in total, i.e.
/// (pn - p1) - (n - 1) <= slop. Linear k-pointer sweep.
bool phrase_positions_match(std::span<const std::vector<uint32_t>> position_lists,
                            uint32_t slop);

/// Number of distinct start positions from which such a chain exists.
uint64_t phrase_occurrences(std::span<const std::vector<uint32_t>> position_lists,
                            uint32_t slop);

SearchResult search(const Searcher& searcher, const Ast& ast, size_t limit,
                    size_t offset = 0, const DocFilter& filter = {});

uint64_t count(const Searcher& searcher, const Ast& ast, const DocFilter& filter = {});

/// Total phrase occurrences summed over all matching documents.
uint64_t occurrence_count(const Searcher& searcher, const MatchPhrase& phrase,
                          const DocFilter& filter = {});

/// Parses the query JSON grammar: match, match_phrase, bool, match_all,
/// optionally wrapped in a top-level {"query": ...}. Throws BadQuery.
Ast from_json(const nlohmann::json& value);
Ast parse_query(std::string_view json_text);
nlohmann::json to_json(const Ast& ast);

}  // namespace fts::query
