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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftsearch/index.hpp"
#include "ftsearch/query.hpp"
#include "ftsearch/shard.hpp"

namespace fts::audit {

/// A wordlist scoped to one language. Terms are kept in their trimmed input
/// form but deduplicated by analyzed form, and limited to 1..5 words.
struct TermDictionary {
  std::string name;
  std::string language;  // ISO 639-3; "und" for unscoped
  std::vector<std::string> terms;
  std::string provenance;

  static constexpr uint32_t kMinWords = 1;
  static constexpr uint32_t kMaxWords = 5;
};

enum class DictionaryFormat { kLines, kCsv };

/// Reads `lines` files (one term per line, '#' comments) into a single
/// dictionary under `fallback_language`, or `csv` files (language,term) into
/// one dictionary per language. Throws EmptyDictionary and MalformedCsv.
std::vector<TermDictionary> load_dictionaries(const std::filesystem::path& path,
                                              DictionaryFormat format,
                                              const std::string& fallback_language,
                                              const analysis::AnalyzerConfig& analyzer);

/// Single-dictionary convenience for `lines` files.
TermDictionary load_dictionary(const std::filesystem::path& path, DictionaryFormat format,
                               const std::string& language,
                               const analysis::AnalyzerConfig& analyzer);

struct AuditRow {
  std::string language;
  std::string term;
  uint64_t doc_count = 0;
  uint64_t occurrence_count = 0;
};

struct AuditReport {
  std::string index_id;
  uint32_t slop = 0;
  std::string timestamp;  // ISO 8601 UTC
  std::vector<AuditRow> rows;  // sorted by (language, term); zero rows retained
  std::map<std::string, uint64_t> language_totals;  // docs with >= 1 term
  std::vector<std::pair<std::string, std::string>> term_errors;  // (term, error)
};

/// Counting backend so audits run identically over one index or a shard set.
struct CountBackend {
  std::string id;
  std::function<uint64_t(const query::Ast&, const query::DocFilter&)> count;
  std::function<uint64_t(const query::MatchPhrase&, const query::DocFilter&)> occurrences;

  static CountBackend over(std::shared_ptr<const Searcher> searcher, std::string id);
  static CountBackend over(const shard::ShardSet& shards, std::string id);
};

/// Runs phrase counts per term at the given slop, scoped to each
/// dictionary's language via the document language field. Per-term query
/// errors are recorded, never fatal.
AuditReport run_audit(const CountBackend& backend,
                      std::span<const TermDictionary> dictionaries, uint32_t slop);

AuditReport run_audit(const Index& index, std::span<const TermDictionary> dictionaries,
                      uint32_t slop);
AuditReport run_audit(const shard::ShardSet& shards,
                      std::span<const TermDictionary> dictionaries, uint32_t slop);

enum class RankBy { kDocCount, kOccurrenceCount };

struct RankedTerm {
  std::string term;
  uint64_t value = 0;
};

/// Descending by the chosen measure; ties broken lexicographically by term.
/// Throws UnknownLanguage.
std::vector<RankedTerm> top_k(const AuditReport& report, const std::string& language,
                              size_t k, RankBy by);

/// Long form: language,term,doc_count,occurrence_count.
std::string report_csv(const AuditReport& report);

/// Dense language x term matrix of the chosen measure; zero cells retained.
std::string heatmap_csv(const AuditReport& report, RankBy by);

nlohmann::json report_to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& value);

}  // namespace fts::audit
