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

// Brute-force full-scan oracle. Evaluates query semantics directly over
// analyzed documents by enumerating position tuples, independent of the
// index, postings and sweep implementations it is used to check.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftsearch/analysis.hpp"
#include "ftsearch/query.hpp"

namespace fts::testing {

class ScanOracle {
 public:
  explicit ScanOracle(analysis::AnalyzerConfig analyzer = analysis::AnalyzerConfig::web_content())
      : analyzer_(std::move(analyzer)) {}

  uint64_t add(const std::string& text, const std::string& language = "") {
    Doc doc;
    doc.language = language.empty() ? "und" : language;
    for (auto& token : analysis::analyze(text, analyzer_)) {
      doc.terms.push_back(std::move(token.term));
    }
    docs_.push_back(std::move(doc));
    return docs_.size() - 1;
  }

  size_t size() const { return docs_.size(); }

  /// True iff an increasing position tuple with total intervening tokens
  /// <= slop exists that starts exactly at `start`. Pure enumeration.
  static bool chain_exists_from(const std::vector<std::vector<uint32_t>>& lists,
                                size_t depth, uint32_t prev, uint32_t start, uint32_t slop) {
    if (depth == lists.size()) {
      return (prev - start) - (lists.size() - 1) <= slop;
    }
    for (uint32_t p : lists[depth]) {
      if (p > prev && chain_exists_from(lists, depth + 1, p, start, slop)) return true;
    }
    return false;
  }

  static std::vector<std::vector<uint32_t>> position_lists(
      const std::vector<std::string>& doc_terms, const std::vector<std::string>& query_terms) {
    std::vector<std::vector<uint32_t>> lists(query_terms.size());
    for (size_t q = 0; q < query_terms.size(); ++q) {
      for (uint32_t p = 0; p < doc_terms.size(); ++p) {
        if (doc_terms[p] == query_terms[q]) lists[q].push_back(p);
      }
    }
    return lists;
  }

  static bool phrase_match_brute(const std::vector<std::string>& doc_terms,
                                 const std::vector<std::string>& query_terms, uint32_t slop) {
    return phrase_occurrences_brute(doc_terms, query_terms, slop) > 0;
  }

  /// Distinct start positions from which a valid chain exists.
  static uint64_t phrase_occurrences_brute(const std::vector<std::string>& doc_terms,
                                           const std::vector<std::string>& query_terms,
                                           uint32_t slop) {
    if (query_terms.empty()) return 0;
    auto lists = position_lists(doc_terms, query_terms);
    uint64_t count = 0;
    for (uint32_t start : lists[0]) {
      if (lists.size() == 1) {
        ++count;
      } else if (chain_exists_from(lists, 1, start, start, slop)) {
        ++count;
      }
    }
    return count;
  }

  std::set<uint64_t> matching(const query::Ast& ast,
                              const std::optional<std::string>& language = std::nullopt) const {
    std::set<uint64_t> out;
    for (uint64_t id = 0; id < docs_.size(); ++id) {
      if (language && docs_[id].language != *language) continue;
      if (matches(ast, docs_[id])) out.insert(id);
    }
    return out;
  }

  uint64_t count(const query::Ast& ast,
                 const std::optional<std::string>& language = std::nullopt) const {
    return matching(ast, language).size();
  }

  uint64_t occurrence_count(const query::MatchPhrase& phrase,
                            const std::optional<std::string>& language = std::nullopt) const {
    std::vector<std::string> terms = analyze_terms(phrase.text);
    uint64_t total = 0;
    for (const Doc& doc : docs_) {
      if (language && doc.language != *language) continue;
      total += phrase_occurrences_brute(doc.terms, terms, phrase.slop);
    }
    return total;
  }

 private:
  struct Doc {
    std::string language;
    std::vector<std::string> terms;
  };

  std::vector<std::string> analyze_terms(const std::string& text) const {
    std::vector<std::string> terms;
    for (auto& token : analysis::analyze(text, analyzer_)) {
      terms.push_back(std::move(token.term));
    }
    return terms;
  }

  bool matches(const query::Ast& ast, const Doc& doc) const {
    if (const auto* match = std::get_if<query::Match>(&ast.node)) {
      std::vector<std::string> terms = analyze_terms(match->text);
      for (const std::string& qt : terms) {
        for (const std::string& dt : doc.terms) {
          if (qt == dt) return true;
        }
      }
      return false;
    }
    if (const auto* phrase = std::get_if<query::MatchPhrase>(&ast.node)) {
      return phrase_match_brute(doc.terms, analyze_terms(phrase->text), phrase->slop);
    }
    if (std::get_if<query::MatchAll>(&ast.node) != nullptr) {
      return true;
    }
    const auto& node = std::get<query::Bool>(ast.node);
    for (const query::Ast& clause : node.must) {
      if (!matches(clause, doc)) return false;
    }
    if (!node.should.empty()) {
      uint32_t needed = node.minimum_should_match.value_or(node.must.empty() ? 1u : 0u);
      uint32_t got = 0;
      for (const query::Ast& clause : node.should) {
        if (matches(clause, doc)) ++got;
      }
      if (got < needed) return false;
    }
    for (const query::Ast& clause : node.must_not) {
      if (matches(clause, doc)) return false;
    }
    return true;
  }

  analysis::AnalyzerConfig analyzer_;
  std::vector<Doc> docs_;
};

}  // namespace fts::testing
