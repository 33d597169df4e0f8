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

#include "ftsearch/query.hpp"

#include <algorithm>
#include <chrono>

#include "ftsearch/error.hpp"

namespace fts::query {

namespace {

struct DocHit {
  uint64_t doc = 0;
  uint64_t occ = 0;
};

using HitList = std::vector<DocHit>;

/// Doc-ordered walk over one term's postings across all segments.
class TermStream {
 public:
  explicit TermStream(std::vector<PostingsCursor> cursors)
      : cursors_(std::move(cursors)) {}

  bool next() {
    while (at_ < cursors_.size()) {
      if (cursors_[at_].next()) return true;
      ++at_;
    }
    return false;
  }

  uint64_t doc() const { return cursors_[at_].doc_id(); }
  uint32_t tf() const { return cursors_[at_].position_count(); }
  void positions(std::vector<uint32_t>& out) { cursors_[at_].read_positions(out); }

 private:
  std::vector<PostingsCursor> cursors_;
  size_t at_ = 0;
};

bool passes(const Searcher& searcher, const DocFilter& filter, uint64_t doc) {
  if (!filter.language) return true;
  return searcher.language_of(doc) == *filter.language;
}

std::vector<std::string> analyze_terms(const Searcher& searcher, const std::string& text) {
  std::vector<std::string> terms;
  for (auto& token : analysis::analyze(text, searcher.analyzer())) {
    terms.push_back(std::move(token.term));
  }
  return terms;
}

void check_field(const std::string& field) {
  if (field != "text") {
    throw_error(ErrorCode::kUnknownField, "no such field: " + field);
  }
}

HitList evaluate(const Searcher& searcher, const Ast& ast, const DocFilter& filter);

HitList evaluate_match_all(const Searcher& searcher, const DocFilter& filter) {
  HitList hits;
  hits.reserve(searcher.doc_count());
  for (uint64_t doc = 0; doc < searcher.doc_count(); ++doc) {
    if (passes(searcher, filter, doc)) hits.push_back({doc, 0});
  }
  return hits;
}

HitList evaluate_match(const Searcher& searcher, const Match& match, const DocFilter& filter) {
  check_field(match.field);
  std::vector<std::string> terms = analyze_terms(searcher, match.text);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  if (terms.empty()) {
    throw_error(ErrorCode::kEmptyQueryAfterAnalysis, "match query: " + match.text);
  }

  HitList merged;
  for (const std::string& term : terms) {
    TermStream stream(searcher.term_postings(term));
    while (stream.next()) {
      if (passes(searcher, filter, stream.doc())) {
        merged.push_back({stream.doc(), stream.tf()});
      }
    }
  }
  std::sort(merged.begin(), merged.end(),
            [](const DocHit& a, const DocHit& b) { return a.doc < b.doc; });
  HitList out;
  for (const DocHit& hit : merged) {
    if (!out.empty() && out.back().doc == hit.doc) {
      out.back().occ += hit.occ;
    } else {
      out.push_back(hit);
    }
  }
  return out;
}

HitList evaluate_phrase(const Searcher& searcher, const MatchPhrase& phrase,
                        const DocFilter& filter) {
  check_field(phrase.field);
  std::vector<std::string> terms = analyze_terms(searcher, phrase.text);
  if (terms.empty()) {
    throw_error(ErrorCode::kEmptyQueryAfterAnalysis, "match_phrase query: " + phrase.text);
  }

  std::vector<TermStream> streams;
  streams.reserve(terms.size());
  for (const std::string& term : terms) {
    streams.emplace_back(searcher.term_postings(term));
  }

  HitList out;
  // Leapfrog conjunction: align every stream on the same doc_id.
  for (auto& stream : streams) {
    if (!stream.next()) return out;
  }
  std::vector<std::vector<uint32_t>> position_lists(streams.size());
  while (true) {
    uint64_t target = 0;
    for (auto& stream : streams) target = std::max(target, stream.doc());
    bool aligned = true;
    bool exhausted = false;
    for (auto& stream : streams) {
      while (stream.doc() < target) {
        if (!stream.next()) {
          exhausted = true;
          break;
        }
      }
      if (exhausted) break;
      if (stream.doc() != target) aligned = false;
    }
    if (exhausted) break;
    if (aligned) {
      if (passes(searcher, filter, target)) {
        for (size_t i = 0; i < streams.size(); ++i) {
          streams[i].positions(position_lists[i]);
        }
        uint64_t occ = phrase_occurrences(position_lists, phrase.slop);
        if (occ > 0) out.push_back({target, occ});
      }
      for (auto& stream : streams) {
        if (!stream.next()) {
          exhausted = true;
          break;
        }
      }
      if (exhausted) break;
    }
  }
  return out;
}

HitList intersect(HitList a, const HitList& b) {
  HitList out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].doc < b[j].doc) ++i;
    else if (b[j].doc < a[i].doc) ++j;
    else {
      out.push_back({a[i].doc, a[i].occ + b[j].occ});
      ++i;
      ++j;
    }
  }
  return out;
}

HitList subtract(HitList a, const HitList& b) {
  HitList out;
  size_t j = 0;
  for (const DocHit& hit : a) {
    while (j < b.size() && b[j].doc < hit.doc) ++j;
    if (j < b.size() && b[j].doc == hit.doc) continue;
    out.push_back(hit);
  }
  return out;
}

HitList evaluate_bool(const Searcher& searcher, const Bool& node, const DocFilter& filter) {
  if (node.must.empty() && node.should.empty() && node.must_not.empty()) {
    throw_error(ErrorCode::kBadQuery, "bool query with no clauses");
  }

  uint32_t min_should = node.minimum_should_match.value_or(
      node.must.empty() && !node.should.empty() ? 1u : 0u);

  std::optional<HitList> candidates;
  for (const Ast& clause : node.must) {
    HitList hits = evaluate(searcher, clause, filter);
    candidates = candidates ? intersect(std::move(*candidates), hits) : std::move(hits);
  }

  if (!node.should.empty()) {
    // Count distinct matching should-clauses per doc.
    std::vector<std::pair<DocHit, uint32_t>> tagged;
    for (const Ast& clause : node.should) {
      for (const DocHit& hit : evaluate(searcher, clause, filter)) {
        tagged.push_back({hit, 1});
      }
    }
    std::sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) {
      return a.first.doc < b.first.doc;
    });
    HitList should_hits;
    std::vector<uint32_t> matches;
    for (const auto& [hit, one] : tagged) {
      if (!should_hits.empty() && should_hits.back().doc == hit.doc) {
        should_hits.back().occ += hit.occ;
        matches.back() += one;
      } else {
        should_hits.push_back(hit);
        matches.push_back(one);
      }
    }
    if (min_should > 0) {
      HitList qualified;
      for (size_t i = 0; i < should_hits.size(); ++i) {
        if (matches[i] >= min_should) qualified.push_back(should_hits[i]);
      }
      candidates = candidates ? intersect(std::move(*candidates), qualified)
                              : std::move(qualified);
    } else if (candidates) {
      // Optional should-clauses only contribute occurrence counts.
      size_t j = 0;
      for (DocHit& hit : *candidates) {
        while (j < should_hits.size() && should_hits[j].doc < hit.doc) ++j;
        if (j < should_hits.size() && should_hits[j].doc == hit.doc) {
          hit.occ += should_hits[j].occ;
        }
      }
    } else {
      candidates = std::move(should_hits);
    }
  }

  if (!candidates) candidates = evaluate_match_all(searcher, filter);

  for (const Ast& clause : node.must_not) {
    *candidates = subtract(std::move(*candidates), evaluate(searcher, clause, filter));
  }
  return std::move(*candidates);
}

HitList evaluate(const Searcher& searcher, const Ast& ast, const DocFilter& filter) {
  return std::visit(
      [&](const auto& node) -> HitList {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Match>) return evaluate_match(searcher, node, filter);
        else if constexpr (std::is_same_v<T, MatchPhrase>) return evaluate_phrase(searcher, node, filter);
        else if constexpr (std::is_same_v<T, MatchAll>) return evaluate_match_all(searcher, filter);
        else return evaluate_bool(searcher, node, filter);
      },
      ast.node);
}

}  // namespace

bool phrase_positions_match(std::span<const std::vector<uint32_t>> position_lists,
                            uint32_t slop) {
  return phrase_occurrences(position_lists, slop) > 0;
}

uint64_t phrase_occurrences(std::span<const std::vector<uint32_t>> position_lists,
                            uint32_t slop) {
  if (position_lists.empty()) return 0;
  for (const auto& list : position_lists) {
    if (list.empty()) return 0;
  }
  const size_t n = position_lists.size();
  if (n == 1) return position_lists[0].size();

  // Greedy minimal chain per start position; each list pointer only moves
  // forward, so the whole sweep is linear in total positions.
  uint64_t count = 0;
  std::vector<size_t> at(n, 0);
  for (uint32_t start : position_lists[0]) {
    uint32_t prev = start;
    for (size_t j = 1; j < n; ++j) {
      const auto& list = position_lists[j];
      size_t& idx = at[j];
      while (idx < list.size() && list[idx] <= prev) ++idx;
      if (idx == list.size()) return count;  // later starts cannot do better
      prev = list[idx];
    }
    uint64_t intervening = (prev - start) - (n - 1);
    if (intervening <= slop) ++count;
  }
  return count;
}

SearchResult search(const Searcher& searcher, const Ast& ast, size_t limit,
                    size_t offset, const DocFilter& filter) {
  auto started = std::chrono::steady_clock::now();
  HitList hits = evaluate(searcher, ast, filter);

  SearchResult result;
  result.total_docs = hits.size();
  size_t begin = std::min(offset, hits.size());
  size_t end = std::min(begin + limit, hits.size());
  result.hits.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    SearchHit hit;
    hit.doc_id = hits[i].doc;
    hit.occurrence_count = hits[i].occ;
    hit.external_id = searcher.document(hits[i].doc).external_id;
    result.hits.push_back(std::move(hit));
  }
  result.took_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

uint64_t count(const Searcher& searcher, const Ast& ast, const DocFilter& filter) {
  return evaluate(searcher, ast, filter).size();
}

uint64_t occurrence_count(const Searcher& searcher, const MatchPhrase& phrase,
                          const DocFilter& filter) {
  uint64_t total = 0;
  for (const DocHit& hit : evaluate_phrase(searcher, phrase, filter)) {
    total += hit.occ;
  }
  return total;
}

namespace {

Ast parse_node(const nlohmann::json& value);

std::vector<Ast> parse_clause_list(const nlohmann::json& value, const char* name) {
  std::vector<Ast> out;
  if (!value.is_array()) {
    throw_error(ErrorCode::kBadQuery, std::string(name) + " must be an array");
  }
  for (const auto& item : value) out.push_back(parse_node(item));
  return out;
}

Ast parse_node(const nlohmann::json& value) {
  if (!value.is_object() || value.size() != 1) {
    throw_error(ErrorCode::kBadQuery, "query node must be a single-key object");
  }
  const std::string& kind = value.begin().key();
  const nlohmann::json& body = value.begin().value();

  if (kind == "match_all") {
    if (!body.is_object() || !body.empty()) {
      throw_error(ErrorCode::kBadQuery, "match_all takes an empty object");
    }
    return Ast{MatchAll{}};
  }
  if (kind == "match" || kind == "match_phrase") {
    if (!body.is_object() || !body.contains("field") || !body.contains("query")) {
      throw_error(ErrorCode::kBadQuery, kind + " requires field and query");
    }
    if (kind == "match") {
      for (const auto& [key, ignored] : body.items()) {
        if (key != "field" && key != "query") {
          throw_error(ErrorCode::kBadQuery, "unknown match key: " + key);
        }
      }
      return Ast{Match{body["field"].get<std::string>(), body["query"].get<std::string>()}};
    }
    MatchPhrase phrase;
    phrase.field = body["field"].get<std::string>();
    phrase.text = body["query"].get<std::string>();
    for (const auto& [key, ignored] : body.items()) {
      if (key != "field" && key != "query" && key != "slop") {
        throw_error(ErrorCode::kBadQuery, "unknown match_phrase key: " + key);
      }
    }
    if (body.contains("slop")) {
      if (!body["slop"].is_number_integer() || body["slop"].get<int64_t>() < 0) {
        throw_error(ErrorCode::kBadQuery, "slop must be a non-negative integer");
      }
      phrase.slop = body["slop"].get<uint32_t>();
    }
    return Ast{std::move(phrase)};
  }
  if (kind == "bool") {
    Bool node;
    for (const auto& [key, item] : body.items()) {
      if (key == "must") node.must = parse_clause_list(item, "must");
      else if (key == "should") node.should = parse_clause_list(item, "should");
      else if (key == "must_not") node.must_not = parse_clause_list(item, "must_not");
      else if (key == "minimum_should_match") {
        if (!item.is_number_integer() || item.get<int64_t>() < 0) {
          throw_error(ErrorCode::kBadQuery, "minimum_should_match must be >= 0");
        }
        node.minimum_should_match = item.get<uint32_t>();
      } else {
        throw_error(ErrorCode::kBadQuery, "unknown bool key: " + key);
      }
    }
    if (node.must.empty() && node.should.empty() && node.must_not.empty()) {
      throw_error(ErrorCode::kBadQuery, "bool query with no clauses");
    }
    return Ast{std::move(node)};
  }
  throw_error(ErrorCode::kBadQuery, "unknown query type: " + kind);
}

}  // namespace

Ast from_json(const nlohmann::json& value) {
  if (value.is_object() && value.size() == 1 && value.contains("query")) {
    return parse_node(value["query"]);
  }
  return parse_node(value);
}

Ast parse_query(std::string_view json_text) {
  nlohmann::json value = nlohmann::json::parse(json_text, nullptr, false);
  if (value.is_discarded()) {
    throw_error(ErrorCode::kBadQuery, "query is not valid JSON");
  }
  return from_json(value);
}

nlohmann::json to_json(const Ast& ast) {
  return std::visit(
      [](const auto& node) -> nlohmann::json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Match>) {
          return {{"match", {{"field", node.field}, {"query", node.text}}}};
        } else if constexpr (std::is_same_v<T, MatchPhrase>) {
          return {{"match_phrase",
                   {{"field", node.field}, {"query", node.text}, {"slop", node.slop}}}};
        } else if constexpr (std::is_same_v<T, MatchAll>) {
          return {{"match_all", nlohmann::json::object()}};
        } else {
          nlohmann::json body = nlohmann::json::object();
          auto emit = [](const std::vector<Ast>& clauses) {
            nlohmann::json arr = nlohmann::json::array();
            for (const Ast& clause : clauses) arr.push_back(to_json(clause));
            return arr;
          };
          if (!node.must.empty()) body["must"] = emit(node.must);
          if (!node.should.empty()) body["should"] = emit(node.should);
          if (!node.must_not.empty()) body["must_not"] = emit(node.must_not);
          if (node.minimum_should_match) {
            body["minimum_should_match"] = *node.minimum_should_match;
          }
          return {{"bool", std::move(body)}};
        }
      },
      ast.node);
}

}  // namespace fts::query
