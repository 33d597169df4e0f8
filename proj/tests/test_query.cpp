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

#include <doctest.h>

#include <set>

#include "ftsearch/error.hpp"
#include "ftsearch/index.hpp"
#include "ftsearch/query.hpp"
#include "support/oracle.hpp"
#include "support/randgen.hpp"
#include "support/tmpdir.hpp"

using namespace fts;
using fts::testing::RandomQueries;
using fts::testing::ScanOracle;
using fts::testing::TmpDir;

namespace {

struct Fixture {
  TmpDir tmp;
  std::shared_ptr<Index> index;
  ScanOracle oracle;

  Fixture() : index(Index::create(tmp / "idx")) {}

  void add(const std::string& text, const std::string& language = "") {
    DocumentInput doc;
    doc.text = text;
    doc.language = language;
    index->add_document(doc, false);
    oracle.add(text, language);
  }

  void refresh() { index->refresh(); }

  std::set<uint64_t> engine_docs(const query::Ast& ast) {
    auto searcher = index->searcher();
    auto result = query::search(*searcher, ast, searcher->doc_count());
    std::set<uint64_t> ids;
    for (const auto& hit : result.hits) ids.insert(hit.doc_id);
    return ids;
  }
};

query::Ast phrase(const std::string& text, uint32_t slop = 0) {
  return query::Ast{query::MatchPhrase{"text", text, slop}};
}

query::Ast match(const std::string& text) {
  return query::Ast{query::Match{"text", text}};
}

}  // namespace

TEST_SUITE("query") {

TEST_CASE("phrase_positions_match implements ordered slop") {
  std::vector<std::vector<uint32_t>> climate_change = {{0}, {1}};
  CHECK(query::phrase_positions_match(climate_change, 0));

  std::vector<std::vector<uint32_t>> climate_and_change = {{0}, {2}};
  CHECK_FALSE(query::phrase_positions_match(climate_and_change, 0));
  CHECK(query::phrase_positions_match(climate_and_change, 1));

  std::vector<std::vector<uint32_t>> climate_action_and_change = {{0}, {3}};
  CHECK_FALSE(query::phrase_positions_match(climate_action_and_change, 1));
  CHECK(query::phrase_positions_match(climate_action_and_change, 2));

  // Order is never relaxed, whatever the slop.
  std::vector<std::vector<uint32_t>> reversed = {{5}, {2}};
  CHECK_FALSE(query::phrase_positions_match(reversed, 100));

  std::vector<std::vector<uint32_t>> empty_list = {{0}, {}};
  CHECK_FALSE(query::phrase_positions_match(empty_list, 3));
}

TEST_CASE("paper slop examples against a real index") {
  Fixture fx;
  fx.add("climate change");
  fx.add("climate and change");
  fx.add("climate action and change");
  fx.refresh();
  auto searcher = fx.index->searcher();

  CHECK(query::count(*searcher, phrase("climate change", 0)) == 1);
  CHECK(query::count(*searcher, phrase("climate change", 1)) == 2);
  CHECK(query::count(*searcher, phrase("climate change", 2)) == 3);
}

TEST_CASE("search over the three-document example corpus") {
  Fixture fx;
  fx.add("the cat sat");
  fx.add("cat");
  fx.add("dog");
  fx.refresh();
  auto searcher = fx.index->searcher();

  CHECK(fx.engine_docs(match("cat")) == std::set<uint64_t>{0, 1});
  CHECK(fx.engine_docs(phrase("cat sat")) == std::set<uint64_t>{0});

  query::Bool node;
  node.must.push_back(match("cat"));
  node.must_not.push_back(match("sat"));
  CHECK(fx.engine_docs(query::Ast{node}) == std::set<uint64_t>{1});

  CHECK(query::count(*searcher, match("cat")) == 2);
  CHECK(query::count(*searcher, match("absentterm")) == 0);
  CHECK(query::count(*searcher, query::Ast{query::MatchAll{}}) == 3);
}

TEST_CASE("count on an empty or unrefreshed index is zero, not an error") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  auto searcher = index->searcher();
  CHECK(query::count(*searcher, match("anything")) == 0);
  index->add_document({"", "pending doc", "", "", ""}, false);
  CHECK(query::count(*index->searcher(), match("pending")) == 0);
}

TEST_CASE("occurrence_count counts distinct start positions") {
  Fixture fx;
  fx.add("cat cat cat");
  fx.refresh();
  auto searcher = fx.index->searcher();
  CHECK(query::occurrence_count(*searcher, query::MatchPhrase{"text", "cat", 0}) == 3);

  Fixture fx2;
  fx2.add("a b a b");
  fx2.refresh();
  CHECK(query::occurrence_count(*fx2.index->searcher(),
                                query::MatchPhrase{"text", "a b", 0}) == 2);

  TmpDir tmp;
  auto empty = Index::create(tmp / "empty");
  CHECK(query::occurrence_count(*empty->searcher(), query::MatchPhrase{"text", "x", 0}) == 0);
}

TEST_CASE("engine agrees with the brute-force oracle on random corpora") {
  RandomQueries gen(4711, 12);
  Fixture fx;
  for (int d = 0; d < 200; ++d) {
    fx.add(gen.random_text(1, 30));
  }
  fx.refresh();
  auto searcher = fx.index->searcher();

  for (int q = 0; q < 150; ++q) {
    query::MatchPhrase p = gen.random_phrase(1, 4, 3);
    CAPTURE(p.text);
    CAPTURE(p.slop);
    CHECK(query::count(*searcher, query::Ast{p}) == fx.oracle.count(query::Ast{p}));
    CHECK(query::occurrence_count(*searcher, p) == fx.oracle.occurrence_count(p));
    CHECK(fx.engine_docs(query::Ast{p}) == fx.oracle.matching(query::Ast{p}));
  }
  for (int q = 0; q < 80; ++q) {
    query::Ast ast = gen.random_mixed();
    CHECK(query::count(*searcher, ast) == fx.oracle.count(ast));
    CHECK(fx.engine_docs(ast) == fx.oracle.matching(ast));
  }
}

TEST_CASE("slop monotonicity: matches at slop s stay matches at s+1") {
  RandomQueries gen(99, 10);
  Fixture fx;
  for (int d = 0; d < 120; ++d) fx.add(gen.random_text(3, 25));
  fx.refresh();

  for (int q = 0; q < 40; ++q) {
    query::MatchPhrase p = gen.random_phrase(2, 4, 0);
    for (uint32_t slop = 0; slop < 3; ++slop) {
      p.slop = slop;
      auto at_s = fx.engine_docs(query::Ast{p});
      p.slop = slop + 1;
      auto at_s1 = fx.engine_docs(query::Ast{p});
      CHECK(std::includes(at_s1.begin(), at_s1.end(), at_s.begin(), at_s.end()));
    }
  }
}

TEST_CASE("single-term phrase behaves exactly like match") {
  RandomQueries gen(1234, 8);
  Fixture fx;
  for (int d = 0; d < 100; ++d) fx.add(gen.random_text(1, 20));
  fx.refresh();
  auto searcher = fx.index->searcher();

  for (const std::string& word : gen.vocab()) {
    query::MatchPhrase p{"text", word, 0};
    auto phrase_result = query::search(*searcher, query::Ast{p}, 1000);
    auto match_result = query::search(*searcher, match(word), 1000);
    REQUIRE(phrase_result.total_docs == match_result.total_docs);
    for (size_t i = 0; i < phrase_result.hits.size(); ++i) {
      CHECK(phrase_result.hits[i].doc_id == match_result.hits[i].doc_id);
      CHECK(phrase_result.hits[i].occurrence_count == match_result.hits[i].occurrence_count);
    }
  }
}

TEST_CASE("boolean algebra sanity") {
  RandomQueries gen(777, 8);
  Fixture fx;
  for (int d = 0; d < 100; ++d) fx.add(gen.random_text(1, 15));
  fx.refresh();

  for (int q = 0; q < 20; ++q) {
    query::Match a = gen.random_match(1);

    query::Bool contradiction;
    contradiction.must.push_back(query::Ast{a});
    contradiction.must_not.push_back(query::Ast{a});
    CHECK(fx.engine_docs(query::Ast{contradiction}).empty());

    query::Bool wrapped;
    wrapped.must.push_back(query::Ast{a});
    CHECK(fx.engine_docs(query::Ast{wrapped}) == fx.engine_docs(query::Ast{a}));
  }
}

TEST_CASE("minimum_should_match counts distinct clauses") {
  Fixture fx;
  fx.add("alpha beta");
  fx.add("alpha");
  fx.add("gamma");
  fx.refresh();

  query::Bool two_of;
  two_of.should = {match("alpha"), match("beta"), match("gamma")};
  two_of.minimum_should_match = 2;
  CHECK(fx.engine_docs(query::Ast{two_of}) == std::set<uint64_t>{0});

  query::Bool defaulted;  // no must: needs one should by default
  defaulted.should = {match("beta"), match("gamma")};
  CHECK(fx.engine_docs(query::Ast{defaulted}) == std::set<uint64_t>{0, 2});

  query::Bool only_not;
  only_not.must_not.push_back(match("alpha"));
  CHECK(fx.engine_docs(query::Ast{only_not}) == std::set<uint64_t>{2});
}

TEST_CASE("count equals search total and pagination partitions hits") {
  RandomQueries gen(3131, 10);
  Fixture fx;
  for (int d = 0; d < 150; ++d) fx.add(gen.random_text(1, 20));
  fx.refresh();
  auto searcher = fx.index->searcher();

  for (int q = 0; q < 20; ++q) {
    query::Ast ast = gen.random_mixed();
    uint64_t n = query::count(*searcher, ast);
    CHECK(n == query::search(*searcher, ast, 7).total_docs);
    CHECK(n == query::search(*searcher, ast, 0).total_docs);  // limit 0: count only
    CHECK(query::search(*searcher, ast, 0).hits.empty());

    // Page through and reassemble.
    std::vector<uint64_t> paged;
    for (size_t from = 0;; from += 10) {
      auto page = query::search(*searcher, ast, 10, from);
      for (const auto& hit : page.hits) paged.push_back(hit.doc_id);
      if (page.hits.size() < 10) break;
    }
    CHECK(paged.size() == n);
    CHECK(std::is_sorted(paged.begin(), paged.end()));
    CHECK(std::adjacent_find(paged.begin(), paged.end()) == paged.end());
  }
}

TEST_CASE("query language filter scopes by document metadata") {
  Fixture fx;
  fx.add("shared term", "eng");
  fx.add("shared term", "fra");
  fx.add("shared term", "");
  fx.refresh();
  auto searcher = fx.index->searcher();

  query::DocFilter eng;
  eng.language = "eng";
  CHECK(query::count(*searcher, match("shared"), eng) == 1);
  query::DocFilter und;
  und.language = "und";
  CHECK(query::count(*searcher, match("shared"), und) == 1);
  CHECK(query::count(*searcher, match("shared")) == 3);
}

TEST_CASE("query errors carry their codes") {
  Fixture fx;
  fx.add("some text");
  fx.refresh();
  auto searcher = fx.index->searcher();

  CHECK_THROWS_WITH_AS(query::count(*searcher, query::Ast{query::Match{"title", "x"}}),
                       doctest::Contains("UnknownField"), Error);
  CHECK_THROWS_WITH_AS(query::count(*searcher, match("!!! ...")),
                       doctest::Contains("EmptyQueryAfterAnalysis"), Error);
  CHECK_THROWS_WITH_AS(query::count(*searcher, query::Ast{query::Bool{}}),
                       doctest::Contains("BadQuery"), Error);
}

TEST_CASE("query JSON grammar round-trips") {
  auto parsed = query::parse_query(
      R"({"match_phrase": {"field": "text", "query": "climate change", "slop": 1}})");
  const auto* p = std::get_if<query::MatchPhrase>(&parsed.node);
  REQUIRE(p != nullptr);
  CHECK(p->text == "climate change");
  CHECK(p->slop == 1);

  auto defaulted = query::parse_query(R"({"match_phrase": {"field": "text", "query": "x"}})");
  CHECK(std::get<query::MatchPhrase>(defaulted.node).slop == 0);

  auto wrapped = query::parse_query(R"({"query": {"match": {"field": "text", "query": "x"}}})");
  CHECK(std::get_if<query::Match>(&wrapped.node) != nullptr);

  auto boolean = query::parse_query(R"({
    "bool": {"must": [{"match": {"field": "text", "query": "a"}}],
             "should": [{"match_phrase": {"field": "text", "query": "b c", "slop": 2}}],
             "must_not": [{"match_all": {}}],
             "minimum_should_match": 1}})");
  const auto* b = std::get_if<query::Bool>(&boolean.node);
  REQUIRE(b != nullptr);
  CHECK(b->must.size() == 1);
  CHECK(b->should.size() == 1);
  CHECK(b->must_not.size() == 1);
  CHECK(b->minimum_should_match == 1u);

  // to_json(from_json(x)) re-parses to the same tree.
  auto again = query::from_json(query::to_json(boolean));
  CHECK(query::to_json(again) == query::to_json(boolean));

  CHECK_THROWS_WITH_AS(query::parse_query(R"({"fuzzy": {"field": "text", "query": "x"}})"),
                       doctest::Contains("BadQuery"), Error);
  CHECK_THROWS_WITH_AS(query::parse_query(R"({"match": {"query": "x"}})"),
                       doctest::Contains("BadQuery"), Error);
  CHECK_THROWS_WITH_AS(query::parse_query(R"({"match_phrase": {"field": "text", "query": "x", "slop": -1}})"),
                       doctest::Contains("BadQuery"), Error);
  CHECK_THROWS_WITH_AS(query::parse_query("not json"), doctest::Contains("BadQuery"), Error);
  CHECK_THROWS_WITH_AS(query::parse_query(R"({"bool": {}})"), doctest::Contains("BadQuery"),
                       Error);
}

TEST_CASE("query and index analysis stay symmetric") {
  Fixture fx;
  fx.add("<p>Déjà Vu</p>");
  fx.refresh();
  auto searcher = fx.index->searcher();
  // The query analyzer folds and lowercases the same way the index did.
  CHECK(query::count(*searcher, phrase("deja vu", 0)) == 1);
  CHECK(query::count(*searcher, phrase("DÉJÀ VU", 0)) == 1);
}

}  // TEST_SUITE
