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

#include <fstream>
#include <random>

#include "ftsearch/error.hpp"
#include "ftsearch/index.hpp"
#include "ftsearch/query.hpp"
#include "ftsearch/sha256.hpp"
#include "support/tmpdir.hpp"

using namespace fts;
using fts::testing::TmpDir;

namespace {

DocumentInput doc_of(const std::string& text, const std::string& id = "",
                     const std::string& language = "") {
  DocumentInput doc;
  doc.text = text;
  doc.external_id = id;
  doc.language = language;
  return doc;
}

uint64_t count_phrase(const Index& index, const std::string& phrase, uint32_t slop = 0) {
  return query::count(*index.searcher(), query::Ast{query::MatchPhrase{"text", phrase, slop}});
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("content_hash matches published vectors") {
  CHECK(to_hex(content_hash("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(content_hash("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(content_hash("abcd") != content_hash("abce"));
}

TEST_CASE("segment write/open round-trip preserves every posting") {
  TmpDir tmp;
  SegmentData data;
  data.segment_id = 7;
  data.first_doc_id = 0;
  data.doc_count = 3;
  data.raw_bytes = 42;
  data.terms = {
      {"cat", {{0, {1, 5}}, {2, {0}}}},
      {"dog", {{1, {2}}}},
      {"the", {{0, {0, 3}}, {1, {0, 1, 4}}, {2, {2}}}},
  };
  auto path = tmp / "seg.fts";
  uint64_t bytes = write_segment(data, path);
  CHECK(bytes == std::filesystem::file_size(path));

  auto reader = SegmentReader::open(path);
  CHECK(reader->info().segment_id == 7);
  CHECK(reader->info().doc_count == 3);
  CHECK(reader->info().raw_bytes == 42);
  CHECK(reader->info().index_bytes == bytes);
  CHECK(reader->info().term_count == 3);

  for (const auto& entry : data.terms) {
    auto cursor = reader->postings(entry.term);
    REQUIRE(cursor.has_value());
    CHECK(cursor->doc_count() == entry.postings.size());
    std::vector<uint32_t> positions;
    for (const auto& [doc_id, expected] : entry.postings) {
      REQUIRE(cursor->next());
      CHECK(cursor->doc_id() == doc_id);
      cursor->read_positions(positions);
      CHECK(positions == expected);
    }
    CHECK_FALSE(cursor->next());
  }
  CHECK_FALSE(reader->postings("absent").has_value());
}

TEST_CASE("segment open rejects bad magic, version and corruption") {
  TmpDir tmp;
  auto junk = tmp / "junk.fts";
  {
    std::ofstream out(junk, std::ios::binary);
    out << "NOPE this is not a segment";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(SegmentReader::open(junk)),
                       doctest::Contains("BadMagic"), Error);

  SegmentData data;
  data.segment_id = 1;
  data.doc_count = 1;
  data.terms = {{"a", {{0, {0}}}}};
  auto path = tmp / "seg.fts";
  write_segment(data, path);

  // Bump the version field (bytes 4..7).
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::string versioned = bytes;
  versioned[4] = 9;
  {
    std::ofstream out(tmp / "ver.fts", std::ios::binary);
    out << versioned;
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(SegmentReader::open(tmp / "ver.fts")),
                       doctest::Contains("UnsupportedVersion"), Error);

  // Flip one payload byte; the checksum must catch it.
  std::string corrupted = bytes;
  corrupted[bytes.size() / 2] ^= 0x40;
  {
    std::ofstream out(tmp / "bad.fts", std::ios::binary);
    out << corrupted;
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(SegmentReader::open(tmp / "bad.fts")),
                       doctest::Contains("Corrupt"), Error);
}

TEST_CASE("documents are findable exactly after refresh") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  index->add_document(doc_of("hello world"), false);
  CHECK(count_phrase(*index, "hello") == 0);

  auto info = index->refresh();
  REQUIRE(info.has_value());
  CHECK(info->doc_count == 1);
  CHECK(count_phrase(*index, "hello") == 1);

  CHECK_FALSE(index->refresh().has_value());  // no pending docs, no new segment

  for (int i = 0; i < 100; ++i) index->add_document(doc_of("batch doc"), false);
  auto second = index->refresh();
  REQUIRE(second.has_value());
  CHECK(second->doc_count == 100);
}

TEST_CASE("searcher snapshots are stable across later refreshes") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  index->add_document(doc_of("one"), false);
  index->refresh();
  auto snapshot = index->searcher();
  index->add_document(doc_of("two"), false);
  index->refresh();
  CHECK(snapshot->doc_count() == 1);
  CHECK(index->searcher()->doc_count() == 2);
}

TEST_CASE("dedup skips repeated content") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");

  auto first = index->add_document(doc_of("hello world", "a"), true);
  CHECK(first.indexed());
  auto second = index->add_document(doc_of("hello world", "b"), true);
  CHECK_FALSE(second.indexed());
  CHECK(second.doc_id == first.doc_id);

  for (int i = 0; i < 10; ++i) index->add_document(doc_of("hello world"), true);
  index->refresh();
  CHECK(index->searcher()->doc_count() == 1);
  CHECK(index->counters().dup_skipped == 11);
}

TEST_CASE("dedup fraction on an 8x replicated corpus is 7/8") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  const int unique = 40;
  uint64_t indexed = 0;
  uint64_t skipped = 0;
  for (int copy = 0; copy < 8; ++copy) {
    for (int d = 0; d < unique; ++d) {
      auto outcome = index->add_document(doc_of("unique text " + std::to_string(d)), true);
      outcome.indexed() ? ++indexed : ++skipped;
    }
  }
  CHECK(indexed == unique);
  CHECK(skipped == 7 * unique);
  index->refresh();
  CHECK(index->searcher()->doc_count() == unique);
}

TEST_CASE("dedup registry survives reopen") {
  TmpDir tmp;
  {
    auto index = Index::create(tmp / "idx");
    index->add_document(doc_of("persisted text"), true);
    index->refresh();
  }
  auto reopened = Index::open(tmp / "idx");
  auto outcome = reopened->add_document(doc_of("persisted text"), true);
  CHECK_FALSE(outcome.indexed());
}

TEST_CASE("document store round-trips text, metadata and hash") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  DocumentInput doc;
  doc.external_id = "ext-1";
  doc.text = "Stored text with ünïcode";
  doc.source = "fixture";
  doc.language = "deu";
  doc.url = "http://example.test/1";
  index->add_document(doc, false);
  index->add_document(doc_of("no language doc"), false);
  index->refresh();

  auto searcher = index->searcher();
  StoredDocument stored = searcher->document(0);
  CHECK(stored.doc_id == 0);
  CHECK(stored.external_id == "ext-1");
  CHECK(stored.text == doc.text);
  CHECK(stored.source == "fixture");
  CHECK(stored.language == "deu");
  CHECK(stored.url == "http://example.test/1");
  CHECK(stored.content_hash == content_hash(doc.text));
  CHECK(searcher->language_of(0) == "deu");
  CHECK(searcher->language_of(1) == "und");
}

TEST_CASE("reopen preserves content; unrefreshed documents are discarded") {
  TmpDir tmp;
  {
    auto index = Index::create(tmp / "idx");
    index->add_document(doc_of("kept document"), false);
    index->refresh();
    index->add_document(doc_of("lost document"), false);  // never refreshed
  }
  auto reopened = Index::open(tmp / "idx");
  CHECK(reopened->searcher()->doc_count() == 1);
  CHECK(count_phrase(*reopened, "kept") == 1);
  CHECK(count_phrase(*reopened, "lost") == 0);
  CHECK(reopened->counters().docs_indexed == 1);

  // The writer keeps working after the trim.
  reopened->add_document(doc_of("appended later"), false);
  reopened->refresh();
  CHECK(count_phrase(*reopened, "appended") == 1);
}

TEST_CASE("small writer buffer seals multiple segments transparently") {
  TmpDir tmp;
  IndexOptions options;
  options.writer_buffer_bytes = 512;  // force frequent seals
  auto index = Index::create(tmp / "idx", options);
  for (int i = 0; i < 50; ++i) {
    index->add_document(doc_of("shared term plus unique" + std::to_string(i)), false);
  }
  auto info = index->refresh();
  REQUIRE(info.has_value());
  CHECK(info->doc_count == 50);

  uint64_t published = 0;
  auto searcher = index->searcher();
  for (auto& cursor : searcher->term_postings("shared")) published += cursor.doc_count();
  CHECK(published == 50);
  CHECK(count_phrase(*index, "shared term") == 50);

  // Per-term postings stay doc-ordered with strictly increasing positions.
  uint64_t last_doc = 0;
  bool first = true;
  std::vector<uint32_t> positions;
  for (auto& cursor : searcher->term_postings("term")) {
    while (cursor.next()) {
      if (!first) CHECK(cursor.doc_id() > last_doc);
      last_doc = cursor.doc_id();
      first = false;
      cursor.read_positions(positions);
      for (size_t p = 1; p < positions.size(); ++p) CHECK(positions[p] > positions[p - 1]);
    }
  }
}

TEST_CASE("segment doc counts add up to admitted documents") {
  TmpDir tmp;
  IndexOptions options;
  options.writer_buffer_bytes = 256;
  auto index = Index::create(tmp / "idx", options);
  uint64_t indexed = 0;
  for (int i = 0; i < 37; ++i) {
    if (index->add_document(doc_of("text " + std::to_string(i % 5)), i % 2 == 0).indexed()) {
      ++indexed;
    }
  }
  index->refresh();
  CHECK(index->searcher()->doc_count() == indexed);
}

TEST_CASE("invalid utf8 and closed index are rejected") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  CHECK_THROWS_WITH_AS(index->add_document(doc_of("bad \xC0\xAF bytes"), false),
                       doctest::Contains("InvalidUtf8"), Error);
  index->close();
  CHECK_THROWS_WITH_AS(index->add_document(doc_of("after close"), false),
                       doctest::Contains("IndexClosed"), Error);
  CHECK_THROWS_WITH_AS(index->refresh(), doctest::Contains("IndexClosed"), Error);
}

TEST_CASE("create refuses an existing index directory") {
  TmpDir tmp;
  Index::create(tmp / "idx");
  CHECK_THROWS_WITH_AS(Index::create(tmp / "idx"), doctest::Contains("AlreadyExists"), Error);
  CHECK(Index::exists(tmp / "idx"));
  CHECK_FALSE(Index::exists(tmp / "other"));
  CHECK_THROWS_WITH_AS(Index::open(tmp / "other"), doctest::Contains("UnknownIndex"), Error);
}

}  // TEST_SUITE
