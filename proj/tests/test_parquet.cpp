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

// The fixtures under tests/data were written by pyarrow and exercise plain,
// dictionary+snappy, gzip, and data-page-v2 layouts, across several row
// groups, with nulls in optional columns and two null text cells.

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "ftsearch/bulk.hpp"
#include "ftsearch/error.hpp"
#include "support/tmpdir.hpp"

using namespace fts;
using namespace fts::bulk;
using fts::testing::TmpDir;

namespace {

std::filesystem::path data_dir() { return FTS_TESTS_DATA_DIR; }

struct Drained {
  std::vector<DocumentInput> docs;
  std::vector<std::string> errors;
};

Drained drain(const std::filesystem::path& path) {
  auto source = open_document_source(path);
  Drained out;
  DocumentInput doc;
  std::string ref;
  std::string error;
  while (true) {
    auto status = source->next(doc, ref, error);
    if (status == DocumentSource::Status::kEnd) break;
    if (status == DocumentSource::Status::kDoc) out.docs.push_back(doc);
    else out.errors.push_back(error);
  }
  return out;
}

nlohmann::json expected_rows() {
  std::ifstream in(data_dir() / "sample_expected.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

void check_against_expected(const Drained& drained) {
  nlohmann::json rows = expected_rows();
  size_t good = 0;
  size_t bad = 0;
  std::vector<nlohmann::json> good_rows;
  for (const auto& row : rows) {
    if (row["text"].is_null()) ++bad;
    else good_rows.push_back(row);
  }
  good = good_rows.size();

  REQUIRE(drained.docs.size() == good);
  CHECK(drained.errors.size() == bad);
  for (size_t i = 0; i < good; ++i) {
    const auto& want = good_rows[i];
    const DocumentInput& got = drained.docs[i];
    CHECK(got.external_id == want["id"].get<std::string>());
    CHECK(got.text == want["text"].get<std::string>());
    CHECK(got.source == (want["source"].is_null() ? "" : want["source"].get<std::string>()));
    CHECK(got.language ==
          (want["language"].is_null() ? "" : want["language"].get<std::string>()));
    CHECK(got.url == (want["url"].is_null() ? "" : want["url"].get<std::string>()));
  }
}

}  // namespace

TEST_SUITE("parquet") {

TEST_CASE("plain uncompressed layout") {
  check_against_expected(drain(data_dir() / "sample_plain.parquet"));
}

TEST_CASE("dictionary encoding with snappy") {
  check_against_expected(drain(data_dir() / "sample_dict_snappy.parquet"));
}

TEST_CASE("gzip codec") {
  check_against_expected(drain(data_dir() / "sample_gzip.parquet"));
}

TEST_CASE("data page v2") {
  check_against_expected(drain(data_dir() / "sample_v2.parquet"));
}

TEST_CASE("parquet feeds the bulk pipeline like jsonl") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  BulkParams params;
  params.worker_count = 2;
  params.chunk_size = 8;
  BulkReport report =
      bulk_index_files(*index, {data_dir() / "sample_dict_snappy.parquet"}, params, false);
  CHECK(report.docs_read == 57);
  CHECK(report.docs_indexed == 55);
  CHECK(report.docs_failed == 2);  // the two null-text rows
  CHECK(index->searcher()->doc_count() == 55);
}

TEST_CASE("non-parquet bytes are rejected as unreadable input") {
  TmpDir tmp;
  auto bogus = tmp / "fake.parquet";
  {
    std::ofstream out(bogus, std::ios::binary);
    out << "PAR1 but not really a parquet file at all............";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(open_document_source(bogus)),
                       doctest::Contains("InputUnreadable"), Error);
}

}  // TEST_SUITE
