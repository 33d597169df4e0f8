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
#include <zlib.h>

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include "ftsearch/bulk.hpp"
#include "ftsearch/error.hpp"
#include "ftsearch/query.hpp"
#include "ftsearch/synth.hpp"
#include "support/randgen.hpp"
#include "support/tmpdir.hpp"

using namespace fts;
using namespace fts::bulk;
using fts::testing::RandomQueries;
using fts::testing::TmpDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

void write_gzip(const std::filesystem::path& path, const std::string& content) {
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  REQUIRE(gzwrite(gz, content.data(), static_cast<unsigned>(content.size())) ==
          static_cast<int>(content.size()));
  gzclose(gz);
}

BulkParams quick_params(uint32_t workers = 2) {
  BulkParams params;
  params.worker_count = workers;
  params.chunk_size = 16;
  params.queue_size = 4;
  return params;
}

std::vector<DocumentInput> docs_from_synth(uint64_t docs, uint64_t seed, uint32_t replicate = 1) {
  synth::CorpusSpec spec;
  spec.docs = docs;
  spec.seed = seed;
  spec.vocabulary = 60;
  spec.words_min = 5;
  spec.words_max = 30;
  spec.replicate = replicate;
  return synth::generate_corpus(spec);
}

}  // namespace

TEST_SUITE("bulk") {

TEST_CASE("planner applies the chunk-size bound") {
  BulkParams params = plan_bulk_params(10240, 104857600, 8, 8ull << 30);
  CHECK(params.chunk_size == 10240);  // 100 MiB / 10 KiB
  CHECK(params.worker_count == 8);
  CHECK(params.queue_size == 4);
  CHECK(params.queue_size >= 2);
  CHECK(params.queue_size <= 8);

  BulkParams capped = plan_bulk_params(10240, 104857600, 16, 8ull << 30);
  CHECK(capped.worker_count <= 16);

  // Tight RAM shrinks the chunk below the Eq. (1) bound.
  BulkParams tight = plan_bulk_params(1024, 100ull << 20, 4, 1ull << 20);
  CHECK(tight.chunk_size < (100ull << 20) / 1024);
  CHECK(static_cast<uint64_t>(tight.chunk_size) * 1024 * (tight.queue_size + tight.worker_count) <=
        (1ull << 20));

  CHECK_THROWS_WITH_AS(plan_bulk_params(1 << 20, 100 << 20, 4, 1 << 20),
                       doctest::Contains("InfeasibleBudget"), Error);
  CHECK_THROWS_AS(plan_bulk_params(0, 1, 1, 1), Error);
}

TEST_CASE("planned chunk size always satisfies the byte cap") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<uint64_t> avg(16, 1 << 20);
  for (int i = 0; i < 200; ++i) {
    uint64_t doc = avg(rng);
    uint64_t cap = doc * std::uniform_int_distribution<uint64_t>(1, 4096)(rng);
    BulkParams params = plan_bulk_params(doc, cap, 4, 64ull << 30);
    CHECK(static_cast<uint64_t>(params.chunk_size) * doc <= cap);
    CHECK(params.chunk_size >= 1);
  }
}

TEST_CASE("throughput ceiling model") {
  CHECK(estimate_throughput_ceiling(50e-6) == 10000.0);
  CHECK(estimate_throughput_ceiling(100e-6) == 5000.0);
  CHECK(estimate_throughput_ceiling(25e-6) == 20000.0);
  CHECK_THROWS_AS(estimate_throughput_ceiling(0.0), Error);
}

TEST_CASE("bulk report accounting is conserved") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  auto docs = docs_from_synth(500, 1);
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, quick_params(), false);

  CHECK(report.docs_read == 500);
  CHECK(report.docs_indexed == 500);
  CHECK(report.docs_failed == 0);
  CHECK(report.docs_skipped_duplicate == 0);
  CHECK(report.docs_indexed + report.docs_skipped_duplicate + report.docs_failed ==
        report.docs_read);
  CHECK(report.wall_seconds > 0);
  CHECK(report.indexing_rate > 0);
  CHECK(index->searcher()->doc_count() == 500);  // final refresh happened
}

TEST_CASE("bulk dedup counts skipped duplicates") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  auto docs = docs_from_synth(100, 2, 8);  // every doc replicated 8 times
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, quick_params(), true);

  CHECK(report.docs_read == 800);
  CHECK(report.docs_indexed == 100);
  CHECK(report.docs_skipped_duplicate == 700);
  CHECK(index->searcher()->doc_count() == 100);
}

TEST_CASE("per-document failures never abort the batch") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  std::vector<DocumentInput> docs;
  for (int i = 0; i < 99; ++i) {
    docs.push_back({"ok-" + std::to_string(i), "valid text " + std::to_string(i), "", "", ""});
  }
  docs.push_back({"bad-1", "broken \xC0\xAF utf8", "", "", ""});
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, quick_params(), false);

  CHECK(report.docs_read == 100);
  CHECK(report.docs_indexed == 99);
  CHECK(report.docs_failed == 1);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].record_ref == "bad-1");
  CHECK(report.failures[0].error.find("InvalidUtf8") != std::string::npos);
}

TEST_CASE("jsonl ingestion skips blanks and reports bad lines") {
  TmpDir tmp;
  auto path = tmp / "input.jsonl";
  write_file(path,
             R"({"id": "a", "text": "first doc", "language": "eng"})" "\n"
             "\n"
             "{not json}\n"
             R"({"id": "c", "text": "third doc", "source": "s", "url": "u"})" "\n"
             R"({"id": "d", "missing": "text field"})" "\n");
  auto index = Index::create(tmp / "idx");
  BulkReport report = bulk_index_files(*index, {path}, quick_params(1), false);

  CHECK(report.docs_read == 4);  // blank line is not a document
  CHECK(report.docs_indexed == 2);
  CHECK(report.docs_failed == 2);
  auto searcher = index->searcher();
  CHECK(searcher->document(0).external_id == "a");
  CHECK(searcher->language_of(0) == "eng");
}

TEST_CASE("gzip jsonl is accepted transparently") {
  TmpDir tmp;
  std::string lines;
  for (int i = 0; i < 200; ++i) {
    lines += R"({"id": "g)" + std::to_string(i) + R"(", "text": "gzip doc )" +
             std::to_string(i) + "\"}\n";
  }
  auto path = tmp / "input.jsonl.gz";
  write_gzip(path, lines);
  auto index = Index::create(tmp / "idx");
  BulkReport report = bulk_index_files(*index, {path}, quick_params(), false);
  CHECK(report.docs_indexed == 200);
  CHECK(query::count(*index->searcher(),
                     query::Ast{query::Match{"text", "gzip"}}) == 200);
}

TEST_CASE("oversized documents travel alone and are flagged") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  BulkParams params = quick_params(1);
  params.max_chunk_bytes = 256;
  std::vector<DocumentInput> docs;
  docs.push_back({"small", "tiny", "", "", ""});
  docs.push_back({"big", std::string(4096, 'x') + " gutenberg book", "", "", ""});
  docs.push_back({"small2", "tiny again", "", "", ""});
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, params, false);
  CHECK(report.docs_indexed == 3);
  CHECK(report.oversized_docs == 1);
}

TEST_CASE("in-flight bytes stay inside the backpressure envelope") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  BulkParams params;
  params.worker_count = 3;
  params.queue_size = 2;
  params.chunk_size = 8;
  params.max_chunk_bytes = 4096;
  auto docs = docs_from_synth(3000, 3);
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, params, false);
  CHECK(report.peak_inflight_bytes > 0);
  CHECK(report.peak_inflight_bytes <=
        (params.queue_size + params.worker_count) * params.max_chunk_bytes);
}

TEST_CASE("indexed content is independent of worker count") {
  auto build = [](uint32_t workers, const std::filesystem::path& dir) {
    auto index = Index::create(dir);
    auto docs = docs_from_synth(1500, 4);
    VectorSource source(std::move(docs));
    BulkParams params = quick_params(workers);
    bulk_index(*index, source, params, false);
    return index;
  };
  TmpDir tmp;
  auto one = build(1, tmp / "one");
  auto four = build(4, tmp / "four");

  RandomQueries gen(55, 60);
  auto s1 = one->searcher();
  auto s4 = four->searcher();
  CHECK(s1->doc_count() == s4->doc_count());
  synth::CorpusSpec spec;
  for (int q = 0; q < 40; ++q) {
    // Build queries over the synthetic vocabulary actually used.
    auto vocab = synth::make_vocabulary(60, 4);
    std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
    std::string text = vocab[pick(gen.rng())];
    if (q % 2 == 0) text += " " + vocab[pick(gen.rng())];
    query::MatchPhrase phrase{"text", text, q % 3u};
    CHECK(query::count(*s1, query::Ast{phrase}) == query::count(*s4, query::Ast{phrase}));
  }
}

TEST_CASE("missing input files are fatal before any indexing") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  CHECK_THROWS_WITH_AS(
      bulk_index_files(*index, {tmp / "nope.jsonl"}, quick_params(), false),
      doctest::Contains("InputUnreadable"), Error);
  CHECK_THROWS_WITH_AS(
      bulk_index_files(*index, {tmp / "wrong.xml"}, quick_params(), false),
      doctest::Contains("InputUnreadable"), Error);
}

TEST_CASE("periodic refresh makes documents visible during the run") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");

  // A source that trickles documents so the run takes a while.
  class SlowSource : public DocumentSource {
   public:
    Status next(DocumentInput& doc, std::string& ref, std::string& error) override {
      (void)error;
      if (at_ >= 300) return Status::kEnd;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      doc = DocumentInput{"slow-" + std::to_string(at_), "slow doc", "", "", ""};
      ref = doc.external_id;
      ++at_;
      return Status::kDoc;
    }
    std::string name() const override { return "<slow>"; }

   private:
    size_t at_ = 0;
  };

  BulkParams params;
  params.worker_count = 1;
  params.chunk_size = 10;
  params.queue_size = 2;
  params.refresh_policy = RefreshPolicy::every_seconds(0.01);

  std::atomic<bool> done{false};
  std::atomic<uint64_t> partial_seen{0};
  std::thread watcher([&] {
    while (!done.load()) {
      uint64_t n = index->searcher()->doc_count();
      if (n > 0 && n < 300) partial_seen.store(n);
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  });

  SlowSource source;
  BulkReport report = bulk_index(*index, source, params, false);
  done.store(true);
  watcher.join();

  CHECK(report.docs_indexed == 300);
  CHECK(partial_seen.load() > 0);  // some docs were visible before the end
  CHECK(index->searcher()->doc_count() == 300);

  BulkParams bad;
  bad.refresh_policy = RefreshPolicy::every_seconds(-1);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("vm hwm sampler reports something plausible") {
  TmpDir tmp;
  auto index = Index::create(tmp / "idx");
  auto docs = docs_from_synth(50, 9);
  VectorSource source(std::move(docs));
  BulkReport report = bulk_index(*index, source, quick_params(1), false);
  // Linux: VmHWM should be present and at least a megabyte.
  CHECK(report.peak_rss_estimate_bytes > 1 << 20);
}

}  // TEST_SUITE
