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
#include <memory>
#include <string>
#include <vector>

#include "ftsearch/document.hpp"
#include "ftsearch/index.hpp"

namespace fts::bulk {

/// Pull-based reader over one input file. Implementations report malformed
/// records individually so a bad line never aborts the batch.
class DocumentSource {
 public:
  enum class Status { kDoc, kBadRecord, kEnd };

  virtual ~DocumentSource() = default;

  /// On kDoc fills `doc`; on kBadRecord fills `error` and `record_ref`.
  virtual Status next(DocumentInput& doc, std::string& record_ref, std::string& error) = 0;

  virtual std::string name() const = 0;
};

/// Dispatches on extension: .jsonl/.ndjson (optionally .gz) and .parquet.
/// Throws InputUnreadable when the file cannot be opened or identified.
std::unique_ptr<DocumentSource> open_document_source(const std::filesystem::path& path);

/// In-memory source, mainly for tests and generated corpora.
class VectorSource : public DocumentSource {
 public:
  explicit VectorSource(std::vector<DocumentInput> docs) : docs_(std::move(docs)) {}

  Status next(DocumentInput& doc, std::string& record_ref, std::string& error) override;
  std::string name() const override { return "<memory>"; }

 private:
  std::vector<DocumentInput> docs_;
  size_t at_ = 0;
};

struct RefreshPolicy {
  enum class Kind { kDisabledDuringBulk, kEverySeconds };
  Kind kind = Kind::kDisabledDuringBulk;
  double seconds = 0.0;

  static RefreshPolicy disabled_during_bulk() { return {}; }
  static RefreshPolicy every_seconds(double s) {
    return {Kind::kEverySeconds, s};
  }
};

/// The four ingestion tunables plus the refresh policy.
struct BulkParams {
  uint32_t worker_count = 1;
  uint32_t chunk_size = 1000;
  uint64_t max_chunk_bytes = 100ull << 20;
  uint32_t queue_size = 4;
  RefreshPolicy refresh_policy;

  void validate() const;
};

struct BulkFailure {
  std::string record_ref;
  std::string error;
};

struct BulkReport {
  uint64_t docs_read = 0;
  uint64_t docs_indexed = 0;
  uint64_t docs_skipped_duplicate = 0;
  uint64_t docs_failed = 0;
  uint64_t oversized_docs = 0;  // documents larger than max_chunk_bytes, sent alone
  std::vector<BulkFailure> failures;  // first kMaxRecordedFailures only
  uint64_t failures_truncated = 0;
  double wall_seconds = 0.0;
  double indexing_rate = 0.0;  // docs_indexed / wall_seconds
  uint64_t peak_inflight_bytes = 0;
  uint64_t peak_rss_estimate_bytes = 0;

  static constexpr size_t kMaxRecordedFailures = 1000;
};

/// Derives chunk_size from max_chunk_bytes / avg_doc_size, then shrinks it
/// until (queue_size + worker_count) * chunk_bytes fits the RAM budget.
/// Throws InfeasibleBudget when even one average document per chunk cannot
/// fit.
BulkParams plan_bulk_params(uint64_t avg_doc_size, uint64_t max_chunk_bytes,
                            uint32_t cores, uint64_t ram_budget);

/// Upper bound imposed by two sequential storage round-trips per inserted
/// document: 1 / (2 * latency).
double estimate_throughput_ceiling(double storage_round_trip_latency_seconds);

/// Runs the producer / bounded-queue / worker pipeline over one source and
/// issues a final refresh. Per-document failures are recorded, never fatal.
BulkReport bulk_index(Index& index, DocumentSource& source, const BulkParams& params,
                      bool dedup = false);

/// Convenience wrapper chaining several input files.
BulkReport bulk_index_files(Index& index, const std::vector<std::filesystem::path>& inputs,
                            const BulkParams& params, bool dedup = false);

}  // namespace fts::bulk
