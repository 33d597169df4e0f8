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
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ftsearch/analysis.hpp"
#include "ftsearch/document.hpp"
#include "ftsearch/segment.hpp"
#include "ftsearch/sha256.hpp"

namespace fts {

struct IndexOptions {
  analysis::AnalyzerConfig analyzer = analysis::AnalyzerConfig::web_content();
  /// Approximate in-memory postings budget; the writer seals a segment to
  /// disk when it is exceeded. Sealed segments stay invisible until refresh.
  uint64_t writer_buffer_bytes = 256ull << 20;
};

struct AddOutcome {
  enum class Kind { kIndexed, kSkippedDuplicate };
  Kind kind = Kind::kIndexed;
  /// New doc_id, or the already-stored document's id for duplicates.
  uint64_t doc_id = 0;

  bool indexed() const { return kind == Kind::kIndexed; }
};

/// What a refresh published: aggregate over the segments it sealed.
struct SegmentInfo {
  uint64_t segment_id = 0;  // id of the newest sealed segment
  uint64_t doc_count = 0;   // documents made visible by this refresh
  uint64_t index_bytes = 0; // bytes of the newly published segment files
};

struct IndexCounters {
  uint64_t docs_indexed = 0;
  uint64_t dup_skipped = 0;
  uint64_t raw_bytes = 0;
  uint64_t index_bytes = 0;      // published segment files only
  uint64_t total_disk_bytes = 0; // segments + document store + bookkeeping
  double ingest_wall_seconds = 0.0;
  uint64_t avg_peak_memory_bytes = 0;
};

class DocStoreFile;

/// Immutable view of the index at the last refresh. Cheap to copy around;
/// safe to use concurrently with an active writer.
class Searcher {
 public:
  uint64_t doc_count() const { return doc_count_; }
  const analysis::AnalyzerConfig& analyzer() const { return analyzer_; }

  /// Per-segment cursors for `term`, ordered by ascending doc_id range.
  std::vector<PostingsCursor> term_postings(std::string_view term) const;

  StoredDocument document(uint64_t doc_id) const;
  std::string_view language_of(uint64_t doc_id) const;

 private:
  friend class Index;

  analysis::AnalyzerConfig analyzer_;
  uint64_t doc_count_ = 0;
  std::vector<std::shared_ptr<SegmentReader>> segments_;
  std::shared_ptr<DocStoreFile> store_;
  std::shared_ptr<const std::vector<uint64_t>> record_ends_;
  std::shared_ptr<const std::vector<uint32_t>> language_ids_;
  std::shared_ptr<const std::vector<std::string>> language_names_;
};

/// A document analyzed and hashed outside the writer lock, ready for
/// admission.
struct PreparedDocument {
  DocumentInput input;
  Sha256Digest digest{};
  std::vector<std::pair<std::string, std::vector<uint32_t>>> term_positions;
};

/// A single-writer positional index over one `text` field, with an on-disk
/// document store and optional SHA-256 content deduplication.
class Index {
 public:
  static std::shared_ptr<Index> create(const std::filesystem::path& dir,
                                       IndexOptions options = {});
  static std::shared_ptr<Index> open(const std::filesystem::path& dir);
  static bool exists(const std::filesystem::path& dir);

  ~Index();
  Index(const Index&) = delete;
  Index& operator=(const Index&) = delete;

  /// Analyzes and stores one document. With dedup on, a text whose SHA-256
  /// was already stored is skipped and the index left unchanged.
  AddOutcome add_document(const DocumentInput& input, bool dedup);

  /// Analysis + hashing half of add_document; lock-free, callable from any
  /// worker thread. Throws InvalidUtf8.
  PreparedDocument prepare(DocumentInput input) const;

  /// Admission half: dedup check, doc_id assignment, store append, postings
  /// merge. Serialized internally.
  AddOutcome add_prepared(PreparedDocument prepared, bool dedup);

  /// Publishes everything added so far. Returns nullopt when nothing was
  /// pending.
  std::optional<SegmentInfo> refresh();

  /// Snapshot of the last refresh.
  std::shared_ptr<const Searcher> searcher() const;

  const analysis::AnalyzerConfig& analyzer() const { return options_.analyzer; }
  const std::filesystem::path& directory() const { return dir_; }

  IndexCounters counters() const;

  /// Accumulates ingestion wall time and peak-memory figures for stats
  /// reporting; persisted at the next refresh.
  void record_ingest(double wall_seconds, uint64_t peak_memory_bytes);

  /// Flushes the document store and rejects further writes. Pending
  /// unrefreshed documents are discarded on the next open.
  void close();

 private:
  Index() = default;

  struct SegmentMeta {
    std::string file;
    uint64_t id = 0;
    uint64_t first_doc_id = 0;
    uint64_t doc_count = 0;
    uint64_t raw_bytes = 0;
    uint64_t index_bytes = 0;
  };

  void load_manifest();
  void save_manifest_locked();
  void publish_snapshot_locked();
  void seal_pending_postings_locked();
  uint32_t intern_language_locked(std::string_view language);
  void ensure_dedup_registry_locked();

  std::filesystem::path dir_;
  IndexOptions options_;

  mutable std::mutex mutex_;
  bool closed_ = false;

  // Persistent counters (manifest).
  uint64_t next_doc_id_ = 0;
  uint64_t next_segment_id_ = 1;
  uint64_t dup_skipped_ = 0;
  uint64_t raw_bytes_ = 0;
  double ingest_wall_seconds_ = 0.0;
  uint64_t avg_peak_memory_bytes_ = 0;
  std::vector<SegmentMeta> segments_;

  // Published doc-store bookkeeping.
  std::vector<uint64_t> record_ends_;
  std::vector<uint32_t> language_ids_;
  std::vector<std::string> language_names_;
  std::unordered_map<std::string, uint32_t> language_lookup_;

  // Writer state since the last refresh.
  std::unordered_map<std::string, std::vector<std::pair<uint64_t, std::vector<uint32_t>>>>
      pending_postings_;
  uint64_t pending_postings_bytes_ = 0;
  uint64_t pending_first_doc_id_ = 0;
  uint64_t pending_raw_bytes_ = 0;
  std::vector<uint64_t> pending_record_ends_;
  std::vector<uint32_t> pending_language_ids_;
  std::vector<SegmentMeta> sealed_unpublished_;
  bool manifest_dirty_ = false;

  std::shared_ptr<DocStoreFile> store_;

  std::optional<std::unordered_map<Sha256Digest, uint64_t, Sha256DigestHash>> dedup_registry_;

  std::shared_ptr<const Searcher> snapshot_;
};

}  // namespace fts
