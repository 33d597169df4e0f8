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

#include "ftsearch/bulk.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <limits>
#include <optional>
#include <thread>

#include "ftsearch/error.hpp"

namespace fts::bulk {

namespace {

struct Chunk {
  std::vector<DocumentInput> docs;
  std::vector<std::string> record_refs;
  uint64_t payload_bytes = 0;
  bool oversized = false;
};

/// Bounded chunk queue that owns the in-flight byte accounting: a chunk
/// counts from enqueue until the worker processing it calls release().
class ChunkQueue {
 public:
  explicit ChunkQueue(size_t capacity) : capacity_(capacity) {}

  void push(Chunk chunk) {
    std::unique_lock<std::mutex> lock(mutex_);
    not_full_.wait(lock, [this] { return queue_.size() < capacity_ || aborted_; });
    if (aborted_) return;
    inflight_bytes_ += chunk.payload_bytes;
    peak_inflight_bytes_ = std::max(peak_inflight_bytes_, inflight_bytes_);
    queue_.push_back(std::move(chunk));
    not_empty_.notify_one();
  }

  std::optional<Chunk> pop() {
    std::unique_lock<std::mutex> lock(mutex_);
    not_empty_.wait(lock, [this] { return !queue_.empty() || closed_ || aborted_; });
    if (queue_.empty()) return std::nullopt;
    Chunk chunk = std::move(queue_.front());
    queue_.pop_front();
    not_full_.notify_one();
    return chunk;
  }

  void release(uint64_t bytes) {
    std::lock_guard<std::mutex> lock(mutex_);
    inflight_bytes_ -= bytes;
  }

  void close() {
    std::lock_guard<std::mutex> lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
  }

  /// Unblocks everyone after a fatal error; queued chunks are dropped.
  void abort() {
    std::lock_guard<std::mutex> lock(mutex_);
    aborted_ = true;
    queue_.clear();
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  uint64_t peak_inflight_bytes() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return peak_inflight_bytes_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<Chunk> queue_;
  size_t capacity_;
  uint64_t inflight_bytes_ = 0;
  uint64_t peak_inflight_bytes_ = 0;
  bool closed_ = false;
  bool aborted_ = false;
};

uint64_t read_vm_hwm_bytes() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      uint64_t kib = 0;
      for (char c : line) {
        if (c >= '0' && c <= '9') kib = kib * 10 + static_cast<uint64_t>(c - '0');
      }
      return kib * 1024;
    }
  }
  return 0;
}

bool is_fatal(ErrorCode code) {
  return code == ErrorCode::kIndexClosed || code == ErrorCode::kStorageFull ||
         code == ErrorCode::kIoFailure;
}

}  // namespace

void BulkParams::validate() const {
  if (worker_count == 0) throw_error(ErrorCode::kInvalidConfig, "worker_count must be >= 1");
  if (chunk_size == 0) throw_error(ErrorCode::kInvalidConfig, "chunk_size must be >= 1");
  if (max_chunk_bytes == 0) throw_error(ErrorCode::kInvalidConfig, "max_chunk_bytes must be >= 1");
  if (queue_size == 0) throw_error(ErrorCode::kInvalidConfig, "queue_size must be >= 1");
  if (refresh_policy.kind == RefreshPolicy::Kind::kEverySeconds &&
      refresh_policy.seconds <= 0) {
    throw_error(ErrorCode::kInvalidConfig, "refresh interval must be positive");
  }
}

BulkParams plan_bulk_params(uint64_t avg_doc_size, uint64_t max_chunk_bytes,
                            uint32_t cores, uint64_t ram_budget) {
  if (avg_doc_size == 0 || max_chunk_bytes == 0 || cores == 0 || ram_budget == 0) {
    throw_error(ErrorCode::kInvalidConfig, "planner inputs must be positive");
  }
  BulkParams params;
  params.queue_size = 4;
  params.worker_count = cores;
  params.max_chunk_bytes = max_chunk_bytes;

  uint64_t by_cap = max_chunk_bytes / avg_doc_size;  // Eq. (1) bound
  uint64_t lanes = params.queue_size + params.worker_count;
  uint64_t by_ram = ram_budget / (lanes * avg_doc_size);
  if (by_ram == 0) {
    throw_error(ErrorCode::kInfeasibleBudget,
                "one average document per chunk already exceeds the RAM budget");
  }
  uint64_t chunk_size = std::min(by_cap, by_ram);
  params.chunk_size = static_cast<uint32_t>(
      std::clamp<uint64_t>(chunk_size, 1, std::numeric_limits<uint32_t>::max()));
  return params;
}

double estimate_throughput_ceiling(double storage_round_trip_latency_seconds) {
  if (storage_round_trip_latency_seconds <= 0) {
    throw_error(ErrorCode::kInvalidConfig, "latency must be positive");
  }
  return 1.0 / (2.0 * storage_round_trip_latency_seconds);
}

BulkReport bulk_index(Index& index, DocumentSource& source, const BulkParams& params,
                      bool dedup) {
  params.validate();
  auto started = std::chrono::steady_clock::now();

  ChunkQueue queue(params.queue_size);
  BulkReport report;

  std::mutex report_mutex;
  std::atomic<uint64_t> indexed{0};
  std::atomic<uint64_t> skipped{0};
  std::atomic<uint64_t> failed{0};
  std::atomic<bool> fatal{false};
  std::optional<Error> fatal_error;
  std::mutex fatal_mutex;

  auto record_failure = [&](const std::string& ref, const std::string& message) {
    failed.fetch_add(1, std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(report_mutex);
    if (report.failures.size() < BulkReport::kMaxRecordedFailures) {
      report.failures.push_back({ref, message});
    } else {
      ++report.failures_truncated;
    }
  };

  auto raise_fatal = [&](const Error& error) {
    {
      std::lock_guard<std::mutex> lock(fatal_mutex);
      if (!fatal_error) fatal_error = error;
    }
    fatal.store(true, std::memory_order_release);
    queue.abort();
  };

  std::mutex refresh_mutex;
  auto last_refresh = started;
  auto maybe_periodic_refresh = [&] {
    if (params.refresh_policy.kind != RefreshPolicy::Kind::kEverySeconds) return;
    std::lock_guard<std::mutex> lock(refresh_mutex);
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_refresh).count();
    if (elapsed >= params.refresh_policy.seconds) {
      index.refresh();
      last_refresh = now;
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(params.worker_count);
  for (uint32_t w = 0; w < params.worker_count; ++w) {
    workers.emplace_back([&] {
      while (auto chunk = queue.pop()) {
        for (size_t i = 0; i < chunk->docs.size(); ++i) {
          if (fatal.load(std::memory_order_acquire)) break;
          try {
            AddOutcome outcome =
                index.add_prepared(index.prepare(std::move(chunk->docs[i])), dedup);
            if (outcome.indexed()) {
              indexed.fetch_add(1, std::memory_order_relaxed);
            } else {
              skipped.fetch_add(1, std::memory_order_relaxed);
            }
          } catch (const Error& e) {
            if (is_fatal(e.code())) {
              raise_fatal(e);
              break;
            }
            record_failure(chunk->record_refs[i], e.what());
          }
        }
        queue.release(chunk->payload_bytes);
        maybe_periodic_refresh();
      }
    });
  }

  // Producer: decode the input into bounded chunks on this thread.
  Chunk current;
  auto flush = [&] {
    if (current.docs.empty()) return;
    queue.push(std::move(current));
    current = Chunk{};
  };

  try {
    DocumentInput doc;
    std::string record_ref;
    std::string error;
    while (!fatal.load(std::memory_order_acquire)) {
      DocumentSource::Status status = source.next(doc, record_ref, error);
      if (status == DocumentSource::Status::kEnd) break;
      ++report.docs_read;
      if (status == DocumentSource::Status::kBadRecord) {
        record_failure(record_ref, error);
        continue;
      }
      uint64_t doc_bytes = doc.byte_size();
      if (doc_bytes > params.max_chunk_bytes) {
        // A single document over the cap travels alone and is flagged.
        flush();
        ++report.oversized_docs;
        Chunk solo;
        solo.docs.push_back(std::move(doc));
        solo.record_refs.push_back(record_ref);
        solo.payload_bytes = doc_bytes;
        solo.oversized = true;
        queue.push(std::move(solo));
        continue;
      }
      if (current.docs.size() + 1 > params.chunk_size ||
          current.payload_bytes + doc_bytes > params.max_chunk_bytes) {
        flush();
      }
      current.docs.push_back(std::move(doc));
      current.record_refs.push_back(record_ref);
      current.payload_bytes += doc_bytes;
    }
    flush();
  } catch (const Error& e) {
    queue.close();
    for (auto& worker : workers) worker.join();
    throw;
  }

  queue.close();
  for (auto& worker : workers) worker.join();

  {
    std::lock_guard<std::mutex> lock(fatal_mutex);
    if (fatal_error) throw *fatal_error;
  }

  index.refresh();

  report.docs_indexed = indexed.load();
  report.docs_skipped_duplicate = skipped.load();
  report.docs_failed = failed.load();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report.indexing_rate =
      report.wall_seconds > 0 ? static_cast<double>(report.docs_indexed) / report.wall_seconds
                              : 0.0;
  report.peak_inflight_bytes = queue.peak_inflight_bytes();
  report.peak_rss_estimate_bytes = read_vm_hwm_bytes();
  index.record_ingest(report.wall_seconds, report.peak_rss_estimate_bytes > 0
                                               ? report.peak_rss_estimate_bytes
                                               : report.peak_inflight_bytes);
  return report;
}

BulkReport bulk_index_files(Index& index, const std::vector<std::filesystem::path>& inputs,
                            const BulkParams& params, bool dedup) {
  // Probe every input up front so a missing file fails before any indexing.
  std::vector<std::unique_ptr<DocumentSource>> sources;
  sources.reserve(inputs.size());
  for (const auto& path : inputs) {
    sources.push_back(open_document_source(path));
  }

  class ChainedSource : public DocumentSource {
   public:
    explicit ChainedSource(std::vector<std::unique_ptr<DocumentSource>> sources)
        : sources_(std::move(sources)) {}

    Status next(DocumentInput& doc, std::string& record_ref, std::string& error) override {
      while (at_ < sources_.size()) {
        Status status = sources_[at_]->next(doc, record_ref, error);
        if (status != Status::kEnd) return status;
        ++at_;
      }
      return Status::kEnd;
    }

    std::string name() const override { return "<chain>"; }

   private:
    std::vector<std::unique_ptr<DocumentSource>> sources_;
    size_t at_ = 0;
  };

  ChainedSource chain(std::move(sources));
  return bulk_index(index, chain, params, dedup);
}

}  // namespace fts::bulk
