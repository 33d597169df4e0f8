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

#include "ftsearch/index.hpp"
#include "ftsearch/query.hpp"

namespace fts::shard {

/// Stable shard assignment: first 8 bytes of SHA-256(routing_key) read
/// big-endian, mod n_shards. Identical across runs and platforms.
uint32_t route(std::string_view routing_key, uint32_t n_shards);

/// A set of independent indices holding disjoint document partitions.
class ShardSet {
 public:
  ShardSet(std::vector<std::shared_ptr<Index>> shards, std::string routing_seed = "");

  /// Creates `n_shards` empty indices under dir/shard_NNN.
  static ShardSet create(const std::filesystem::path& dir, uint32_t n_shards,
                         IndexOptions options = {});
  static ShardSet open(const std::filesystem::path& dir);

  uint32_t shard_for(std::string_view routing_key) const;

  /// Routes by key and adds to the owning shard.
  AddOutcome add_document(std::string_view routing_key, const DocumentInput& doc, bool dedup);

  void refresh_all();

  /// Per-shard counts summed; valid because each document lives in exactly
  /// one shard. Issues the per-shard queries concurrently.
  uint64_t scatter_gather_count(const query::Ast& ast,
                                const query::DocFilter& filter = {}) const;

  uint64_t scatter_gather_occurrences(const query::MatchPhrase& phrase,
                                      const query::DocFilter& filter = {}) const;

  size_t size() const { return shards_.size(); }
  const std::shared_ptr<Index>& shard(size_t i) const { return shards_.at(i); }

 private:
  std::vector<std::shared_ptr<Index>> shards_;
  std::string routing_seed_;
};

struct MergeReport {
  uint64_t sources = 0;
  uint64_t docs_copied = 0;
  uint64_t docs_skipped_duplicate = 0;
  uint64_t docs_failed = 0;
  double wall_seconds = 0.0;
};

struct MergeSource {
  enum class Kind { kLocal, kRemote };
  Kind kind = Kind::kLocal;
  std::filesystem::path path;  // local index directory
  std::string base_url;        // http://host:port
  std::string index_name;      // remote index name

  static MergeSource local(std::filesystem::path p) {
    MergeSource s;
    s.path = std::move(p);
    return s;
  }
  static MergeSource remote(std::string url, std::string index) {
    MergeSource s;
    s.kind = Kind::kRemote;
    s.base_url = std::move(url);
    s.index_name = std::move(index);
    return s;
  }
  /// "http://host:port/name" becomes a remote source, anything else a path.
  static MergeSource parse(const std::string& spec);
};

struct MergeOptions {
  bool dedup = false;
  bool append = false;
  uint64_t page_size = 1000;  // remote drain page
};

/// Re-feeds every source document through dest's analyzer and pipeline, one
/// concurrent reader per source, then refreshes dest. Remote sources are
/// drained through the HTTP search API with from/size pagination.
MergeReport merge_indices(const std::vector<MergeSource>& sources, Index& dest,
                          const MergeOptions& options = {});

}  // namespace fts::shard
