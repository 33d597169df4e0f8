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

#include "ftsearch/shard.hpp"

#include <chrono>
#include <cstdio>
#include <future>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ftsearch/error.hpp"
#include "ftsearch/sha256.hpp"

namespace fts::shard {

uint32_t route(std::string_view routing_key, uint32_t n_shards) {
  if (n_shards == 0) throw_error(ErrorCode::kInvalidConfig, "n_shards must be >= 1");
  Sha256Digest digest = content_hash(routing_key);
  uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value = (value << 8) | digest[static_cast<size_t>(i)];
  return static_cast<uint32_t>(value % n_shards);
}

ShardSet::ShardSet(std::vector<std::shared_ptr<Index>> shards, std::string routing_seed)
    : shards_(std::move(shards)), routing_seed_(std::move(routing_seed)) {}

ShardSet ShardSet::create(const std::filesystem::path& dir, uint32_t n_shards,
                          IndexOptions options) {
  if (n_shards == 0) throw_error(ErrorCode::kInvalidConfig, "n_shards must be >= 1");
  std::vector<std::shared_ptr<Index>> shards;
  shards.reserve(n_shards);
  for (uint32_t i = 0; i < n_shards; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "shard_%03u", i);
    shards.push_back(Index::create(dir / name, options));
  }
  return ShardSet(std::move(shards));
}

ShardSet ShardSet::open(const std::filesystem::path& dir) {
  std::vector<std::shared_ptr<Index>> shards;
  for (uint32_t i = 0;; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "shard_%03u", i);
    if (!Index::exists(dir / name)) break;
    shards.push_back(Index::open(dir / name));
  }
  if (shards.empty()) {
    throw_error(ErrorCode::kUnknownIndex, "no shards under " + dir.string());
  }
  return ShardSet(std::move(shards));
}

uint32_t ShardSet::shard_for(std::string_view routing_key) const {
  std::string keyed = routing_seed_.empty()
                          ? std::string(routing_key)
                          : routing_seed_ + std::string(routing_key);
  return route(keyed, static_cast<uint32_t>(shards_.size()));
}

AddOutcome ShardSet::add_document(std::string_view routing_key, const DocumentInput& doc,
                                  bool dedup) {
  uint32_t at = shard_for(routing_key);
  if (!shards_[at]) throw_error(ErrorCode::kShardUnavailable, "shard " + std::to_string(at));
  return shards_[at]->add_document(doc, dedup);
}

void ShardSet::refresh_all() {
  for (auto& shard : shards_) {
    if (!shard) throw_error(ErrorCode::kShardUnavailable, "null shard handle");
    shard->refresh();
  }
}

uint64_t ShardSet::scatter_gather_count(const query::Ast& ast,
                                        const query::DocFilter& filter) const {
  if (shards_.empty()) {
    std::fprintf(stderr, "warning: scatter_gather_count over empty shard set\n");
    return 0;
  }
  std::vector<std::future<uint64_t>> futures;
  futures.reserve(shards_.size());
  for (size_t i = 0; i < shards_.size(); ++i) {
    if (!shards_[i]) throw_error(ErrorCode::kShardUnavailable, "shard " + std::to_string(i));
    futures.push_back(std::async(std::launch::async, [&, i] {
      return query::count(*shards_[i]->searcher(), ast, filter);
    }));
  }
  uint64_t total = 0;
  for (auto& f : futures) total += f.get();
  return total;
}

uint64_t ShardSet::scatter_gather_occurrences(const query::MatchPhrase& phrase,
                                              const query::DocFilter& filter) const {
  if (shards_.empty()) {
    std::fprintf(stderr, "warning: scatter_gather_occurrences over empty shard set\n");
    return 0;
  }
  std::vector<std::future<uint64_t>> futures;
  futures.reserve(shards_.size());
  for (size_t i = 0; i < shards_.size(); ++i) {
    if (!shards_[i]) throw_error(ErrorCode::kShardUnavailable, "shard " + std::to_string(i));
    futures.push_back(std::async(std::launch::async, [&, i] {
      return query::occurrence_count(*shards_[i]->searcher(), phrase, filter);
    }));
  }
  uint64_t total = 0;
  for (auto& f : futures) total += f.get();
  return total;
}

MergeSource MergeSource::parse(const std::string& spec) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    size_t scheme_end = spec.find("//") + 2;
    size_t path_at = spec.find('/', scheme_end);
    if (path_at == std::string::npos || path_at + 1 >= spec.size()) {
      throw_error(ErrorCode::kSourceUnreachable,
                  "remote source must be http://host:port/{index}: " + spec);
    }
    return remote(spec.substr(0, path_at), spec.substr(path_at + 1));
  }
  return local(spec);
}

namespace {

struct SourceStats {
  uint64_t copied = 0;
  uint64_t skipped = 0;
  uint64_t failed = 0;
};

SourceStats drain_local(const std::filesystem::path& path, Index& dest, bool dedup) {
  auto source = Index::open(path);
  auto searcher = source->searcher();
  SourceStats stats;
  for (uint64_t doc_id = 0; doc_id < searcher->doc_count(); ++doc_id) {
    StoredDocument stored = searcher->document(doc_id);
    DocumentInput input{std::move(stored.external_id), std::move(stored.text),
                        std::move(stored.source), std::move(stored.language),
                        std::move(stored.url)};
    try {
      AddOutcome outcome = dest.add_document(input, dedup);
      if (outcome.indexed()) ++stats.copied;
      else ++stats.skipped;
    } catch (const Error&) {
      ++stats.failed;
    }
  }
  return stats;
}

SourceStats drain_remote(const MergeSource& source, Index& dest, bool dedup,
                         uint64_t page_size) {
  httplib::Client client(source.base_url);
  client.set_read_timeout(60, 0);
  SourceStats stats;
  uint64_t from = 0;
  while (true) {
    nlohmann::json body = {
        {"query", {{"match_all", nlohmann::json::object()}}},
        {"from", from},
        {"size", page_size},
    };
    auto res = client.Post("/" + source.index_name + "/_search", body.dump(),
                           "application/json");
    if (!res || res->status != 200) {
      throw_error(ErrorCode::kSourceUnreachable,
                  source.base_url + "/" + source.index_name +
                      (res ? " returned status " + std::to_string(res->status)
                           : " is unreachable"));
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("hits")) {
      throw_error(ErrorCode::kSourceUnreachable, "malformed search response from " +
                                                     source.base_url);
    }
    const auto& hits = parsed["hits"];
    if (hits.empty()) break;
    for (const auto& hit : hits) {
      const auto& doc = hit.at("_source");
      DocumentInput input;
      input.external_id = doc.value("id", "");
      input.text = doc.value("text", "");
      input.source = doc.value("source", "");
      input.language = doc.value("language", "");
      input.url = doc.value("url", "");
      try {
        AddOutcome outcome = dest.add_document(input, dedup);
        if (outcome.indexed()) ++stats.copied;
        else ++stats.skipped;
      } catch (const Error&) {
        ++stats.failed;
      }
    }
    from += hits.size();
  }
  return stats;
}

}  // namespace

MergeReport merge_indices(const std::vector<MergeSource>& sources, Index& dest,
                          const MergeOptions& options) {
  auto started = std::chrono::steady_clock::now();
  if (!options.append && dest.counters().docs_indexed > 0) {
    throw_error(ErrorCode::kDestNotEmpty, dest.directory().string());
  }

  MergeReport report;
  report.sources = sources.size();

  std::vector<std::future<SourceStats>> futures;
  futures.reserve(sources.size());
  for (const MergeSource& source : sources) {
    futures.push_back(std::async(std::launch::async, [&dest, &options, &source] {
      if (source.kind == MergeSource::Kind::kLocal) {
        return drain_local(source.path, dest, options.dedup);
      }
      return drain_remote(source, dest, options.dedup, options.page_size);
    }));
  }

  std::optional<Error> first_error;
  for (auto& future : futures) {
    try {
      SourceStats stats = future.get();
      report.docs_copied += stats.copied;
      report.docs_skipped_duplicate += stats.skipped;
      report.docs_failed += stats.failed;
    } catch (const Error& e) {
      if (!first_error) first_error = e;
    }
  }
  if (first_error) throw *first_error;

  dest.refresh();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace fts::shard
