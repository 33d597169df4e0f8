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

namespace fts::server {

struct ServerConfig {
  std::string bind_address = "127.0.0.1";  // loopback unless explicitly overridden
  int port = 9200;                         // 0 picks a free port
  std::filesystem::path data_dir = "data";
  uint64_t max_body_bytes = 256ull << 20;
};

/// Single-node HTTP service: index lifecycle, NDJSON bulk, search/count,
/// stats, and reindex-based merging.
///
///   PUT  /{index}              create (?ok_if_exists=true for idempotence)
///   POST /{index}/_bulk        NDJSON, per-item statuses (?refresh=false,
///                              ?dedup=true)
///   GET  /{index}/_search      query body; from/size paging, doc_id order
///   GET  /{index}/_count
///   GET  /{index}/_stats
///   POST /_reindex             {"source": ..., "dest": ..., "dedup": ...}
///   GET  /_health
class IndexService {
 public:
  explicit IndexService(ServerConfig config);
  ~IndexService();

  IndexService(const IndexService&) = delete;
  IndexService& operator=(const IndexService&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();

  /// Serves on the calling thread until stop(); returns 0 on clean exit.
  int run();

  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fts::server
