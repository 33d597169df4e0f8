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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftsearch/index.hpp"

namespace fts::metrics {

/// Per-dataset indexing statistics row.
struct IndexStats {
  std::string dataset_label;
  uint64_t data_size_bytes = 0;
  double wall_seconds = 0.0;
  uint64_t docs_indexed = 0;
  double indexing_rate = 0.0;  // docs per second
  uint64_t index_size_bytes = 0;
  double size_ratio = 0.0;  // index_size / data_size
  uint64_t avg_peak_memory_bytes = 0;
};

/// Computed from writer counters and on-disk segment sizes.
IndexStats snapshot_stats(const Index& index, std::string dataset_label);

/// dataset,data_size_gb,time_h,indexing_rate_doc_s,index_size_data_size,avg_peak_memory_gb
std::string stats_csv_header();
std::string stats_csv_row(const IndexStats& stats);
nlohmann::json stats_to_json(const IndexStats& stats);

struct LatencyBenchReport {
  struct Row {
    uint32_t length = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    std::vector<double> samples_ms;
    std::vector<std::string> phrases;  // the sampled queries, seed-deterministic
  };

  std::vector<uint32_t> lengths;
  uint32_t samples_per_length = 0;
  uint64_t seed = 0;
  std::vector<Row> rows;
  uint64_t self_hit_failures = 0;  // sampled queries that missed their source doc
};

/// 13 lengths spanning [1, 300].
std::vector<uint32_t> default_bench_lengths();

/// Samples seeded contiguous token segments from indexed documents, issues
/// them as slop-0 match-phrase queries (one discarded warm-up per length)
/// and reports per-length mean and standard deviation of wall latency.
/// Throws CorpusTooSmall when no sampled document can supply a segment of
/// the requested length.
LatencyBenchReport bench_query_latency(const Index& index,
                                       const std::vector<uint32_t>& lengths,
                                       uint32_t samples_per_length, uint64_t seed);

/// length,mean_ms,std_ms
std::string bench_csv(const LatencyBenchReport& report);
nlohmann::json bench_to_json(const LatencyBenchReport& report);

}  // namespace fts::metrics
