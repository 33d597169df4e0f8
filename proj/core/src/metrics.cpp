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

#include "ftsearch/metrics.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "ftsearch/error.hpp"
#include "ftsearch/query.hpp"

namespace fts::metrics {

IndexStats snapshot_stats(const Index& index, std::string dataset_label) {
  IndexCounters counters = index.counters();
  IndexStats stats;
  stats.dataset_label = std::move(dataset_label);
  stats.data_size_bytes = counters.raw_bytes;
  stats.wall_seconds = counters.ingest_wall_seconds;
  stats.docs_indexed = counters.docs_indexed;
  stats.indexing_rate = counters.ingest_wall_seconds > 0
                            ? static_cast<double>(counters.docs_indexed) /
                                  counters.ingest_wall_seconds
                            : 0.0;
  stats.index_size_bytes = counters.total_disk_bytes;
  stats.size_ratio = counters.raw_bytes > 0
                         ? static_cast<double>(counters.total_disk_bytes) /
                               static_cast<double>(counters.raw_bytes)
                         : 0.0;
  stats.avg_peak_memory_bytes = counters.avg_peak_memory_bytes;
  return stats;
}

std::string stats_csv_header() {
  return "dataset,data_size_gb,time_h,indexing_rate_doc_s,index_size_data_size,"
         "avg_peak_memory_gb";
}

std::string stats_csv_row(const IndexStats& stats) {
  std::ostringstream out;
  out << stats.dataset_label << ',' << stats.data_size_bytes / 1e9 << ','
      << stats.wall_seconds / 3600.0 << ',' << stats.indexing_rate << ','
      << stats.size_ratio << ',' << stats.avg_peak_memory_bytes / 1e9;
  return out.str();
}

nlohmann::json stats_to_json(const IndexStats& stats) {
  return {
      {"dataset_label", stats.dataset_label},
      {"data_size_bytes", stats.data_size_bytes},
      {"wall_seconds", stats.wall_seconds},
      {"docs_indexed", stats.docs_indexed},
      {"indexing_rate", stats.indexing_rate},
      {"index_size_bytes", stats.index_size_bytes},
      {"size_ratio", stats.size_ratio},
      {"avg_peak_memory_bytes", stats.avg_peak_memory_bytes},
  };
}

std::vector<uint32_t> default_bench_lengths() {
  return {1, 2, 5, 10, 20, 40, 60, 90, 120, 160, 200, 250, 300};
}

namespace {

struct SampledQuery {
  std::string phrase;
  uint64_t source_doc = 0;
};

/// Cuts a contiguous `length`-token segment from a random indexed document.
SampledQuery sample_segment(const Searcher& searcher, uint32_t length,
                            std::mt19937_64& rng) {
  constexpr int kMaxAttempts = 1000;
  std::uniform_int_distribution<uint64_t> pick_doc(0, searcher.doc_count() - 1);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    uint64_t doc_id = pick_doc(rng);
    StoredDocument doc = searcher.document(doc_id);
    std::vector<analysis::Token> tokens = analysis::analyze(doc.text, searcher.analyzer());
    if (tokens.size() < length) continue;
    std::uniform_int_distribution<size_t> pick_start(0, tokens.size() - length);
    size_t start = pick_start(rng);
    std::string phrase;
    for (size_t i = start; i < start + length; ++i) {
      if (i > start) phrase.push_back(' ');
      phrase += tokens[i].term;
    }
    return {std::move(phrase), doc_id};
  }
  throw_error(ErrorCode::kCorpusTooSmall,
              "no sampled document has " + std::to_string(length) + " tokens");
}

/// Independent check that the phrase matches its source document.
bool hits_source_doc(const Searcher& searcher, const SampledQuery& sample) {
  StoredDocument doc = searcher.document(sample.source_doc);
  std::vector<analysis::Token> doc_tokens = analysis::analyze(doc.text, searcher.analyzer());
  std::vector<analysis::Token> query_tokens =
      analysis::analyze(sample.phrase, searcher.analyzer());
  std::vector<std::vector<uint32_t>> lists(query_tokens.size());
  for (size_t i = 0; i < query_tokens.size(); ++i) {
    for (const auto& token : doc_tokens) {
      if (token.term == query_tokens[i].term) lists[i].push_back(token.position);
    }
  }
  return query::phrase_positions_match(lists, 0);
}

}  // namespace

LatencyBenchReport bench_query_latency(const Index& index,
                                       const std::vector<uint32_t>& lengths,
                                       uint32_t samples_per_length, uint64_t seed) {
  auto searcher = index.searcher();
  if (searcher->doc_count() == 0) {
    throw_error(ErrorCode::kCorpusTooSmall, "index is empty (or never refreshed)");
  }
  if (lengths.empty() || samples_per_length == 0) {
    throw_error(ErrorCode::kInvalidConfig, "lengths and samples_per_length must be non-empty");
  }

  LatencyBenchReport report;
  report.lengths = lengths;
  report.samples_per_length = samples_per_length;
  report.seed = seed;

  std::mt19937_64 rng(seed);
  for (uint32_t length : lengths) {
    std::vector<SampledQuery> samples;
    samples.reserve(samples_per_length);
    for (uint32_t s = 0; s < samples_per_length; ++s) {
      samples.push_back(sample_segment(*searcher, length, rng));
    }

    // Warm-up pass, discarded.
    {
      query::MatchPhrase warm{"text", samples.front().phrase, 0};
      query::search(*searcher, query::Ast{warm}, 10);
    }

    LatencyBenchReport::Row row;
    row.length = length;
    row.samples_ms.reserve(samples_per_length);
    for (const SampledQuery& sample : samples) row.phrases.push_back(sample.phrase);
    for (const SampledQuery& sample : samples) {
      query::MatchPhrase phrase{"text", sample.phrase, 0};
      auto t0 = std::chrono::steady_clock::now();
      query::SearchResult result = query::search(*searcher, query::Ast{phrase}, 10);
      auto t1 = std::chrono::steady_clock::now();
      row.samples_ms.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
      if (result.total_docs == 0 || !hits_source_doc(*searcher, sample)) {
        ++report.self_hit_failures;
      }
    }

    double sum = 0.0;
    for (double v : row.samples_ms) sum += v;
    row.mean_ms = sum / row.samples_ms.size();
    double var = 0.0;
    for (double v : row.samples_ms) var += (v - row.mean_ms) * (v - row.mean_ms);
    row.std_ms = std::sqrt(var / row.samples_ms.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string bench_csv(const LatencyBenchReport& report) {
  std::ostringstream out;
  out << "length,mean_ms,std_ms\n";
  for (const auto& row : report.rows) {
    out << row.length << ',' << row.mean_ms << ',' << row.std_ms << '\n';
  }
  return out.str();
}

nlohmann::json bench_to_json(const LatencyBenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"length", row.length},
                    {"mean_ms", row.mean_ms},
                    {"std_ms", row.std_ms},
                    {"samples_ms", row.samples_ms},
                    {"phrases", row.phrases}});
  }
  return {{"lengths", report.lengths},
          {"samples_per_length", report.samples_per_length},
          {"seed", report.seed},
          {"self_hit_failures", report.self_hit_failures},
          {"rows", std::move(rows)}};
}

}  // namespace fts::metrics
