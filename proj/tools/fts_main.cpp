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

// fts: index a corpus, search it, benchmark it, audit it, merge indices,
// serve it over HTTP, or generate synthetic corpora.
//
// Exit codes: 0 success, 1 operational failure, 2 usage error.
// Machine-readable output goes to stdout, human logs to stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ftsearch/audit.hpp"
#include "ftsearch/bulk.hpp"
#include "ftsearch/error.hpp"
#include "ftsearch/index.hpp"
#include "ftsearch/metrics.hpp"
#include "ftsearch/query.hpp"
#include "ftsearch/server.hpp"
#include "ftsearch/shard.hpp"
#include "ftsearch/synth.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::shared_ptr<fts::Index> open_or_create(const std::filesystem::path& dir) {
  if (fts::Index::exists(dir)) return fts::Index::open(dir);
  return fts::Index::create(dir);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fts::throw_error(fts::ErrorCode::kIoFailure, "cannot create " + path.string());
  out << content;
}

json bulk_report_json(const fts::bulk::BulkReport& report, const fts::bulk::BulkParams& params,
                      bool dedup) {
  json failures = json::array();
  for (const auto& failure : report.failures) {
    failures.push_back({{"record", failure.record_ref}, {"error", failure.error}});
  }
  return {
      {"docs_read", report.docs_read},
      {"docs_indexed", report.docs_indexed},
      {"docs_skipped_duplicate", report.docs_skipped_duplicate},
      {"docs_failed", report.docs_failed},
      {"oversized_docs", report.oversized_docs},
      {"wall_seconds", report.wall_seconds},
      {"indexing_rate", report.indexing_rate},
      {"peak_inflight_bytes", report.peak_inflight_bytes},
      {"peak_rss_estimate_bytes", report.peak_rss_estimate_bytes},
      {"failures", std::move(failures)},
      {"failures_truncated", report.failures_truncated},
      {"params",
       {{"worker_count", params.worker_count},
        {"chunk_size", params.chunk_size},
        {"max_chunk_bytes", params.max_chunk_bytes},
        {"queue_size", params.queue_size},
        {"dedup", dedup}}},
  };
}

// ---------------------------------------------------------------------------
// index
// ---------------------------------------------------------------------------

struct IndexArgs {
  std::vector<std::string> inputs;
  std::string index_dir;
  uint32_t workers = 0;  // 0 = planner
  uint32_t chunk_size = 0;
  uint64_t max_chunk_bytes = 100ull << 20;
  uint32_t queue_size = 4;
  uint64_t ram_budget = 1ull << 30;
  double refresh_every = 0.0;
  bool dedup = false;
  std::string stats_out;
  std::string label;
};

uint64_t sample_avg_doc_size(const std::vector<std::string>& inputs) {
  constexpr int kProbeDocs = 1000;
  auto source = fts::bulk::open_document_source(inputs.front());
  fts::DocumentInput doc;
  std::string ref;
  std::string error;
  uint64_t total = 0;
  int sampled = 0;
  while (sampled < kProbeDocs) {
    auto status = source->next(doc, ref, error);
    if (status == fts::bulk::DocumentSource::Status::kEnd) break;
    if (status != fts::bulk::DocumentSource::Status::kDoc) continue;
    total += doc.byte_size();
    ++sampled;
  }
  return sampled > 0 ? std::max<uint64_t>(1, total / sampled) : 1024;
}

int run_index(const IndexArgs& args) {
  uint32_t cores = std::max(1u, std::thread::hardware_concurrency());
  uint64_t avg_doc = sample_avg_doc_size(args.inputs);
  fts::bulk::BulkParams params =
      fts::bulk::plan_bulk_params(avg_doc, args.max_chunk_bytes, cores, args.ram_budget);
  if (args.workers != 0) params.worker_count = args.workers;
  if (args.chunk_size != 0) params.chunk_size = args.chunk_size;
  params.max_chunk_bytes = args.max_chunk_bytes;
  params.queue_size = args.queue_size;
  if (args.refresh_every > 0) {
    params.refresh_policy = fts::bulk::RefreshPolicy::every_seconds(args.refresh_every);
  }
  std::fprintf(stderr,
               "indexing with workers=%u chunk_size=%u max_chunk_bytes=%llu queue_size=%u "
               "(avg_doc_size sample: %llu B)\n",
               params.worker_count, params.chunk_size,
               static_cast<unsigned long long>(params.max_chunk_bytes), params.queue_size,
               static_cast<unsigned long long>(avg_doc));

  auto index = open_or_create(args.index_dir);
  std::vector<std::filesystem::path> inputs(args.inputs.begin(), args.inputs.end());
  fts::bulk::BulkReport report = fts::bulk::bulk_index_files(*index, inputs, params, args.dedup);

  std::cout << bulk_report_json(report, params, args.dedup).dump() << std::endl;

  if (!args.stats_out.empty()) {
    std::string label = args.label.empty()
                            ? std::filesystem::path(args.index_dir).filename().string()
                            : args.label;
    fts::metrics::IndexStats stats = fts::metrics::snapshot_stats(*index, label);
    bool fresh = !std::filesystem::exists(args.stats_out);
    std::ofstream out(args.stats_out, std::ios::app);
    if (!out) fts::throw_error(fts::ErrorCode::kIoFailure, "cannot open " + args.stats_out);
    if (fresh) out << fts::metrics::stats_csv_header() << '\n';
    out << fts::metrics::stats_csv_row(stats) << '\n';
    std::fprintf(stderr, "stats row appended to %s\n", args.stats_out.c_str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// search / count
// ---------------------------------------------------------------------------

struct QueryArgs {
  std::string index_dir;
  std::string phrase;
  std::string match;
  std::string query_json;
  uint32_t slop = 0;
  size_t limit = 10;
  size_t offset = 0;
};

fts::query::Ast build_query(const QueryArgs& args) {
  if (!args.query_json.empty()) return fts::query::parse_query(args.query_json);
  if (!args.match.empty()) return fts::query::Ast{fts::query::Match{"text", args.match}};
  return fts::query::Ast{fts::query::MatchPhrase{"text", args.phrase, args.slop}};
}

int run_search(const QueryArgs& args) {
  auto index = fts::Index::open(args.index_dir);
  auto searcher = index->searcher();
  fts::query::SearchResult result =
      fts::query::search(*searcher, build_query(args), args.limit, args.offset);
  for (const auto& hit : result.hits) {
    json line = {{"doc_id", hit.doc_id},
                 {"external_id", hit.external_id},
                 {"matched_field", hit.matched_field},
                 {"occurrence_count", hit.occurrence_count}};
    std::cout << line.dump() << '\n';
  }
  json summary = {{"total_docs", result.total_docs}, {"took_ms", result.took_ms}};
  std::cout << summary.dump() << std::endl;
  return kExitOk;
}

int run_count(const QueryArgs& args) {
  auto index = fts::Index::open(args.index_dir);
  auto searcher = index->searcher();
  uint64_t n = fts::query::count(*searcher, build_query(args));
  std::cout << json{{"count", n}}.dump() << std::endl;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

struct AuditArgs {
  std::string index_dir;
  std::string dict_path;
  std::string format = "lines";
  std::string language = "und";
  uint32_t slop = 0;
  std::string out;
  std::string out_format = "csv";
  std::string heatmap;
  std::string heatmap_by = "doc_count";
  size_t top_k = 0;
  std::string top_k_by = "occurrence_count";
};

int run_audit_cmd(const AuditArgs& args) {
  auto index = fts::Index::open(args.index_dir);
  auto format = args.format == "csv" ? fts::audit::DictionaryFormat::kCsv
                                     : fts::audit::DictionaryFormat::kLines;
  std::vector<fts::audit::TermDictionary> dicts = fts::audit::load_dictionaries(
      args.dict_path, format, args.language, index->analyzer());
  std::fprintf(stderr, "loaded %zu dictionaries from %s\n", dicts.size(),
               args.dict_path.c_str());

  fts::audit::AuditReport report = fts::audit::run_audit(*index, dicts, args.slop);

  auto by_of = [](const std::string& name) {
    return name == "doc_count" ? fts::audit::RankBy::kDocCount
                               : fts::audit::RankBy::kOccurrenceCount;
  };

  if (!args.out.empty()) {
    if (args.out_format == "json") {
      write_text_file(args.out, fts::audit::report_to_json(report).dump(2));
    } else {
      write_text_file(args.out, fts::audit::report_csv(report));
    }
    std::fprintf(stderr, "report written to %s\n", args.out.c_str());
  } else {
    std::cout << fts::audit::report_csv(report);
  }

  if (!args.heatmap.empty()) {
    write_text_file(args.heatmap, fts::audit::heatmap_csv(report, by_of(args.heatmap_by)));
    std::fprintf(stderr, "heatmap written to %s\n", args.heatmap.c_str());
  }

  if (args.top_k > 0) {
    json ranking = json::object();
    for (const auto& [language, total] : report.language_totals) {
      json entries = json::array();
      for (const auto& ranked :
           fts::audit::top_k(report, language, args.top_k, by_of(args.top_k_by))) {
        entries.push_back({{"term", ranked.term}, {"value", ranked.value}});
      }
      ranking[language] = std::move(entries);
      (void)total;
    }
    std::cout << json{{"top_k", std::move(ranking)}, {"by", args.top_k_by}}.dump()
              << std::endl;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string index_dir;
  std::vector<uint32_t> lengths;
  uint32_t samples = 25;
  uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
};

int run_bench(const BenchArgs& args) {
  auto index = fts::Index::open(args.index_dir);
  std::vector<uint32_t> lengths =
      args.lengths.empty() ? fts::metrics::default_bench_lengths() : args.lengths;
  fts::metrics::LatencyBenchReport report =
      fts::metrics::bench_query_latency(*index, lengths, args.samples, args.seed);
  std::string rendered = args.format == "json" ? fts::metrics::bench_to_json(report).dump(2)
                                               : fts::metrics::bench_csv(report);
  if (!args.out.empty()) {
    write_text_file(args.out, rendered);
    std::fprintf(stderr, "benchmark written to %s\n", args.out.c_str());
  } else {
    std::cout << rendered;
  }
  if (report.self_hit_failures > 0) {
    std::fprintf(stderr, "warning: %llu sampled queries missed their source document\n",
                 static_cast<unsigned long long>(report.self_hit_failures));
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// merge
// ---------------------------------------------------------------------------

struct MergeArgs {
  std::vector<std::string> sources;
  std::string dest;
  bool dedup = false;
  bool append = false;
  uint64_t page_size = 1000;
};

int run_merge(const MergeArgs& args) {
  std::vector<fts::shard::MergeSource> sources;
  sources.reserve(args.sources.size());
  for (const std::string& spec : args.sources) {
    sources.push_back(fts::shard::MergeSource::parse(spec));
  }
  auto dest = open_or_create(args.dest);
  fts::shard::MergeOptions options;
  options.dedup = args.dedup;
  options.append = args.append;
  options.page_size = args.page_size;
  fts::shard::MergeReport report = fts::shard::merge_indices(sources, *dest, options);
  std::cout << json{{"sources", report.sources},
                    {"docs_copied", report.docs_copied},
                    {"docs_skipped_duplicate", report.docs_skipped_duplicate},
                    {"docs_failed", report.docs_failed},
                    {"wall_seconds", report.wall_seconds}}
                   .dump()
            << std::endl;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve / gen
// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string bind = "127.0.0.1";
  int port = 9200;
  std::string data_dir = "data";
  uint64_t max_body_bytes = 256ull << 20;
};

int run_serve(const ServeArgs& args) {
  fts::server::ServerConfig config;
  config.bind_address = args.bind;
  config.port = args.port;
  config.data_dir = args.data_dir;
  config.max_body_bytes = args.max_body_bytes;
  fts::server::IndexService service(std::move(config));
  int port = service.start();
  std::cout << json{{"bind", args.bind}, {"port", port}, {"data_dir", args.data_dir}}.dump()
            << std::endl;
  std::fprintf(stderr, "serving on %s:%d, Ctrl-C to stop\n", args.bind.c_str(), port);
  service.run();
  return kExitOk;
}

struct GenArgs {
  std::string out;
  uint64_t docs = 1000;
  uint32_t vocab = 1000;
  uint32_t words_min = 50;
  uint32_t words_max = 150;
  uint64_t seed = 42;
  std::vector<std::string> languages = {"eng"};
  uint32_t replicate = 1;
  std::string id_prefix = "doc";
};

int run_gen(const GenArgs& args) {
  fts::synth::CorpusSpec spec;
  spec.docs = args.docs;
  spec.vocabulary = args.vocab;
  spec.words_min = args.words_min;
  spec.words_max = args.words_max;
  spec.seed = args.seed;
  spec.languages = args.languages;
  spec.replicate = args.replicate;
  spec.id_prefix = args.id_prefix;
  uint64_t written = fts::synth::write_corpus_jsonl(spec, args.out);
  std::cout << json{{"docs_written", written}, {"path", args.out}}.dump() << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ftsearch: full-text indexing, search and audit toolkit"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* cmd_index = app.add_subcommand("index", "Bulk-index JSONL/Parquet inputs");
  cmd_index->add_option("--input", index_args.inputs, "Input files (.jsonl[.gz], .parquet)")
      ->required()
      ->expected(-1);
  cmd_index->add_option("--index", index_args.index_dir, "Index directory")->required();
  cmd_index->add_option("--workers", index_args.workers, "Worker threads (default: planned)");
  cmd_index->add_option("--chunk-size", index_args.chunk_size,
                        "Documents per chunk (default: planned)");
  cmd_index->add_option("--max-chunk-bytes", index_args.max_chunk_bytes,
                        "Payload cap per chunk")
      ->capture_default_str();
  cmd_index->add_option("--queue-size", index_args.queue_size, "Bounded queue length")
      ->capture_default_str();
  cmd_index->add_option("--ram-budget", index_args.ram_budget, "Planner RAM budget in bytes")
      ->capture_default_str();
  cmd_index->add_option("--refresh-every", index_args.refresh_every,
                        "Refresh interval in seconds (0 = only at end)")
      ->capture_default_str();
  cmd_index->add_flag("--dedup", index_args.dedup, "Skip SHA-256 content duplicates");
  cmd_index->add_option("--stats-out", index_args.stats_out, "Append a stats CSV row here");
  cmd_index->add_option("--label", index_args.label, "Dataset label for the stats row");

  QueryArgs search_args;
  auto* cmd_search = app.add_subcommand("search", "Run a query and print hits as JSON lines");
  cmd_search->add_option("--index", search_args.index_dir, "Index directory")->required();
  auto* opt_phrase = cmd_search->add_option("--phrase", search_args.phrase, "Match-phrase text");
  auto* opt_match = cmd_search->add_option("--match", search_args.match, "Match text");
  auto* opt_query = cmd_search->add_option("--query", search_args.query_json, "Raw query JSON");
  opt_phrase->excludes(opt_match)->excludes(opt_query);
  opt_match->excludes(opt_query);
  cmd_search->add_option("--slop", search_args.slop, "Phrase slop")->capture_default_str();
  cmd_search->add_option("--limit", search_args.limit, "Hits to print (0 = count only)")
      ->capture_default_str();
  cmd_search->add_option("--offset", search_args.offset, "Hits to skip")->capture_default_str();

  QueryArgs count_args;
  auto* cmd_count = app.add_subcommand("count", "Count matching documents");
  cmd_count->add_option("--index", count_args.index_dir, "Index directory")->required();
  auto* copt_phrase = cmd_count->add_option("--phrase", count_args.phrase, "Match-phrase text");
  auto* copt_match = cmd_count->add_option("--match", count_args.match, "Match text");
  auto* copt_query = cmd_count->add_option("--query", count_args.query_json, "Raw query JSON");
  copt_phrase->excludes(copt_match)->excludes(copt_query);
  copt_match->excludes(copt_query);
  cmd_count->add_option("--slop", count_args.slop, "Phrase slop")->capture_default_str();

  AuditArgs audit_args;
  auto* cmd_audit = app.add_subcommand("audit", "Count dictionary terms per language");
  cmd_audit->add_option("--index", audit_args.index_dir, "Index directory")->required();
  cmd_audit->add_option("--dict", audit_args.dict_path, "Dictionary file")->required();
  cmd_audit->add_option("--format", audit_args.format, "Dictionary format: lines|csv")
      ->check(CLI::IsMember({"lines", "csv"}))
      ->capture_default_str();
  cmd_audit->add_option("--lang", audit_args.language,
                        "Language for lines dictionaries (ISO 639-3)")
      ->capture_default_str();
  cmd_audit->add_option("--slop", audit_args.slop, "Phrase slop for multi-word terms")
      ->capture_default_str();
  cmd_audit->add_option("--out", audit_args.out, "Write the report here");
  cmd_audit->add_option("--out-format", audit_args.out_format, "Report format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd_audit->add_option("--heatmap", audit_args.heatmap, "Write language x term matrix CSV");
  cmd_audit->add_option("--heatmap-by", audit_args.heatmap_by, "Heatmap measure")
      ->check(CLI::IsMember({"doc_count", "occurrence_count"}))
      ->capture_default_str();
  cmd_audit->add_option("--top-k", audit_args.top_k, "Print top-k ranked terms per language");
  cmd_audit->add_option("--top-k-by", audit_args.top_k_by, "Ranking measure")
      ->check(CLI::IsMember({"doc_count", "occurrence_count"}))
      ->capture_default_str();

  BenchArgs bench_args;
  auto* cmd_bench = app.add_subcommand("bench", "Query-latency-vs-length benchmark");
  cmd_bench->add_option("--index", bench_args.index_dir, "Index directory")->required();
  cmd_bench->add_option("--lengths", bench_args.lengths,
                        "Query lengths in words (default: 13 lengths in [1,300])")
      ->delimiter(',');
  cmd_bench->add_option("--samples", bench_args.samples, "Samples per length")
      ->capture_default_str();
  cmd_bench->add_option("--seed", bench_args.seed, "Sampling seed")->capture_default_str();
  cmd_bench->add_option("--out", bench_args.out, "Write the report here");
  cmd_bench->add_option("--format", bench_args.format, "Report format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  MergeArgs merge_args;
  auto* cmd_merge = app.add_subcommand("merge", "Merge indices into one search space");
  cmd_merge->add_option("--sources", merge_args.sources,
                        "Source index dirs or http://host:port/{index}")
      ->required()
      ->expected(-1);
  cmd_merge->add_option("--dest", merge_args.dest, "Destination index directory")->required();
  cmd_merge->add_flag("--dedup", merge_args.dedup, "Skip SHA-256 duplicates across sources");
  cmd_merge->add_flag("--append", merge_args.append, "Allow a non-empty destination");
  cmd_merge->add_option("--page-size", merge_args.page_size, "Remote drain page size")
      ->capture_default_str();

  ServeArgs serve_args;
  auto* cmd_serve = app.add_subcommand("serve", "Run the HTTP service");
  cmd_serve->add_option("--bind", serve_args.bind, "Bind address (loopback by default)")
      ->capture_default_str();
  cmd_serve->add_option("--port", serve_args.port, "Port (0 picks a free one)")
      ->capture_default_str();
  cmd_serve->add_option("--data-dir", serve_args.data_dir, "Directory holding the indices")
      ->capture_default_str();
  cmd_serve->add_option("--max-body-bytes", serve_args.max_body_bytes,
                        "Reject request bodies larger than this")
      ->capture_default_str();

  GenArgs gen_args;
  auto* cmd_gen = app.add_subcommand("gen", "Generate a seeded synthetic JSONL corpus");
  cmd_gen->add_option("--out", gen_args.out, "Output JSONL path")->required();
  cmd_gen->add_option("--docs", gen_args.docs, "Unique documents")->capture_default_str();
  cmd_gen->add_option("--vocab", gen_args.vocab, "Vocabulary size")->capture_default_str();
  cmd_gen->add_option("--words-min", gen_args.words_min, "Minimum words per doc")
      ->capture_default_str();
  cmd_gen->add_option("--words-max", gen_args.words_max, "Maximum words per doc")
      ->capture_default_str();
  cmd_gen->add_option("--seed", gen_args.seed, "Generator seed")->capture_default_str();
  cmd_gen->add_option("--languages", gen_args.languages, "Language codes, round-robin")
      ->delimiter(',');
  cmd_gen->add_option("--replicate", gen_args.replicate, "Copies of each unique doc")
      ->capture_default_str();
  cmd_gen->add_option("--id-prefix", gen_args.id_prefix, "External id prefix")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_index->parsed()) return run_index(index_args);
    if (cmd_search->parsed()) {
      if (search_args.phrase.empty() && search_args.match.empty() &&
          search_args.query_json.empty()) {
        std::fprintf(stderr, "search requires one of --phrase, --match, --query\n");
        return kExitUsage;
      }
      return run_search(search_args);
    }
    if (cmd_count->parsed()) {
      if (count_args.phrase.empty() && count_args.match.empty() &&
          count_args.query_json.empty()) {
        std::fprintf(stderr, "count requires one of --phrase, --match, --query\n");
        return kExitUsage;
      }
      return run_count(count_args);
    }
    if (cmd_audit->parsed()) return run_audit_cmd(audit_args);
    if (cmd_bench->parsed()) return run_bench(bench_args);
    if (cmd_merge->parsed()) return run_merge(merge_args);
    if (cmd_serve->parsed()) return run_serve(serve_args);
    if (cmd_gen->parsed()) return run_gen(gen_args);
  } catch (const fts::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
