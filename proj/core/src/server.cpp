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

#include "ftsearch/server.hpp"

#include <chrono>
#include <map>
#include <mutex>
#include <regex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ftsearch/audit.hpp"
#include "ftsearch/error.hpp"
#include "ftsearch/index.hpp"
#include "ftsearch/metrics.hpp"
#include "ftsearch/query.hpp"
#include "ftsearch/shard.hpp"

namespace fts::server {

namespace {

using nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadQuery:
    case ErrorCode::kEmptyQueryAfterAnalysis:
    case ErrorCode::kUnknownField:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidUtf8:
      return 400;
    case ErrorCode::kUnknownIndex:
      return 404;
    case ErrorCode::kAlreadyExists:
    case ErrorCode::kDestNotEmpty:
      return 409;
    case ErrorCode::kSourceUnreachable:
      return 502;
    default:
      return 500;
  }
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, json{{"error", message}});
}

bool valid_index_name(const std::string& name) {
  static const std::regex pattern("[a-z0-9_-]+");
  return std::regex_match(name, pattern);
}

bool query_flag(const httplib::Request& req, const char* name, bool fallback) {
  if (!req.has_param(name)) return fallback;
  std::string value = req.get_param_value(name);
  return value == "true" || value == "1" || value.empty();
}

}  // namespace

struct IndexService::Impl {
  explicit Impl(ServerConfig cfg) : config(std::move(cfg)) {
    std::filesystem::create_directories(config.data_dir);
    http.set_payload_max_length(config.max_body_bytes);
    register_routes();
  }

  struct Entry {
    std::shared_ptr<Index> index;
    std::mutex writer_mutex;  // bulk/reindex requests to one index queue here
  };

  ServerConfig config;
  httplib::Server http;
  std::mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Entry>> registry;
  std::thread serve_thread;
  int bound_port = 0;

  std::shared_ptr<Entry> find_index(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto it = registry.find(name);
    if (it != registry.end()) return it->second;
    std::filesystem::path dir = config.data_dir / name;
    if (!valid_index_name(name) || !Index::exists(dir)) {
      throw_error(ErrorCode::kUnknownIndex, name);
    }
    auto entry = std::make_shared<Entry>();
    entry->index = Index::open(dir);
    registry[name] = entry;
    return entry;
  }

  void handle_create(const httplib::Request& req, httplib::Response& res) {
    std::string name = req.matches[1];
    if (!valid_index_name(name)) {
      reply_error(res, 400, "index name must match [a-z0-9_-]+");
      return;
    }
    bool ok_if_exists = query_flag(req, "ok_if_exists", false);
    std::lock_guard<std::mutex> lock(registry_mutex);
    std::filesystem::path dir = config.data_dir / name;
    if (Index::exists(dir)) {
      if (ok_if_exists) {
        reply_json(res, 200, json{{"acknowledged", true}, {"existed", true}});
      } else {
        reply_error(res, 409, "index already exists: " + name);
      }
      return;
    }
    IndexOptions options;
    if (!req.body.empty()) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        reply_error(res, 400, "request body is not valid JSON");
        return;
      }
      if (body.contains("analyzer")) {
        options.analyzer = analysis::AnalyzerConfig::from_stage_names(
            body["analyzer"].get<std::vector<std::string>>());
      }
    }
    auto entry = std::make_shared<Entry>();
    entry->index = Index::create(dir, options);
    registry[name] = entry;
    reply_json(res, 200, json{{"acknowledged", true}});
  }

  void handle_bulk(const httplib::Request& req, httplib::Response& res) {
    auto started = std::chrono::steady_clock::now();
    auto entry = find_index(req.matches[1]);
    if (req.body.empty()) {
      reply_error(res, 400, "empty bulk body");
      return;
    }
    if (req.body.back() != '\n') {
      reply_error(res, 400, "bulk body must end with a newline");
      return;
    }
    bool do_refresh = query_flag(req, "refresh", true);
    bool dedup = query_flag(req, "dedup", false);

    std::vector<std::string_view> lines;
    {
      std::string_view body(req.body);
      size_t at = 0;
      while (at < body.size()) {
        size_t nl = body.find('\n', at);
        lines.push_back(body.substr(at, nl - at));
        at = nl + 1;
      }
    }
    if (lines.empty()) {
      reply_error(res, 400, "empty bulk body");
      return;
    }

    json items = json::array();
    bool any_error = false;
    std::lock_guard<std::mutex> writer(entry->writer_mutex);
    for (size_t at = 0; at < lines.size(); at += 2) {
      json action = json::parse(lines[at], nullptr, false);
      if (action.is_discarded() || !action.is_object() || !action.contains("index")) {
        reply_error(res, 400, "unparseable action line " + std::to_string(at + 1));
        return;
      }
      if (at + 1 >= lines.size()) {
        reply_error(res, 400, "action line without source line");
        return;
      }
      json source = json::parse(lines[at + 1], nullptr, false);
      auto fail_item = [&](const std::string& message) {
        items.push_back(json{{"index", {{"status", 400}, {"error", message}}}});
        any_error = true;
      };
      if (source.is_discarded() || !source.is_object()) {
        fail_item("invalid JSON source line");
        continue;
      }
      if (!source.contains("text") || !source["text"].is_string()) {
        fail_item("missing string field 'text'");
        continue;
      }
      DocumentInput doc;
      doc.text = source["text"].get<std::string>();
      auto opt = [&source](const char* key) {
        auto it = source.find(key);
        return it != source.end() && it->is_string() ? it->get<std::string>() : std::string();
      };
      doc.external_id = opt("id");
      doc.source = opt("source");
      doc.language = opt("language");
      doc.url = opt("url");
      if (action["index"].is_object() && action["index"].contains("_id")) {
        const auto& id = action["index"]["_id"];
        doc.external_id = id.is_string() ? id.get<std::string>() : id.dump();
      }
      try {
        AddOutcome outcome = entry->index->add_document(doc, dedup);
        if (outcome.indexed()) {
          items.push_back(json{{"index",
                                {{"status", 201},
                                 {"result", "created"},
                                 {"_id", doc.external_id},
                                 {"doc_id", outcome.doc_id}}}});
        } else {
          items.push_back(json{{"index",
                                {{"status", 200},
                                 {"result", "skipped_duplicate"},
                                 {"_id", doc.external_id},
                                 {"doc_id", outcome.doc_id}}}});
        }
      } catch (const Error& e) {
        fail_item(e.what());
      }
    }
    if (do_refresh) entry->index->refresh();
    double took = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    reply_json(res, 200, json{{"took_ms", took}, {"errors", any_error}, {"items", items}});
  }

  void handle_search(const httplib::Request& req, httplib::Response& res, bool count_only) {
    auto entry = find_index(req.matches[1]);
    auto searcher = entry->index->searcher();

    query::Ast ast{query::MatchAll{}};
    size_t from = 0;
    size_t size = 10;
    if (!req.body.empty()) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        reply_error(res, 400, "request body is not valid JSON");
        return;
      }
      from = body.value("from", 0u);
      size = body.value("size", 10u);
      if (body.contains("query")) {
        ast = query::from_json(body["query"]);
      } else if (!body.empty() && !(body.size() <= 2 && (body.contains("from") || body.contains("size")))) {
        ast = query::from_json(body);
      }
    }

    if (count_only) {
      reply_json(res, 200, json{{"count", query::count(*searcher, ast)}});
      return;
    }
    query::SearchResult result = query::search(*searcher, ast, size, from);
    json hits = json::array();
    for (const auto& hit : result.hits) {
      StoredDocument doc = searcher->document(hit.doc_id);
      hits.push_back(json{{"doc_id", hit.doc_id},
                          {"external_id", hit.external_id},
                          {"matched_field", hit.matched_field},
                          {"occurrence_count", hit.occurrence_count},
                          {"_source",
                           {{"id", doc.external_id},
                            {"text", doc.text},
                            {"source", doc.source},
                            {"language", doc.language},
                            {"url", doc.url}}}});
    }
    reply_json(res, 200,
               json{{"took_ms", result.took_ms},
                    {"total", result.total_docs},
                    {"hits", std::move(hits)}});
  }

  void handle_stats(const httplib::Request& req, httplib::Response& res) {
    std::string name = req.matches[1];
    auto entry = find_index(name);
    metrics::IndexStats stats = metrics::snapshot_stats(*entry->index, name);
    reply_json(res, 200, metrics::stats_to_json(stats));
  }

  void handle_reindex(const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("source") ||
        !body.contains("dest")) {
      reply_error(res, 400, "reindex body needs source and dest");
      return;
    }
    const json& dest_spec = body["dest"];
    if (!dest_spec.is_object() || !dest_spec.contains("index")) {
      reply_error(res, 400, "dest must be {\"index\": name}");
      return;
    }
    auto dest_entry = find_index(dest_spec["index"].get<std::string>());

    auto parse_source = [&](const json& spec) -> shard::MergeSource {
      if (!spec.is_object()) {
        throw_error(ErrorCode::kBadQuery, "source must be an object");
      }
      if (spec.contains("remote")) {
        return shard::MergeSource::remote(spec["remote"].get<std::string>(),
                                          spec.value("index", ""));
      }
      if (spec.contains("path")) {
        return shard::MergeSource::local(spec["path"].get<std::string>());
      }
      if (spec.contains("index")) {
        std::string source_name = spec["index"].get<std::string>();
        auto source_entry = find_index(source_name);  // 404 when missing
        return shard::MergeSource::local(source_entry->index->directory());
      }
      throw_error(ErrorCode::kBadQuery, "source needs index, path or remote");
    };

    std::vector<shard::MergeSource> sources;
    if (body["source"].is_array()) {
      for (const auto& spec : body["source"]) sources.push_back(parse_source(spec));
    } else {
      sources.push_back(parse_source(body["source"]));
    }

    shard::MergeOptions options;
    options.dedup = body.value("dedup", false);
    options.append = body.value("append", false);

    std::lock_guard<std::mutex> writer(dest_entry->writer_mutex);
    shard::MergeReport report = shard::merge_indices(sources, *dest_entry->index, options);
    reply_json(res, 200,
               json{{"sources", report.sources},
                    {"docs_copied", report.docs_copied},
                    {"docs_skipped_duplicate", report.docs_skipped_duplicate},
                    {"docs_failed", report.docs_failed},
                    {"wall_seconds", report.wall_seconds}});
  }

  void register_routes() {
    auto wrap = [](auto handler) {
      return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
          handler(req, res);
        } catch (const Error& e) {
          reply_error(res, status_for(e.code()), e.what());
        } catch (const std::exception& e) {
          reply_error(res, 500, e.what());
        }
      };
    };

    http.Get("/_health", wrap([](const httplib::Request&, httplib::Response& res) {
               reply_json(res, 200, json{{"status", "ok"}});
             }));
    http.Post("/_reindex", wrap([this](const httplib::Request& req, httplib::Response& res) {
                handle_reindex(req, res);
              }));
    http.Put("/([^/]+)", wrap([this](const httplib::Request& req, httplib::Response& res) {
               handle_create(req, res);
             }));
    http.Post("/([^/]+)/_bulk", wrap([this](const httplib::Request& req, httplib::Response& res) {
                handle_bulk(req, res);
              }));
    auto search = wrap([this](const httplib::Request& req, httplib::Response& res) {
      handle_search(req, res, false);
    });
    auto count = wrap([this](const httplib::Request& req, httplib::Response& res) {
      handle_search(req, res, true);
    });
    http.Get("/([^/]+)/_search", search);
    http.Post("/([^/]+)/_search", search);
    http.Get("/([^/]+)/_count", count);
    http.Post("/([^/]+)/_count", count);
    http.Get("/([^/]+)/_stats", wrap([this](const httplib::Request& req, httplib::Response& res) {
               handle_stats(req, res);
             }));
  }
};

IndexService::IndexService(ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

IndexService::~IndexService() { stop(); }

int IndexService::start() {
  const ServerConfig& cfg = impl_->config;
  int port = cfg.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(cfg.bind_address);
    if (port <= 0) throw_error(ErrorCode::kIoFailure, "cannot bind " + cfg.bind_address);
  } else {
    if (!impl_->http.bind_to_port(cfg.bind_address, port)) {
      throw_error(ErrorCode::kIoFailure,
                  "cannot bind " + cfg.bind_address + ":" + std::to_string(port));
    }
  }
  impl_->bound_port = port;
  impl_->serve_thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return port;
}

int IndexService::run() {
  start();
  impl_->serve_thread.join();
  return 0;
}

void IndexService::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
}

int IndexService::port() const { return impl_->bound_port; }

}  // namespace fts::server
