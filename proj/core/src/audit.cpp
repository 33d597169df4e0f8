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

#include "ftsearch/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ftsearch/error.hpp"

namespace fts::audit {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Analyzed-form key used for case-insensitive dedup.
std::string analyzed_key(const std::string& term, const analysis::AnalyzerConfig& analyzer,
                         size_t& word_count) {
  std::vector<analysis::Token> tokens = analysis::analyze(term, analyzer);
  word_count = tokens.size();
  std::string key;
  for (const auto& token : tokens) {
    if (!key.empty()) key.push_back(' ');
    key += token.term;
  }
  return key;
}

struct DictBuilder {
  TermDictionary dict;
  std::unordered_set<std::string> seen;

  void add(const std::string& raw, const analysis::AnalyzerConfig& analyzer,
           const std::string& where) {
    std::string term = trim(raw);
    if (term.empty()) return;
    size_t words = 0;
    std::string key = analyzed_key(term, analyzer, words);
    if (key.empty()) {
      std::fprintf(stderr, "warning: %s: term analyzes to nothing, dropped: %s\n",
                   where.c_str(), term.c_str());
      return;
    }
    if (words < TermDictionary::kMinWords || words > TermDictionary::kMaxWords) {
      std::fprintf(stderr, "warning: %s: term has %zu words (allowed 1-5), dropped: %s\n",
                   where.c_str(), words, term.c_str());
      return;
    }
    if (seen.insert(key).second) dict.terms.push_back(term);
  }
};

}  // namespace

std::vector<TermDictionary> load_dictionaries(const std::filesystem::path& path,
                                              DictionaryFormat format,
                                              const std::string& fallback_language,
                                              const analysis::AnalyzerConfig& analyzer) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::kInputUnreadable, "cannot open " + path.string());
  std::string file_name = path.filename().string();

  std::map<std::string, DictBuilder> builders;
  std::string line;
  uint64_t line_number = 0;

  while (std::getline(in, line)) {
    ++line_number;
    std::string where = file_name + ":" + std::to_string(line_number);
    if (format == DictionaryFormat::kLines) {
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      if (trim(line).empty()) continue;
      std::string lang = fallback_language.empty() ? "und" : fallback_language;
      auto& builder = builders[lang];
      builder.dict.language = lang;
      builder.add(line, analyzer, where);
    } else {
      if (trim(line).empty()) continue;
      if (line_number == 1 && trim(line) == "language,term") continue;  // header
      size_t comma = line.find(',');
      if (comma == std::string::npos) {
        throw_error(ErrorCode::kMalformedCsv,
                    where + ": expected 'language,term' columns");
      }
      std::string lang = trim(line.substr(0, comma));
      std::string term = line.substr(comma + 1);
      if (lang.empty()) {
        throw_error(ErrorCode::kMalformedCsv, where + ": empty language column");
      }
      auto& builder = builders[lang];
      builder.dict.language = lang;
      builder.add(term, analyzer, where);
    }
  }

  std::vector<TermDictionary> dicts;
  for (auto& [lang, builder] : builders) {
    if (builder.dict.terms.empty()) continue;
    builder.dict.name = file_name;
    builder.dict.provenance = "loaded from " + path.string();
    dicts.push_back(std::move(builder.dict));
  }
  if (dicts.empty()) {
    throw_error(ErrorCode::kEmptyDictionary, path.string() + " contains no usable terms");
  }
  return dicts;
}

TermDictionary load_dictionary(const std::filesystem::path& path, DictionaryFormat format,
                               const std::string& language,
                               const analysis::AnalyzerConfig& analyzer) {
  std::vector<TermDictionary> dicts = load_dictionaries(path, format, language, analyzer);
  if (dicts.size() != 1) {
    throw_error(ErrorCode::kMalformedCsv,
                path.string() + " holds several languages; use load_dictionaries");
  }
  return std::move(dicts.front());
}

CountBackend CountBackend::over(std::shared_ptr<const Searcher> searcher, std::string id) {
  CountBackend backend;
  backend.id = std::move(id);
  backend.count = [searcher](const query::Ast& ast, const query::DocFilter& filter) {
    return query::count(*searcher, ast, filter);
  };
  backend.occurrences = [searcher](const query::MatchPhrase& phrase,
                                   const query::DocFilter& filter) {
    return query::occurrence_count(*searcher, phrase, filter);
  };
  return backend;
}

CountBackend CountBackend::over(const shard::ShardSet& shards, std::string id) {
  CountBackend backend;
  backend.id = std::move(id);
  backend.count = [&shards](const query::Ast& ast, const query::DocFilter& filter) {
    return shards.scatter_gather_count(ast, filter);
  };
  backend.occurrences = [&shards](const query::MatchPhrase& phrase,
                                  const query::DocFilter& filter) {
    return shards.scatter_gather_occurrences(phrase, filter);
  };
  return backend;
}

AuditReport run_audit(const CountBackend& backend,
                      std::span<const TermDictionary> dictionaries, uint32_t slop) {
  AuditReport report;
  report.index_id = backend.id;
  report.slop = slop;
  report.timestamp = iso_timestamp();

  for (const TermDictionary& dict : dictionaries) {
    query::DocFilter filter;
    filter.language = dict.language;

    std::vector<query::Ast> any_term;
    for (const std::string& term : dict.terms) {
      AuditRow row;
      row.language = dict.language;
      row.term = term;
      query::MatchPhrase phrase{"text", term, slop};
      try {
        row.doc_count = backend.count(query::Ast{phrase}, filter);
        row.occurrence_count = backend.occurrences(phrase, filter);
        any_term.push_back(query::Ast{phrase});
      } catch (const Error& e) {
        report.term_errors.emplace_back(term, e.what());
      }
      report.rows.push_back(std::move(row));
    }

    uint64_t total = 0;
    if (!any_term.empty()) {
      query::Bool language_query;
      language_query.should = std::move(any_term);
      language_query.minimum_should_match = 1;
      try {
        total = backend.count(query::Ast{std::move(language_query)}, filter);
      } catch (const Error& e) {
        report.term_errors.emplace_back("<language total " + dict.language + ">", e.what());
      }
    }
    report.language_totals[dict.language] = total;
  }

  std::sort(report.rows.begin(), report.rows.end(), [](const AuditRow& a, const AuditRow& b) {
    return std::tie(a.language, a.term) < std::tie(b.language, b.term);
  });
  return report;
}

AuditReport run_audit(const Index& index, std::span<const TermDictionary> dictionaries,
                      uint32_t slop) {
  return run_audit(CountBackend::over(index.searcher(), index.directory().string()),
                   dictionaries, slop);
}

AuditReport run_audit(const shard::ShardSet& shards,
                      std::span<const TermDictionary> dictionaries, uint32_t slop) {
  return run_audit(CountBackend::over(shards, "<shard set>"), dictionaries, slop);
}

std::vector<RankedTerm> top_k(const AuditReport& report, const std::string& language,
                              size_t k, RankBy by) {
  std::vector<RankedTerm> ranked;
  for (const AuditRow& row : report.rows) {
    if (row.language != language) continue;
    ranked.push_back(
        {row.term, by == RankBy::kDocCount ? row.doc_count : row.occurrence_count});
  }
  if (ranked.empty()) {
    throw_error(ErrorCode::kUnknownLanguage, language + " not present in report");
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedTerm& a, const RankedTerm& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.term < b.term;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::string report_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "language,term,doc_count,occurrence_count\n";
  for (const AuditRow& row : report.rows) {
    out << csv_escape(row.language) << ',' << csv_escape(row.term) << ',' << row.doc_count
        << ',' << row.occurrence_count << '\n';
  }
  return out.str();
}

std::string heatmap_csv(const AuditReport& report, RankBy by) {
  std::set<std::string> languages;
  std::set<std::string> terms;
  std::map<std::pair<std::string, std::string>, uint64_t> cells;
  for (const AuditRow& row : report.rows) {
    languages.insert(row.language);
    terms.insert(row.term);
    cells[{row.language, row.term}] =
        by == RankBy::kDocCount ? row.doc_count : row.occurrence_count;
  }

  std::ostringstream out;
  out << "language";
  for (const std::string& term : terms) out << ',' << csv_escape(term);
  out << '\n';
  for (const std::string& language : languages) {
    out << csv_escape(language);
    for (const std::string& term : terms) {
      auto it = cells.find({language, term});
      out << ',' << (it != cells.end() ? it->second : 0);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json report_to_json(const AuditReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AuditRow& row : report.rows) {
    rows.push_back({{"language", row.language},
                    {"term", row.term},
                    {"doc_count", row.doc_count},
                    {"occurrence_count", row.occurrence_count}});
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& [term, message] : report.term_errors) {
    errors.push_back({{"term", term}, {"error", message}});
  }
  return {{"metadata",
           {{"index_id", report.index_id}, {"slop", report.slop},
            {"timestamp", report.timestamp}}},
          {"rows", std::move(rows)},
          {"language_totals", report.language_totals},
          {"term_errors", std::move(errors)}};
}

AuditReport report_from_json(const nlohmann::json& value) {
  AuditReport report;
  const auto& meta = value.at("metadata");
  report.index_id = meta.at("index_id").get<std::string>();
  report.slop = meta.at("slop").get<uint32_t>();
  report.timestamp = meta.at("timestamp").get<std::string>();
  for (const auto& row : value.at("rows")) {
    report.rows.push_back({row.at("language").get<std::string>(),
                           row.at("term").get<std::string>(),
                           row.at("doc_count").get<uint64_t>(),
                           row.at("occurrence_count").get<uint64_t>()});
  }
  for (const auto& [lang, total] : value.at("language_totals").items()) {
    report.language_totals[lang] = total.get<uint64_t>();
  }
  if (value.contains("term_errors")) {
    for (const auto& item : value["term_errors"]) {
      report.term_errors.emplace_back(item.at("term").get<std::string>(),
                                      item.at("error").get<std::string>());
    }
  }
  return report;
}

}  // namespace fts::audit
