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

#include <zlib.h>

#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ftsearch/error.hpp"
#include "sources_internal.hpp"

namespace fts::bulk {

namespace {

/// Line-oriented reader over a plain or gzip-compressed file.
class LineReader {
 public:
  LineReader(const std::filesystem::path& path, bool gzipped) : gzipped_(gzipped) {
    file_ = std::fopen(path.c_str(), "rb");
    if (file_ == nullptr) {
      throw_error(ErrorCode::kInputUnreadable, "cannot open " + path.string());
    }
    if (gzipped_) {
      stream_.zalloc = Z_NULL;
      stream_.zfree = Z_NULL;
      stream_.opaque = Z_NULL;
      // 15+32: accept both gzip and zlib framing.
      if (inflateInit2(&stream_, 15 + 32) != Z_OK) {
        std::fclose(file_);
        throw_error(ErrorCode::kInputUnreadable, "inflateInit failed for " + path.string());
      }
      inflate_ready_ = true;
    }
  }

  ~LineReader() {
    if (inflate_ready_) inflateEnd(&stream_);
    if (file_ != nullptr) std::fclose(file_);
  }

  /// Next line without the trailing newline; false at end of file.
  bool next_line(std::string& line) {
    line.clear();
    while (true) {
      size_t newline = buffer_.find('\n', scan_from_);
      if (newline != std::string::npos) {
        line.assign(buffer_, 0, newline);
        buffer_.erase(0, newline + 1);
        scan_from_ = 0;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      scan_from_ = buffer_.size();
      if (!fill()) {
        if (buffer_.empty()) return false;
        line.swap(buffer_);
        buffer_.clear();
        scan_from_ = 0;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  bool fill() {
    if (eof_) return false;
    unsigned char raw[1 << 16];
    if (!gzipped_) {
      size_t n = std::fread(raw, 1, sizeof(raw), file_);
      if (n == 0) {
        eof_ = true;
        return false;
      }
      buffer_.append(reinterpret_cast<char*>(raw), n);
      return true;
    }
    // Inflate one compressed block's worth of output.
    unsigned char out[1 << 16];
    while (true) {
      if (stream_.avail_in == 0) {
        size_t n = std::fread(compressed_, 1, sizeof(compressed_), file_);
        if (n == 0) {
          eof_ = true;
          return false;
        }
        stream_.next_in = compressed_;
        stream_.avail_in = static_cast<uInt>(n);
      }
      stream_.next_out = out;
      stream_.avail_out = sizeof(out);
      int rc = inflate(&stream_, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END) {
        throw_error(ErrorCode::kInputUnreadable, "corrupt gzip stream");
      }
      size_t produced = sizeof(out) - stream_.avail_out;
      if (produced > 0) {
        buffer_.append(reinterpret_cast<char*>(out), produced);
        if (rc == Z_STREAM_END) eof_ = true;
        return true;
      }
      if (rc == Z_STREAM_END) {
        eof_ = true;
        return false;
      }
    }
  }

  std::FILE* file_ = nullptr;
  bool gzipped_ = false;
  bool inflate_ready_ = false;
  bool eof_ = false;
  z_stream stream_{};
  unsigned char compressed_[1 << 16]{};
  std::string buffer_;
  size_t scan_from_ = 0;
};

class JsonlSource : public DocumentSource {
 public:
  JsonlSource(const std::filesystem::path& path, bool gzipped)
      : reader_(path, gzipped), name_(path.string()) {}

  Status next(DocumentInput& doc, std::string& record_ref, std::string& error) override {
    std::string line;
    while (reader_.next_line(line)) {
      ++line_number_;
      if (line.find_first_not_of(" \t") == std::string::npos) continue;  // blank
      record_ref = name_ + ":" + std::to_string(line_number_);
      nlohmann::json value = nlohmann::json::parse(line, nullptr, false);
      if (value.is_discarded() || !value.is_object()) {
        error = "invalid JSON object";
        return Status::kBadRecord;
      }
      if (!value.contains("text") || !value["text"].is_string()) {
        error = "missing string field 'text'";
        return Status::kBadRecord;
      }
      doc = DocumentInput{};
      doc.text = value["text"].get<std::string>();
      auto opt_string = [&value](const char* key) {
        auto it = value.find(key);
        return it != value.end() && it->is_string() ? it->get<std::string>() : std::string();
      };
      doc.external_id = opt_string("id");
      doc.source = opt_string("source");
      doc.language = opt_string("language");
      doc.url = opt_string("url");
      if (!doc.external_id.empty()) record_ref = doc.external_id;
      return Status::kDoc;
    }
    return Status::kEnd;
  }

  std::string name() const override { return name_; }

 private:
  LineReader reader_;
  std::string name_;
  uint64_t line_number_ = 0;
};

}  // namespace

std::unique_ptr<DocumentSource> open_jsonl_source(const std::filesystem::path& path,
                                                  bool gzipped) {
  return std::make_unique<JsonlSource>(path, gzipped);
}

VectorSource::Status VectorSource::next(DocumentInput& doc, std::string& record_ref,
                                        std::string& error) {
  (void)error;
  if (at_ >= docs_.size()) return Status::kEnd;
  doc = std::move(docs_[at_]);
  record_ref = doc.external_id.empty() ? "<memory>:" + std::to_string(at_) : doc.external_id;
  ++at_;
  return Status::kDoc;
}

std::unique_ptr<DocumentSource> open_document_source(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw_error(ErrorCode::kInputUnreadable, "no such file: " + path.string());
  }
  std::string name = path.filename().string();
  auto ends_with = [&name](std::string_view suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".parquet")) return open_parquet_source(path);
  if (ends_with(".gz")) return open_jsonl_source(path, true);
  if (ends_with(".jsonl") || ends_with(".ndjson") || ends_with(".json")) {
    return open_jsonl_source(path, false);
  }
  throw_error(ErrorCode::kInputUnreadable,
              "unrecognized input format (expect .jsonl[.gz], .ndjson or .parquet): " +
                  path.string());
}

}  // namespace fts::bulk
