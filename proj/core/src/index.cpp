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

#include "ftsearch/index.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>

#include "byteio.hpp"
#include "ftsearch/error.hpp"

namespace fts {

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kDocsFile = "docs.bin";
constexpr const char* kOffsetsFile = "docs.idx";
constexpr const char* kLanguagesFile = "docs.lang";
constexpr uint32_t kManifestVersion = 1;

std::string segment_file_name(uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seg_%06llu.fts", static_cast<unsigned long long>(id));
  return buf;
}

std::string encode_record(uint64_t doc_id, const DocumentInput& input,
                          const Sha256Digest& digest) {
  std::string rec;
  rec.reserve(68 + input.text.size() + input.external_id.size() + input.source.size() +
              input.language.size() + input.url.size());
  detail::put_u64(rec, doc_id);
  rec.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  auto put_field = [&rec](const std::string& s) {
    detail::put_u32(rec, static_cast<uint32_t>(s.size()));
    rec.append(s);
  };
  put_field(input.text);
  put_field(input.external_id);
  put_field(input.source);
  put_field(input.language);
  put_field(input.url);

  std::string framed;
  framed.reserve(8 + rec.size());
  detail::put_u64(framed, rec.size());
  framed.append(rec);
  return framed;
}

StoredDocument decode_record(std::string_view framed) {
  detail::ByteReader reader(framed);
  uint64_t len = reader.get_u64();
  if (len != framed.size() - 8) throw_error(ErrorCode::kCorrupt, "document record length");
  StoredDocument doc;
  doc.doc_id = reader.get_u64();
  std::string_view digest = reader.get_bytes(doc.content_hash.size());
  std::memcpy(doc.content_hash.data(), digest.data(), doc.content_hash.size());
  auto get_field = [&reader]() {
    uint32_t n = reader.get_u32();
    return std::string(reader.get_bytes(n));
  };
  doc.text = get_field();
  doc.external_id = get_field();
  doc.source = get_field();
  doc.language = get_field();
  doc.url = get_field();
  return doc;
}

std::vector<uint64_t> load_u64_file(const std::filesystem::path& path) {
  std::string data = detail::read_file(path);
  if (data.size() % 8 != 0) throw_error(ErrorCode::kCorrupt, path.string());
  std::vector<uint64_t> out(data.size() / 8);
  detail::ByteReader reader(data);
  for (auto& v : out) v = reader.get_u64();
  return out;
}

std::vector<uint32_t> load_u32_file(const std::filesystem::path& path) {
  std::string data = detail::read_file(path);
  if (data.size() % 4 != 0) throw_error(ErrorCode::kCorrupt, path.string());
  std::vector<uint32_t> out(data.size() / 4);
  detail::ByteReader reader(data);
  for (auto& v : out) v = reader.get_u32();
  return out;
}

}  // namespace

/// Append-only record file with positioned reads, shared by the writer and
/// any number of snapshot readers.
class DocStoreFile {
 public:
  static std::shared_ptr<DocStoreFile> open(const std::filesystem::path& path, bool writable) {
    auto file = std::make_shared<DocStoreFile>();
    int flags = writable ? (O_RDWR | O_CREAT) : O_RDONLY;
    file->fd_ = ::open(path.c_str(), flags, 0644);
    if (file->fd_ < 0) throw_error(ErrorCode::kIoFailure, "cannot open " + path.string());
    off_t end = ::lseek(file->fd_, 0, SEEK_END);
    if (end < 0) throw_error(ErrorCode::kIoFailure, "seek failed on " + path.string());
    file->size_ = static_cast<uint64_t>(end);
    file->path_ = path;
    return file;
  }

  ~DocStoreFile() {
    if (fd_ >= 0) ::close(fd_);
  }

  uint64_t size() const { return size_; }

  void append(std::string_view data) {
    const char* p = data.data();
    size_t left = data.size();
    while (left > 0) {
      ssize_t n = ::pwrite(fd_, p, left, static_cast<off_t>(size_));
      if (n < 0) {
        ErrorCode code = errno == ENOSPC ? ErrorCode::kStorageFull : ErrorCode::kIoFailure;
        throw_error(code, "write failed on " + path_.string());
      }
      p += n;
      left -= static_cast<size_t>(n);
      size_ += static_cast<uint64_t>(n);
    }
  }

  std::string read_at(uint64_t offset, size_t len) const {
    std::string out(len, '\0');
    size_t done = 0;
    while (done < len) {
      ssize_t n = ::pread(fd_, out.data() + done, len - done,
                          static_cast<off_t>(offset + done));
      if (n < 0) throw_error(ErrorCode::kIoFailure, "read failed on " + path_.string());
      if (n == 0) throw_error(ErrorCode::kCorrupt, "short read on " + path_.string());
      done += static_cast<size_t>(n);
    }
    return out;
  }

  void truncate(uint64_t new_size) {
    if (::ftruncate(fd_, static_cast<off_t>(new_size)) != 0) {
      throw_error(ErrorCode::kIoFailure, "truncate failed on " + path_.string());
    }
    size_ = new_size;
  }

 private:
  int fd_ = -1;
  uint64_t size_ = 0;
  std::filesystem::path path_;
};

std::vector<PostingsCursor> Searcher::term_postings(std::string_view term) const {
  std::vector<PostingsCursor> cursors;
  for (const auto& segment : segments_) {
    if (auto cursor = segment->postings(term)) cursors.push_back(*cursor);
  }
  return cursors;
}

StoredDocument Searcher::document(uint64_t doc_id) const {
  if (doc_id >= doc_count_) throw std::out_of_range("doc_id beyond snapshot");
  uint64_t begin = doc_id == 0 ? 0 : (*record_ends_)[doc_id - 1];
  uint64_t end = (*record_ends_)[doc_id];
  StoredDocument doc = decode_record(store_->read_at(begin, end - begin));
  if (doc.doc_id != doc_id) throw_error(ErrorCode::kCorrupt, "doc_id mismatch in store");
  return doc;
}

std::string_view Searcher::language_of(uint64_t doc_id) const {
  if (doc_id >= doc_count_) throw std::out_of_range("doc_id beyond snapshot");
  return (*language_names_)[(*language_ids_)[doc_id]];
}

std::shared_ptr<Index> Index::create(const std::filesystem::path& dir, IndexOptions options) {
  options.analyzer.validate();
  std::filesystem::create_directories(dir);
  if (std::filesystem::exists(dir / kManifestFile)) {
    throw_error(ErrorCode::kAlreadyExists, dir.string());
  }
  auto index = std::shared_ptr<Index>(new Index());
  index->dir_ = dir;
  index->options_ = std::move(options);
  index->language_names_.emplace_back("und");
  index->language_lookup_.emplace("und", 0);
  index->store_ = DocStoreFile::open(dir / kDocsFile, true);
  detail::write_file_atomic(dir / kOffsetsFile, "");
  detail::write_file_atomic(dir / kLanguagesFile, "");
  {
    std::lock_guard<std::mutex> lock(index->mutex_);
    index->save_manifest_locked();
    index->publish_snapshot_locked();
  }
  return index;
}

bool Index::exists(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir / kManifestFile);
}

std::shared_ptr<Index> Index::open(const std::filesystem::path& dir) {
  if (!exists(dir)) {
    throw_error(ErrorCode::kUnknownIndex, dir.string() + " has no manifest");
  }
  auto index = std::shared_ptr<Index>(new Index());
  index->dir_ = dir;
  index->load_manifest();
  index->store_ = DocStoreFile::open(dir / kDocsFile, true);

  index->record_ends_ = load_u64_file(dir / kOffsetsFile);
  if (index->record_ends_.size() < index->next_doc_id_) {
    throw_error(ErrorCode::kCorrupt, "offset file behind manifest in " + dir.string());
  }
  if (index->record_ends_.size() > index->next_doc_id_) {
    // Unrefreshed leftovers from an interrupted run: drop them.
    index->record_ends_.resize(index->next_doc_id_);
    std::string trimmed;
    for (uint64_t end : index->record_ends_) detail::put_u64(trimmed, end);
    detail::write_file_atomic(dir / kOffsetsFile, trimmed);
  }
  uint64_t store_end = index->record_ends_.empty() ? 0 : index->record_ends_.back();
  if (index->store_->size() > store_end) index->store_->truncate(store_end);
  if (index->store_->size() < store_end) {
    throw_error(ErrorCode::kCorrupt, "document store truncated in " + dir.string());
  }

  auto langs = load_u32_file(dir / kLanguagesFile);
  if (langs.size() < index->next_doc_id_) {
    throw_error(ErrorCode::kCorrupt, "language file behind manifest in " + dir.string());
  }
  if (langs.size() > index->next_doc_id_) {
    langs.resize(index->next_doc_id_);
    std::string trimmed;
    for (uint32_t id : langs) detail::put_u32(trimmed, id);
    detail::write_file_atomic(dir / kLanguagesFile, trimmed);
  }
  index->language_ids_ = std::move(langs);

  index->pending_first_doc_id_ = index->next_doc_id_;

  // Sweep segment files that never made it into the manifest.
  std::vector<std::string> referenced;
  for (const auto& meta : index->segments_) referenced.push_back(meta.file);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.starts_with("seg_") && name.ends_with(".fts") &&
        std::find(referenced.begin(), referenced.end(), name) == referenced.end()) {
      std::error_code ignored;
      std::filesystem::remove(entry.path(), ignored);
    }
  }

  {
    std::lock_guard<std::mutex> lock(index->mutex_);
    index->publish_snapshot_locked();
  }
  return index;
}

Index::~Index() = default;

void Index::load_manifest() {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(detail::read_file(dir_ / kManifestFile));
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorCode::kCorrupt, std::string("manifest parse: ") + e.what());
  }
  if (manifest.value("format_version", 0u) != kManifestVersion) {
    throw_error(ErrorCode::kUnsupportedVersion, "manifest format_version");
  }
  options_.analyzer = analysis::AnalyzerConfig::from_stage_names(
      manifest.at("analyzer").get<std::vector<std::string>>());
  if (manifest.contains("writer_buffer_bytes")) {
    options_.writer_buffer_bytes = manifest["writer_buffer_bytes"].get<uint64_t>();
  }
  next_doc_id_ = manifest.at("next_doc_id").get<uint64_t>();
  next_segment_id_ = manifest.at("next_segment_id").get<uint64_t>();
  dup_skipped_ = manifest.value("dup_skipped", 0ull);
  raw_bytes_ = manifest.value("raw_bytes", 0ull);
  ingest_wall_seconds_ = manifest.value("ingest_wall_seconds", 0.0);
  avg_peak_memory_bytes_ = manifest.value("avg_peak_memory_bytes", 0ull);
  language_names_ = manifest.at("languages").get<std::vector<std::string>>();
  for (uint32_t i = 0; i < language_names_.size(); ++i) {
    language_lookup_.emplace(language_names_[i], i);
  }
  for (const auto& seg : manifest.at("segments")) {
    SegmentMeta meta;
    meta.file = seg.at("file").get<std::string>();
    meta.id = seg.at("id").get<uint64_t>();
    meta.first_doc_id = seg.at("first_doc_id").get<uint64_t>();
    meta.doc_count = seg.at("doc_count").get<uint64_t>();
    meta.raw_bytes = seg.at("raw_bytes").get<uint64_t>();
    meta.index_bytes = seg.at("index_bytes").get<uint64_t>();
    segments_.push_back(std::move(meta));
  }
}

void Index::save_manifest_locked() {
  nlohmann::json manifest;
  manifest["format_version"] = kManifestVersion;
  manifest["analyzer"] = options_.analyzer.stage_names();
  manifest["writer_buffer_bytes"] = options_.writer_buffer_bytes;
  manifest["next_doc_id"] = next_doc_id_ - pending_record_ends_.size();
  manifest["next_segment_id"] = next_segment_id_;
  manifest["dup_skipped"] = dup_skipped_;
  manifest["raw_bytes"] = raw_bytes_;
  manifest["ingest_wall_seconds"] = ingest_wall_seconds_;
  manifest["avg_peak_memory_bytes"] = avg_peak_memory_bytes_;
  manifest["languages"] = language_names_;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& meta : segments_) {
    segs.push_back({{"file", meta.file},
                    {"id", meta.id},
                    {"first_doc_id", meta.first_doc_id},
                    {"doc_count", meta.doc_count},
                    {"raw_bytes", meta.raw_bytes},
                    {"index_bytes", meta.index_bytes}});
  }
  manifest["segments"] = std::move(segs);
  detail::write_file_atomic(dir_ / kManifestFile, manifest.dump(2));
  manifest_dirty_ = false;
}

uint32_t Index::intern_language_locked(std::string_view language) {
  std::string key = language.empty() ? "und" : std::string(language);
  auto it = language_lookup_.find(key);
  if (it != language_lookup_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(language_names_.size());
  language_names_.push_back(key);
  language_lookup_.emplace(std::move(key), id);
  return id;
}

void Index::ensure_dedup_registry_locked() {
  if (dedup_registry_.has_value()) return;
  dedup_registry_.emplace();
  uint64_t begin = 0;
  auto scan = [&](const std::vector<uint64_t>& ends) {
    for (uint64_t end : ends) {
      // doc_id and digest sit right after the 8-byte record length.
      std::string head = store_->read_at(begin, 8 + 8 + 32);
      detail::ByteReader reader(head);
      reader.get_u64();
      uint64_t doc_id = reader.get_u64();
      Sha256Digest digest{};
      std::memcpy(digest.data(), reader.get_bytes(32).data(), 32);
      dedup_registry_->emplace(digest, doc_id);
      begin = end;
    }
  };
  scan(record_ends_);
  scan(pending_record_ends_);
}

AddOutcome Index::add_document(const DocumentInput& input, bool dedup) {
  return add_prepared(prepare(input), dedup);
}

PreparedDocument Index::prepare(DocumentInput input) const {
  if (!analysis::is_valid_utf8(input.text)) {
    throw_error(ErrorCode::kInvalidUtf8, "document text is not valid UTF-8");
  }
  PreparedDocument prepared;
  prepared.digest = content_hash(input.text);

  std::vector<analysis::Token> tokens = analysis::analyze(input.text, options_.analyzer);
  std::unordered_map<std::string_view, size_t> slots;
  slots.reserve(tokens.size());
  for (const analysis::Token& token : tokens) {
    auto [it, inserted] = slots.try_emplace(token.term, prepared.term_positions.size());
    if (inserted) {
      prepared.term_positions.emplace_back(token.term, std::vector<uint32_t>{});
    }
    prepared.term_positions[it->second].second.push_back(token.position);
  }
  prepared.input = std::move(input);
  return prepared;
}

AddOutcome Index::add_prepared(PreparedDocument prepared, bool dedup) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (closed_) throw_error(ErrorCode::kIndexClosed, dir_.string());

  if (dedup) {
    ensure_dedup_registry_locked();
    auto it = dedup_registry_->find(prepared.digest);
    if (it != dedup_registry_->end()) {
      ++dup_skipped_;
      manifest_dirty_ = true;
      return AddOutcome{AddOutcome::Kind::kSkippedDuplicate, it->second};
    }
  }

  uint64_t doc_id = next_doc_id_++;
  if (dedup_registry_.has_value()) dedup_registry_->emplace(prepared.digest, doc_id);

  store_->append(encode_record(doc_id, prepared.input, prepared.digest));
  pending_record_ends_.push_back(store_->size());
  pending_language_ids_.push_back(intern_language_locked(prepared.input.language));
  raw_bytes_ += prepared.input.text.size();
  pending_raw_bytes_ += prepared.input.text.size();

  for (auto& [term, positions] : prepared.term_positions) {
    auto [it, inserted] = pending_postings_.try_emplace(term);
    if (inserted) pending_postings_bytes_ += 48 + term.size();
    it->second.emplace_back(doc_id, std::move(positions));
    pending_postings_bytes_ += 40 + 4 * it->second.back().second.size();
  }

  if (pending_postings_bytes_ > options_.writer_buffer_bytes) {
    seal_pending_postings_locked();
  }
  return AddOutcome{AddOutcome::Kind::kIndexed, doc_id};
}

void Index::seal_pending_postings_locked() {
  uint64_t doc_count = next_doc_id_ - pending_first_doc_id_;
  if (doc_count == 0) return;

  SegmentData data;
  data.segment_id = next_segment_id_++;
  data.first_doc_id = pending_first_doc_id_;
  data.doc_count = doc_count;
  data.raw_bytes = pending_raw_bytes_;
  data.terms.reserve(pending_postings_.size());
  for (auto& [term, postings] : pending_postings_) {
    data.terms.push_back(SegmentTermEntry{term, std::move(postings)});
  }
  std::sort(data.terms.begin(), data.terms.end(),
            [](const SegmentTermEntry& a, const SegmentTermEntry& b) { return a.term < b.term; });

  SegmentMeta meta;
  meta.file = segment_file_name(data.segment_id);
  meta.id = data.segment_id;
  meta.first_doc_id = data.first_doc_id;
  meta.doc_count = doc_count;
  meta.raw_bytes = pending_raw_bytes_;
  meta.index_bytes = write_segment(data, dir_ / meta.file);
  sealed_unpublished_.push_back(std::move(meta));

  pending_postings_.clear();
  pending_postings_bytes_ = 0;
  pending_raw_bytes_ = 0;
  pending_first_doc_id_ = next_doc_id_;
}

std::optional<SegmentInfo> Index::refresh() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (closed_) throw_error(ErrorCode::kIndexClosed, dir_.string());
  seal_pending_postings_locked();
  if (sealed_unpublished_.empty()) {
    if (manifest_dirty_) save_manifest_locked();
    return std::nullopt;
  }

  std::string offsets;
  for (uint64_t end : pending_record_ends_) detail::put_u64(offsets, end);
  detail::append_file(dir_ / kOffsetsFile, offsets);
  record_ends_.insert(record_ends_.end(), pending_record_ends_.begin(),
                      pending_record_ends_.end());
  pending_record_ends_.clear();

  std::string langs;
  for (uint32_t id : pending_language_ids_) detail::put_u32(langs, id);
  detail::append_file(dir_ / kLanguagesFile, langs);
  language_ids_.insert(language_ids_.end(), pending_language_ids_.begin(),
                       pending_language_ids_.end());
  pending_language_ids_.clear();

  SegmentInfo info;
  for (const auto& meta : sealed_unpublished_) {
    info.segment_id = meta.id;
    info.doc_count += meta.doc_count;
    info.index_bytes += meta.index_bytes;
    segments_.push_back(meta);
  }
  sealed_unpublished_.clear();

  save_manifest_locked();
  publish_snapshot_locked();
  return info;
}

void Index::publish_snapshot_locked() {
  auto snapshot = std::make_shared<Searcher>();
  snapshot->analyzer_ = options_.analyzer;
  snapshot->doc_count_ = record_ends_.size();
  snapshot->store_ = store_;
  snapshot->record_ends_ = std::make_shared<const std::vector<uint64_t>>(record_ends_);
  snapshot->language_ids_ = std::make_shared<const std::vector<uint32_t>>(language_ids_);
  snapshot->language_names_ = std::make_shared<const std::vector<std::string>>(language_names_);

  std::vector<std::shared_ptr<SegmentReader>> readers;
  readers.reserve(segments_.size());
  const std::vector<std::shared_ptr<SegmentReader>>* previous =
      snapshot_ ? &snapshot_->segments_ : nullptr;
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (previous && i < previous->size() &&
        (*previous)[i]->info().segment_id == segments_[i].id) {
      readers.push_back((*previous)[i]);
    } else {
      readers.push_back(SegmentReader::open(dir_ / segments_[i].file));
    }
  }
  snapshot->segments_ = std::move(readers);
  snapshot_ = std::move(snapshot);
}

std::shared_ptr<const Searcher> Index::searcher() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return snapshot_;
}

IndexCounters Index::counters() const {
  std::lock_guard<std::mutex> lock(mutex_);
  IndexCounters c;
  c.docs_indexed = next_doc_id_;
  c.dup_skipped = dup_skipped_;
  c.raw_bytes = raw_bytes_;
  for (const auto& meta : segments_) c.index_bytes += meta.index_bytes;
  c.total_disk_bytes = c.index_bytes;
  for (const char* name : {kDocsFile, kOffsetsFile, kLanguagesFile, kManifestFile}) {
    std::error_code ec;
    uint64_t size = std::filesystem::file_size(dir_ / name, ec);
    if (!ec) c.total_disk_bytes += size;
  }
  c.ingest_wall_seconds = ingest_wall_seconds_;
  c.avg_peak_memory_bytes = avg_peak_memory_bytes_;
  return c;
}

void Index::record_ingest(double wall_seconds, uint64_t peak_memory_bytes) {
  std::lock_guard<std::mutex> lock(mutex_);
  ingest_wall_seconds_ += wall_seconds;
  avg_peak_memory_bytes_ = std::max(avg_peak_memory_bytes_, peak_memory_bytes);
  manifest_dirty_ = true;
}

void Index::close() {
  std::lock_guard<std::mutex> lock(mutex_);
  closed_ = true;
}

}  // namespace fts
