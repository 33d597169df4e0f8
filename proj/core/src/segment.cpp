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

#include "ftsearch/segment.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "byteio.hpp"
#include "ftsearch/error.hpp"

namespace fts {

namespace {

uint32_t crc32_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
              static_cast<uInt>(data.size()));
  return static_cast<uint32_t>(crc);
}

}  // namespace

uint64_t write_segment(const SegmentData& segment, const std::filesystem::path& path) {
  std::string postings_block;
  std::string dict_block;
  uint64_t previous_offset = 0;
  bool first_term = true;
  for (const SegmentTermEntry& entry : segment.terms) {
    uint64_t offset = postings_block.size();
    detail::put_varint(dict_block, entry.term.size());
    dict_block.append(entry.term);
    detail::put_varint(dict_block, first_term ? offset : offset - previous_offset);
    previous_offset = offset;
    first_term = false;

    detail::put_varint(postings_block, entry.postings.size());
    uint64_t previous_doc = 0;
    bool first_doc = true;
    for (const auto& [doc_id, positions] : entry.postings) {
      detail::put_varint(postings_block, first_doc ? doc_id : doc_id - previous_doc);
      previous_doc = doc_id;
      first_doc = false;
      detail::put_varint(postings_block, positions.size());
      uint32_t previous_pos = 0;
      bool first_pos = true;
      for (uint32_t pos : positions) {
        detail::put_varint(postings_block, first_pos ? pos : pos - previous_pos);
        previous_pos = pos;
        first_pos = false;
      }
    }
  }

  std::string file;
  file.reserve(64 + dict_block.size() + postings_block.size() + 4);
  file.append(kSegmentMagic, sizeof(kSegmentMagic));
  detail::put_u32(file, kSegmentVersion);
  detail::put_u64(file, segment.segment_id);
  detail::put_u64(file, segment.first_doc_id);
  detail::put_u64(file, segment.doc_count);
  detail::put_u64(file, segment.raw_bytes);
  detail::put_u64(file, segment.terms.size());
  detail::put_u64(file, dict_block.size());
  detail::put_u64(file, postings_block.size());
  file.append(dict_block);
  file.append(postings_block);
  detail::put_u32(file, crc32_of(file));

  detail::write_file_atomic(path, file);
  return file.size();
}

PostingsCursor::PostingsCursor(const uint8_t* data, size_t size)
    : p_(data), end_(data + size) {
  detail::ByteReader reader(p_, size);
  doc_count_ = reader.get_varint();
  p_ = reader.cursor();
}

void PostingsCursor::skip_pending_positions() {
  if (!positions_pending_) return;
  detail::ByteReader reader(p_, static_cast<size_t>(end_ - p_));
  for (uint32_t i = 0; i < position_count_; ++i) reader.get_varint();
  p_ = reader.cursor();
  positions_pending_ = false;
}

bool PostingsCursor::next() {
  skip_pending_positions();
  if (consumed_ >= doc_count_) return false;
  detail::ByteReader reader(p_, static_cast<size_t>(end_ - p_));
  uint64_t delta = reader.get_varint();
  doc_id_ = consumed_ == 0 ? delta : doc_id_ + delta;
  position_count_ = static_cast<uint32_t>(reader.get_varint());
  p_ = reader.cursor();
  positions_pending_ = true;
  ++consumed_;
  return true;
}

void PostingsCursor::read_positions(std::vector<uint32_t>& out) {
  out.clear();
  out.reserve(position_count_);
  detail::ByteReader reader(p_, static_cast<size_t>(end_ - p_));
  uint32_t pos = 0;
  for (uint32_t i = 0; i < position_count_; ++i) {
    uint64_t delta = reader.get_varint();
    pos = i == 0 ? static_cast<uint32_t>(delta) : pos + static_cast<uint32_t>(delta);
    out.push_back(pos);
  }
  p_ = reader.cursor();
  positions_pending_ = false;
}

std::shared_ptr<SegmentReader> SegmentReader::open(const std::filesystem::path& path) {
  auto reader = std::make_shared<SegmentReader>();
  reader->buffer_ = detail::read_file(path);
  const std::string& buf = reader->buffer_;

  if (buf.size() < sizeof(kSegmentMagic) + 4 + 4 ||
      std::memcmp(buf.data(), kSegmentMagic, sizeof(kSegmentMagic)) != 0) {
    throw_error(ErrorCode::kBadMagic, path.string());
  }
  detail::ByteReader header(buf);
  header.skip(sizeof(kSegmentMagic));
  uint32_t version = header.get_u32();
  if (version != kSegmentVersion) {
    throw_error(ErrorCode::kUnsupportedVersion,
                path.string() + " version " + std::to_string(version));
  }

  std::string_view body(buf.data(), buf.size() - 4);
  detail::ByteReader crc_reader(
      reinterpret_cast<const uint8_t*>(buf.data()) + buf.size() - 4, 4);
  if (crc_reader.get_u32() != crc32_of(body)) {
    throw_error(ErrorCode::kCorrupt, "checksum mismatch in " + path.string());
  }

  Info& info = reader->info_;
  info.segment_id = header.get_u64();
  info.first_doc_id = header.get_u64();
  info.doc_count = header.get_u64();
  info.raw_bytes = header.get_u64();
  info.term_count = header.get_u64();
  info.index_bytes = buf.size();
  uint64_t dict_bytes = header.get_u64();
  uint64_t postings_bytes = header.get_u64();
  if (header.remaining() < dict_bytes + postings_bytes + 4) {
    throw_error(ErrorCode::kCorrupt, "block lengths exceed file size in " + path.string());
  }

  const uint8_t* dict_base = header.cursor();
  reader->postings_base_ = dict_base + dict_bytes;
  reader->postings_size_ = postings_bytes;

  detail::ByteReader dict(dict_base, dict_bytes);
  reader->dictionary_.reserve(info.term_count);
  uint64_t offset = 0;
  for (uint64_t i = 0; i < info.term_count; ++i) {
    uint64_t term_len = dict.get_varint();
    std::string_view term = dict.get_bytes(term_len);
    uint64_t delta = dict.get_varint();
    offset = i == 0 ? delta : offset + delta;
    if (offset > postings_bytes) {
      throw_error(ErrorCode::kCorrupt, "postings offset out of range in " + path.string());
    }
    if (i > 0 && !(reader->dictionary_.back().term < term)) {
      throw_error(ErrorCode::kCorrupt, "term dictionary not sorted in " + path.string());
    }
    reader->dictionary_.push_back({term, offset});
  }
  return reader;
}

std::optional<PostingsCursor> SegmentReader::postings(std::string_view term) const {
  auto it = std::lower_bound(dictionary_.begin(), dictionary_.end(), term,
                             [](const DictEntry& e, std::string_view t) { return e.term < t; });
  if (it == dictionary_.end() || it->term != term) return std::nullopt;
  return PostingsCursor(postings_base_ + it->postings_offset,
                        postings_size_ - it->postings_offset);
}

std::vector<std::string_view> SegmentReader::terms() const {
  std::vector<std::string_view> out;
  out.reserve(dictionary_.size());
  for (const DictEntry& entry : dictionary_) out.push_back(entry.term);
  return out;
}

}  // namespace fts
