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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fts {

// Segment file layout, version 1, all integers little-endian:
//
//   "FTSG" magic, u32 version
//   u64 segment_id, first_doc_id, doc_count, raw_bytes, term_count
//   u64 dict_bytes, postings_bytes
//   dictionary block: per term in byte-sorted order:
//     varint term_len, term bytes, varint postings_offset_delta
//   postings block: per term:
//     varint doc_count, then per doc: varint doc_id_delta (first absolute),
//     varint position_count, varint position deltas (first absolute)
//   u32 crc32 over all preceding bytes

inline constexpr char kSegmentMagic[4] = {'F', 'T', 'S', 'G'};
inline constexpr uint32_t kSegmentVersion = 1;

struct SegmentTermEntry {
  std::string term;
  std::vector<std::pair<uint64_t, std::vector<uint32_t>>> postings;  // doc_id -> positions
};

struct SegmentData {
  uint64_t segment_id = 0;
  uint64_t first_doc_id = 0;
  uint64_t doc_count = 0;
  uint64_t raw_bytes = 0;
  std::vector<SegmentTermEntry> terms;  // sorted by term bytes
};

/// Serializes a sealed segment; returns the file size in bytes.
uint64_t write_segment(const SegmentData& segment, const std::filesystem::path& path);

/// Streaming decoder over one term's postings inside a segment buffer.
class PostingsCursor {
 public:
  PostingsCursor(const uint8_t* data, size_t size);

  uint64_t doc_count() const { return doc_count_; }

  /// Advances to the next document. Returns false past the last one.
  bool next();

  uint64_t doc_id() const { return doc_id_; }
  uint32_t position_count() const { return position_count_; }

  /// Decodes the current document's positions (strictly increasing).
  void read_positions(std::vector<uint32_t>& out);

 private:
  void skip_pending_positions();

  const uint8_t* p_;
  const uint8_t* end_;
  uint64_t doc_count_ = 0;
  uint64_t consumed_ = 0;
  uint64_t doc_id_ = 0;
  uint32_t position_count_ = 0;
  bool positions_pending_ = false;
};

class SegmentReader {
 public:
  struct Info {
    uint64_t segment_id = 0;
    uint64_t first_doc_id = 0;
    uint64_t doc_count = 0;
    uint64_t raw_bytes = 0;
    uint64_t index_bytes = 0;
    uint64_t term_count = 0;
  };

  /// Reads and validates a segment file. Throws BadMagic, UnsupportedVersion,
  /// or Corrupt.
  static std::shared_ptr<SegmentReader> open(const std::filesystem::path& path);

  const Info& info() const { return info_; }

  /// Cursor over `term`'s postings, or nullopt when the term is absent.
  std::optional<PostingsCursor> postings(std::string_view term) const;

  /// Terms in dictionary order (views into the segment buffer).
  std::vector<std::string_view> terms() const;

 private:
  struct DictEntry {
    std::string_view term;
    uint64_t postings_offset = 0;
  };

  Info info_;
  std::string buffer_;
  std::vector<DictEntry> dictionary_;
  const uint8_t* postings_base_ = nullptr;
  size_t postings_size_ = 0;
};

}  // namespace fts
