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

// Self-contained reader for the subset of Parquet needed for document
// ingestion: flat schemas, BYTE_ARRAY string columns, PLAIN and dictionary
// encodings, data pages v1/v2, and the uncompressed / gzip / snappy codecs.

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <vector>

#include "ftsearch/error.hpp"
#include "sources_internal.hpp"

namespace fts::bulk {

namespace {

[[noreturn]] void bad_file(const std::string& what) {
  throw_error(ErrorCode::kInputUnreadable, "parquet: " + what);
}

// ---------------------------------------------------------------------------
// Thrift compact protocol
// ---------------------------------------------------------------------------

enum class ThriftType : uint8_t {
  kStop = 0,
  kBoolTrue = 1,
  kBoolFalse = 2,
  kByte = 3,
  kI16 = 4,
  kI32 = 5,
  kI64 = 6,
  kDouble = 7,
  kBinary = 8,
  kList = 9,
  kSet = 10,
  kMap = 11,
  kStruct = 12,
};

class ThriftReader {
 public:
  ThriftReader(const uint8_t* data, size_t size) : p_(data), end_(data + size) {}

  uint8_t read_byte() {
    if (p_ >= end_) bad_file("truncated thrift data");
    return *p_++;
  }

  uint64_t read_varint() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      uint8_t b = read_byte();
      v |= static_cast<uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
      shift += 7;
      if (shift > 63) bad_file("varint overflow");
    }
  }

  int64_t read_zigzag() {
    uint64_t v = read_varint();
    return static_cast<int64_t>(v >> 1) ^ -static_cast<int64_t>(v & 1);
  }

  std::string_view read_binary() {
    uint64_t len = read_varint();
    if (static_cast<size_t>(end_ - p_) < len) bad_file("truncated thrift string");
    std::string_view v(reinterpret_cast<const char*>(p_), len);
    p_ += len;
    return v;
  }

  struct FieldHeader {
    int16_t id = 0;
    ThriftType type = ThriftType::kStop;
  };

  FieldHeader read_field_header(int16_t last_id) {
    uint8_t b = read_byte();
    if (b == 0) return {0, ThriftType::kStop};
    auto type = static_cast<ThriftType>(b & 0x0F);
    uint8_t delta = b >> 4;
    int16_t id = delta != 0 ? static_cast<int16_t>(last_id + delta)
                            : static_cast<int16_t>(read_zigzag());
    return {id, type};
  }

  struct ListHeader {
    uint64_t size = 0;
    ThriftType elem_type = ThriftType::kStop;
  };

  ListHeader read_list_header() {
    uint8_t b = read_byte();
    auto elem = static_cast<ThriftType>(b & 0x0F);
    uint64_t size = b >> 4;
    if (size == 0x0F) size = read_varint();
    return {size, elem};
  }

  void skip_value(ThriftType type) {
    switch (type) {
      case ThriftType::kBoolTrue:
      case ThriftType::kBoolFalse:
        return;
      case ThriftType::kByte:
        read_byte();
        return;
      case ThriftType::kI16:
      case ThriftType::kI32:
      case ThriftType::kI64:
        read_zigzag();
        return;
      case ThriftType::kDouble:
        for (int i = 0; i < 8; ++i) read_byte();
        return;
      case ThriftType::kBinary:
        read_binary();
        return;
      case ThriftType::kList:
      case ThriftType::kSet: {
        ListHeader header = read_list_header();
        for (uint64_t i = 0; i < header.size; ++i) skip_value(header.elem_type);
        return;
      }
      case ThriftType::kMap: {
        uint8_t first = read_byte();
        if (first == 0) return;
        // Back up: size varint began with `first`.
        --p_;
        uint64_t size = read_varint();
        uint8_t kv = read_byte();
        auto key_type = static_cast<ThriftType>(kv >> 4);
        auto val_type = static_cast<ThriftType>(kv & 0x0F);
        for (uint64_t i = 0; i < size; ++i) {
          skip_value(key_type);
          skip_value(val_type);
        }
        return;
      }
      case ThriftType::kStruct: {
        int16_t last = 0;
        while (true) {
          FieldHeader f = read_field_header(last);
          if (f.type == ThriftType::kStop) return;
          skip_value(f.type);
          last = f.id;
        }
      }
      default:
        bad_file("unknown thrift type");
    }
  }

  /// Iterates struct fields, invoking fn(field_id, type); fn returns true if
  /// it consumed the value, false to have it skipped.
  template <typename Fn>
  void read_struct(Fn&& fn) {
    int16_t last = 0;
    while (true) {
      FieldHeader f = read_field_header(last);
      if (f.type == ThriftType::kStop) return;
      if (!fn(f.id, f.type)) skip_value(f.type);
      last = f.id;
    }
  }

 private:
  const uint8_t* p_;
  const uint8_t* end_;

 public:
  const uint8_t* cursor() const { return p_; }
};

// ---------------------------------------------------------------------------
// Metadata structs (only the fields this reader uses)
// ---------------------------------------------------------------------------

constexpr int32_t kTypeByteArray = 6;
constexpr int32_t kCodecUncompressed = 0;
constexpr int32_t kCodecSnappy = 1;
constexpr int32_t kCodecGzip = 2;
constexpr int32_t kEncodingPlain = 0;
constexpr int32_t kEncodingPlainDictionary = 2;
constexpr int32_t kEncodingRle = 3;
constexpr int32_t kEncodingRleDictionary = 8;
constexpr int32_t kPageTypeData = 0;
constexpr int32_t kPageTypeDictionary = 2;
constexpr int32_t kPageTypeDataV2 = 3;

struct SchemaElement {
  int32_t type = -1;
  int32_t repetition = 0;  // 0 required, 1 optional, 2 repeated
  std::string name;
  int32_t num_children = 0;
};

struct ColumnMeta {
  int32_t type = -1;
  std::vector<std::string> path;
  int32_t codec = 0;
  int64_t num_values = 0;
  int64_t total_compressed_size = 0;
  int64_t data_page_offset = -1;
  int64_t dictionary_page_offset = -1;
};

struct RowGroupMeta {
  std::vector<ColumnMeta> columns;
  int64_t num_rows = 0;
};

struct FileMeta {
  std::vector<SchemaElement> schema;
  std::vector<RowGroupMeta> row_groups;
};

SchemaElement parse_schema_element(ThriftReader& reader) {
  SchemaElement elem;
  reader.read_struct([&](int16_t id, ThriftType type) {
    switch (id) {
      case 1: elem.type = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 3: elem.repetition = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 4: elem.name = std::string(reader.read_binary()); return true;
      case 5: elem.num_children = static_cast<int32_t>(reader.read_zigzag()); return true;
      default: (void)type; return false;
    }
  });
  return elem;
}

ColumnMeta parse_column_meta(ThriftReader& reader) {
  ColumnMeta meta;
  reader.read_struct([&](int16_t id, ThriftType type) {
    switch (id) {
      case 1: meta.type = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 3: {
        auto header = reader.read_list_header();
        for (uint64_t i = 0; i < header.size; ++i) {
          meta.path.emplace_back(reader.read_binary());
        }
        return true;
      }
      case 4: meta.codec = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 5: meta.num_values = reader.read_zigzag(); return true;
      case 7: meta.total_compressed_size = reader.read_zigzag(); return true;
      case 9: meta.data_page_offset = reader.read_zigzag(); return true;
      case 11: meta.dictionary_page_offset = reader.read_zigzag(); return true;
      default: (void)type; return false;
    }
  });
  return meta;
}

RowGroupMeta parse_row_group(ThriftReader& reader) {
  RowGroupMeta group;
  reader.read_struct([&](int16_t id, ThriftType type) {
    switch (id) {
      case 1: {
        auto header = reader.read_list_header();
        for (uint64_t i = 0; i < header.size; ++i) {
          // ColumnChunk: field 3 holds ColumnMetaData.
          ColumnMeta meta;
          reader.read_struct([&](int16_t cid, ThriftType ctype) {
            if (cid == 3 && ctype == ThriftType::kStruct) {
              meta = parse_column_meta(reader);
              return true;
            }
            return false;
          });
          group.columns.push_back(std::move(meta));
        }
        return true;
      }
      case 3: group.num_rows = reader.read_zigzag(); return true;
      default: (void)type; return false;
    }
  });
  return group;
}

FileMeta parse_file_meta(const uint8_t* data, size_t size) {
  ThriftReader reader(data, size);
  FileMeta meta;
  reader.read_struct([&](int16_t id, ThriftType type) {
    switch (id) {
      case 2: {
        auto header = reader.read_list_header();
        for (uint64_t i = 0; i < header.size; ++i) {
          meta.schema.push_back(parse_schema_element(reader));
        }
        return true;
      }
      case 4: {
        auto header = reader.read_list_header();
        for (uint64_t i = 0; i < header.size; ++i) {
          meta.row_groups.push_back(parse_row_group(reader));
        }
        return true;
      }
      default: (void)type; return false;
    }
  });
  return meta;
}

struct PageHeader {
  int32_t type = -1;
  int32_t uncompressed_size = 0;
  int32_t compressed_size = 0;
  // v1 data page
  int32_t num_values = 0;
  int32_t encoding = 0;
  int32_t def_level_encoding = kEncodingRle;
  // dictionary page
  int32_t dict_num_values = 0;
  // v2 data page
  int32_t v2_num_nulls = 0;
  int32_t v2_def_levels_len = 0;
  int32_t v2_rep_levels_len = 0;
  bool v2_compressed = true;
};

PageHeader parse_page_header(ThriftReader& reader) {
  PageHeader page;
  reader.read_struct([&](int16_t id, ThriftType type) {
    switch (id) {
      case 1: page.type = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 2: page.uncompressed_size = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 3: page.compressed_size = static_cast<int32_t>(reader.read_zigzag()); return true;
      case 5:
        reader.read_struct([&](int16_t fid, ThriftType ftype) {
          switch (fid) {
            case 1: page.num_values = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 2: page.encoding = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 3: page.def_level_encoding = static_cast<int32_t>(reader.read_zigzag()); return true;
            default: (void)ftype; return false;
          }
        });
        return true;
      case 7:
        reader.read_struct([&](int16_t fid, ThriftType ftype) {
          switch (fid) {
            case 1: page.dict_num_values = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 2: page.encoding = static_cast<int32_t>(reader.read_zigzag()); return true;
            default: (void)ftype; return false;
          }
        });
        return true;
      case 8:
        reader.read_struct([&](int16_t fid, ThriftType ftype) {
          switch (fid) {
            case 1: page.num_values = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 2: page.v2_num_nulls = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 4: page.encoding = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 5: page.v2_def_levels_len = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 6: page.v2_rep_levels_len = static_cast<int32_t>(reader.read_zigzag()); return true;
            case 7:
              page.v2_compressed = ftype == ThriftType::kBoolTrue;
              return true;
            default: return false;
          }
        });
        return true;
      default: (void)type; return false;
    }
  });
  return page;
}

// ---------------------------------------------------------------------------
// Decompression
// ---------------------------------------------------------------------------

std::string gzip_inflate(std::string_view in, size_t expected_out) {
  std::string out(expected_out, '\0');
  z_stream stream{};
  if (inflateInit2(&stream, 15 + 32) != Z_OK) bad_file("inflateInit failed");
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  stream.avail_in = static_cast<uInt>(in.size());
  stream.next_out = reinterpret_cast<Bytef*>(out.data());
  stream.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&stream, Z_FINISH);
  inflateEnd(&stream);
  if (rc != Z_STREAM_END || stream.avail_out != 0) bad_file("gzip page decode failed");
  return out;
}

std::string snappy_inflate(std::string_view in, size_t expected_out) {
  size_t i = 0;
  uint64_t out_len = 0;
  int shift = 0;
  while (true) {
    if (i >= in.size()) bad_file("snappy header truncated");
    uint8_t b = static_cast<uint8_t>(in[i++]);
    out_len |= static_cast<uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) break;
    shift += 7;
  }
  if (out_len != expected_out) bad_file("snappy length mismatch");
  std::string out;
  out.reserve(out_len);
  while (i < in.size()) {
    uint8_t tag = static_cast<uint8_t>(in[i++]);
    uint32_t kind = tag & 3;
    if (kind == 0) {  // literal
      uint64_t len = (tag >> 2) + 1;
      if (len > 60) {
        uint32_t extra = static_cast<uint32_t>(len - 60);
        if (i + extra > in.size()) bad_file("snappy literal truncated");
        len = 0;
        for (uint32_t k = 0; k < extra; ++k) {
          len |= static_cast<uint64_t>(static_cast<uint8_t>(in[i + k])) << (8 * k);
        }
        len += 1;
        i += extra;
      }
      if (i + len > in.size()) bad_file("snappy literal truncated");
      out.append(in.substr(i, len));
      i += len;
    } else {
      uint64_t len = 0;
      uint64_t offset = 0;
      if (kind == 1) {
        len = ((tag >> 2) & 7) + 4;
        if (i >= in.size()) bad_file("snappy copy truncated");
        offset = (static_cast<uint64_t>(tag >> 5) << 8) | static_cast<uint8_t>(in[i++]);
      } else if (kind == 2) {
        len = (tag >> 2) + 1;
        if (i + 2 > in.size()) bad_file("snappy copy truncated");
        offset = static_cast<uint8_t>(in[i]) | (static_cast<uint64_t>(static_cast<uint8_t>(in[i + 1])) << 8);
        i += 2;
      } else {
        len = (tag >> 2) + 1;
        if (i + 4 > in.size()) bad_file("snappy copy truncated");
        for (int k = 0; k < 4; ++k) {
          offset |= static_cast<uint64_t>(static_cast<uint8_t>(in[i + k])) << (8 * k);
        }
        i += 4;
      }
      if (offset == 0 || offset > out.size()) bad_file("snappy bad copy offset");
      size_t from = out.size() - offset;
      for (uint64_t k = 0; k < len; ++k) out.push_back(out[from + k]);  // overlap-safe
    }
  }
  if (out.size() != out_len) bad_file("snappy output length mismatch");
  return out;
}

std::string decompress(std::string_view in, int32_t codec, size_t expected_out) {
  switch (codec) {
    case kCodecUncompressed: return std::string(in);
    case kCodecSnappy: return snappy_inflate(in, expected_out);
    case kCodecGzip: return gzip_inflate(in, expected_out);
    default: bad_file("unsupported codec " + std::to_string(codec));
  }
}

// ---------------------------------------------------------------------------
// RLE / bit-packed hybrid levels
// ---------------------------------------------------------------------------

void decode_rle_hybrid(std::string_view data, uint32_t bit_width, size_t count,
                       std::vector<uint32_t>& out) {
  out.clear();
  out.reserve(count);
  if (bit_width == 0) {
    out.assign(count, 0);
    return;
  }
  size_t i = 0;
  auto read_varint = [&]() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (i >= data.size()) bad_file("rle varint truncated");
      uint8_t b = static_cast<uint8_t>(data[i++]);
      v |= static_cast<uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
      shift += 7;
    }
  };
  while (out.size() < count) {
    uint64_t header = read_varint();
    if (header & 1) {
      uint64_t groups = header >> 1;
      uint64_t values = groups * 8;
      size_t bytes = static_cast<size_t>(groups) * bit_width;
      if (i + bytes > data.size()) bad_file("rle bit-packed run truncated");
      for (uint64_t v = 0; v < values && out.size() < count; ++v) {
        size_t bit = v * bit_width;
        uint32_t value = 0;
        for (uint32_t k = 0; k < bit_width; ++k) {
          size_t byte_at = i + (bit + k) / 8;
          uint32_t bit_at = (bit + k) % 8;
          value |= ((static_cast<uint8_t>(data[byte_at]) >> bit_at) & 1u) << k;
        }
        out.push_back(value);
      }
      i += bytes;
    } else {
      uint64_t repeats = header >> 1;
      uint32_t value = 0;
      size_t bytes = (bit_width + 7) / 8;
      if (i + bytes > data.size()) bad_file("rle run truncated");
      for (size_t k = 0; k < bytes; ++k) {
        value |= static_cast<uint32_t>(static_cast<uint8_t>(data[i + k])) << (8 * k);
      }
      i += bytes;
      for (uint64_t r = 0; r < repeats && out.size() < count; ++r) out.push_back(value);
    }
  }
}

uint32_t bit_width_for(uint32_t max_value) {
  uint32_t width = 0;
  while ((1u << width) <= max_value && width < 32) ++width;
  return max_value == 0 ? 0 : width;
}

// ---------------------------------------------------------------------------
// Column chunk decoding
// ---------------------------------------------------------------------------

using OptionalStrings = std::vector<std::optional<std::string>>;

void decode_plain_values(std::string_view data, size_t count, std::vector<std::string>& out) {
  size_t i = 0;
  for (size_t v = 0; v < count; ++v) {
    if (i + 4 > data.size()) bad_file("plain value truncated");
    uint32_t len = 0;
    for (int k = 0; k < 4; ++k) {
      len |= static_cast<uint32_t>(static_cast<uint8_t>(data[i + k])) << (8 * k);
    }
    i += 4;
    if (i + len > data.size()) bad_file("plain value truncated");
    out.emplace_back(data.substr(i, len));
    i += len;
  }
}

class ColumnChunkDecoder {
 public:
  ColumnChunkDecoder(std::ifstream& file, const ColumnMeta& meta, uint32_t max_def_level)
      : meta_(meta), max_def_(max_def_level) {
    int64_t start = meta.data_page_offset;
    if (meta.dictionary_page_offset > 0 && meta.dictionary_page_offset < start) {
      start = meta.dictionary_page_offset;
    }
    if (start < 0) bad_file("missing page offset");
    buffer_.resize(static_cast<size_t>(meta.total_compressed_size));
    file.seekg(start);
    file.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!file) bad_file("column chunk read failed");
  }

  /// Decodes every page of the chunk into per-row optional strings.
  OptionalStrings decode() {
    OptionalStrings rows;
    rows.reserve(static_cast<size_t>(meta_.num_values));
    size_t at = 0;
    int64_t remaining = meta_.num_values;
    while (remaining > 0) {
      if (at >= buffer_.size()) bad_file("ran out of pages");
      ThriftReader reader(reinterpret_cast<const uint8_t*>(buffer_.data()) + at,
                          buffer_.size() - at);
      PageHeader page = parse_page_header(reader);
      size_t header_len = static_cast<size_t>(
          reader.cursor() - reinterpret_cast<const uint8_t*>(buffer_.data()) - at);
      at += header_len;
      if (at + static_cast<size_t>(page.compressed_size) > buffer_.size()) {
        bad_file("page body exceeds chunk");
      }
      std::string_view body(buffer_.data() + at, static_cast<size_t>(page.compressed_size));
      at += static_cast<size_t>(page.compressed_size);

      if (page.type == kPageTypeDictionary) {
        std::string data = decompress(body, meta_.codec,
                                      static_cast<size_t>(page.uncompressed_size));
        dictionary_.clear();
        decode_plain_values(data, static_cast<size_t>(page.dict_num_values), dictionary_);
        continue;
      }
      if (page.type == kPageTypeData) {
        decode_data_page_v1(page, body, rows);
      } else if (page.type == kPageTypeDataV2) {
        decode_data_page_v2(page, body, rows);
      } else {
        bad_file("unsupported page type " + std::to_string(page.type));
      }
      remaining -= page.num_values;
    }
    return rows;
  }

 private:
  void append_values(int32_t encoding, std::string_view values_data,
                     const std::vector<uint32_t>& def_levels, size_t num_present,
                     OptionalStrings& rows) {
    std::vector<std::string> present;
    present.reserve(num_present);
    if (encoding == kEncodingPlain) {
      decode_plain_values(values_data, num_present, present);
    } else if (encoding == kEncodingPlainDictionary || encoding == kEncodingRleDictionary) {
      if (values_data.empty()) {
        if (num_present > 0) bad_file("empty dictionary-coded page");
      } else {
        uint32_t width = static_cast<uint8_t>(values_data[0]);
        std::vector<uint32_t> ids;
        decode_rle_hybrid(values_data.substr(1), width, num_present, ids);
        for (uint32_t id : ids) {
          if (id >= dictionary_.size()) bad_file("dictionary index out of range");
          present.push_back(dictionary_[id]);
        }
      }
    } else {
      bad_file("unsupported value encoding " + std::to_string(encoding));
    }

    size_t next = 0;
    if (def_levels.empty()) {
      for (std::string& value : present) rows.emplace_back(std::move(value));
      return;
    }
    for (uint32_t level : def_levels) {
      if (level == max_def_) {
        rows.emplace_back(std::move(present[next++]));
      } else {
        rows.emplace_back(std::nullopt);
      }
    }
  }

  void decode_data_page_v1(const PageHeader& page, std::string_view body,
                           OptionalStrings& rows) {
    std::string data =
        decompress(body, meta_.codec, static_cast<size_t>(page.uncompressed_size));
    std::string_view rest(data);

    std::vector<uint32_t> def_levels;
    if (max_def_ > 0) {
      if (page.def_level_encoding != kEncodingRle) {
        bad_file("unsupported definition level encoding");
      }
      if (rest.size() < 4) bad_file("definition levels truncated");
      uint32_t len = 0;
      for (int k = 0; k < 4; ++k) {
        len |= static_cast<uint32_t>(static_cast<uint8_t>(rest[k])) << (8 * k);
      }
      rest.remove_prefix(4);
      if (rest.size() < len) bad_file("definition levels truncated");
      decode_rle_hybrid(rest.substr(0, len), bit_width_for(max_def_),
                        static_cast<size_t>(page.num_values), def_levels);
      rest.remove_prefix(len);
    }
    size_t num_present = def_levels.empty()
                             ? static_cast<size_t>(page.num_values)
                             : static_cast<size_t>(std::count(def_levels.begin(),
                                                              def_levels.end(), max_def_));
    append_values(page.encoding, rest, def_levels, num_present, rows);
  }

  void decode_data_page_v2(const PageHeader& page, std::string_view body,
                           OptionalStrings& rows) {
    size_t levels_len =
        static_cast<size_t>(page.v2_rep_levels_len) + static_cast<size_t>(page.v2_def_levels_len);
    if (body.size() < levels_len) bad_file("v2 levels truncated");
    std::string_view def_bytes =
        body.substr(static_cast<size_t>(page.v2_rep_levels_len),
                    static_cast<size_t>(page.v2_def_levels_len));
    std::vector<uint32_t> def_levels;
    if (max_def_ > 0) {
      decode_rle_hybrid(def_bytes, bit_width_for(max_def_),
                        static_cast<size_t>(page.num_values), def_levels);
    }

    std::string_view values_body = body.substr(levels_len);
    std::string data;
    if (page.v2_compressed) {
      data = decompress(values_body, meta_.codec,
                        static_cast<size_t>(page.uncompressed_size) - levels_len);
    } else {
      data = std::string(values_body);
    }
    size_t num_present = static_cast<size_t>(page.num_values - page.v2_num_nulls);
    append_values(page.encoding, data, def_levels, num_present, rows);
  }

  const ColumnMeta& meta_;
  uint32_t max_def_;
  std::string buffer_;
  std::vector<std::string> dictionary_;
};

// ---------------------------------------------------------------------------
// Source
// ---------------------------------------------------------------------------

class ParquetSource : public DocumentSource {
 public:
  explicit ParquetSource(const std::filesystem::path& path)
      : file_(path, std::ios::binary), name_(path.string()) {
    if (!file_) bad_file("cannot open " + name_);
    file_.seekg(0, std::ios::end);
    int64_t size = file_.tellg();
    if (size < 12) bad_file("file too small: " + name_);
    char head[4];
    file_.seekg(0);
    file_.read(head, 4);
    char tail[8];
    file_.seekg(size - 8);
    file_.read(tail, 8);
    if (std::memcmp(head, "PAR1", 4) != 0 || std::memcmp(tail + 4, "PAR1", 4) != 0) {
      bad_file("bad magic in " + name_);
    }
    uint32_t meta_len = 0;
    for (int k = 0; k < 4; ++k) {
      meta_len |= static_cast<uint32_t>(static_cast<uint8_t>(tail[k])) << (8 * k);
    }
    if (static_cast<int64_t>(meta_len) + 12 > size) bad_file("metadata length out of range");
    std::string meta_buf(meta_len, '\0');
    file_.seekg(size - 8 - static_cast<int64_t>(meta_len));
    file_.read(meta_buf.data(), meta_len);
    if (!file_) bad_file("metadata read failed");
    meta_ = parse_file_meta(reinterpret_cast<const uint8_t*>(meta_buf.data()), meta_len);

    if (meta_.schema.empty()) bad_file("empty schema");
    size_t leaf_at = 1;  // element 0 is the root
    for (; leaf_at < meta_.schema.size(); ++leaf_at) {
      const SchemaElement& elem = meta_.schema[leaf_at];
      if (elem.num_children > 0) bad_file("nested schemas unsupported");
      fields_.push_back(elem);
    }
  }

  Status next(DocumentInput& doc, std::string& record_ref, std::string& error) override {
    while (row_in_group_ >= group_rows_) {
      if (group_at_ >= meta_.row_groups.size()) return Status::kEnd;
      load_group(meta_.row_groups[group_at_++]);
    }
    size_t row = row_in_group_++;
    ++row_counter_;
    record_ref = name_ + ":" + std::to_string(row_counter_);

    auto cell = [&](const char* column) -> std::optional<std::string> {
      auto it = columns_.find(column);
      if (it == columns_.end() || row >= it->second.size()) return std::nullopt;
      return it->second[row];
    };
    std::optional<std::string> text = cell("text");
    if (!text) {
      error = "null or missing 'text' value";
      return Status::kBadRecord;
    }
    doc = DocumentInput{};
    doc.text = std::move(*text);
    doc.external_id = cell("id").value_or("");
    doc.source = cell("source").value_or("");
    doc.language = cell("language").value_or("");
    doc.url = cell("url").value_or("");
    if (!doc.external_id.empty()) record_ref = doc.external_id;
    return Status::kDoc;
  }

  std::string name() const override { return name_; }

 private:
  void load_group(const RowGroupMeta& group) {
    columns_.clear();
    group_rows_ = static_cast<size_t>(group.num_rows);
    row_in_group_ = 0;
    for (const ColumnMeta& column : group.columns) {
      if (column.path.size() != 1 || column.type != kTypeByteArray) continue;
      const std::string& column_name = column.path[0];
      static constexpr const char* kWanted[] = {"id", "text", "source", "language", "url"};
      bool interesting = false;
      for (const char* name : kWanted) interesting = interesting || column_name == name;
      if (!interesting) continue;

      uint32_t max_def = 0;
      for (const SchemaElement& field : fields_) {
        if (field.name == column_name && field.repetition == 1) max_def = 1;
        if (field.name == column_name && field.repetition == 2) {
          bad_file("repeated fields unsupported");
        }
      }
      ColumnChunkDecoder decoder(file_, column, max_def);
      columns_[column_name] = decoder.decode();
    }
  }

  std::ifstream file_;
  std::string name_;
  FileMeta meta_;
  std::vector<SchemaElement> fields_;
  std::map<std::string, OptionalStrings> columns_;
  size_t group_at_ = 0;
  size_t group_rows_ = 0;
  size_t row_in_group_ = 0;
  uint64_t row_counter_ = 0;
};

}  // namespace

std::unique_ptr<DocumentSource> open_parquet_source(const std::filesystem::path& path) {
  return std::make_unique<ParquetSource>(path);
}

}  // namespace fts::bulk
