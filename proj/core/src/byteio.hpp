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
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "ftsearch/error.hpp"

// Little-endian primitive and varint encoding shared by the on-disk formats.

namespace fts::detail {

inline void put_u16(std::string& buf, uint16_t v) {
  char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  buf.append(bytes, 2);
}

inline void put_u32(std::string& buf, uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  buf.append(bytes, 4);
}

inline void put_u64(std::string& buf, uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  buf.append(bytes, 8);
}

inline void put_varint(std::string& buf, uint64_t v) {
  while (v >= 0x80) {
    buf.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  buf.push_back(static_cast<char>(v));
}

class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t size) : p_(data), end_(data + size) {}
  explicit ByteReader(std::string_view data)
      : ByteReader(reinterpret_cast<const uint8_t*>(data.data()), data.size()) {}

  size_t remaining() const { return static_cast<size_t>(end_ - p_); }
  const uint8_t* cursor() const { return p_; }

  uint16_t get_u16() {
    require(2);
    uint16_t v = static_cast<uint16_t>(p_[0]) | static_cast<uint16_t>(p_[1]) << 8;
    p_ += 2;
    return v;
  }

  uint32_t get_u32() {
    require(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p_[i]) << (8 * i);
    p_ += 4;
    return v;
  }

  uint64_t get_u64() {
    require(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p_[i]) << (8 * i);
    p_ += 8;
    return v;
  }

  uint64_t get_varint() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      require(1);
      uint8_t byte = *p_++;
      v |= static_cast<uint64_t>(byte & 0x7F) << shift;
      if ((byte & 0x80) == 0) return v;
      shift += 7;
      if (shift > 63) throw_error(ErrorCode::kCorrupt, "varint overflow");
    }
  }

  std::string_view get_bytes(size_t n) {
    require(n);
    std::string_view v(reinterpret_cast<const char*>(p_), n);
    p_ += n;
    return v;
  }

  void skip(size_t n) {
    require(n);
    p_ += n;
  }

 private:
  void require(size_t n) const {
    if (remaining() < n) throw_error(ErrorCode::kCorrupt, "truncated data");
  }

  const uint8_t* p_;
  const uint8_t* end_;
};

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view data);
void append_file(const std::filesystem::path& path, std::string_view data);

}  // namespace fts::detail
