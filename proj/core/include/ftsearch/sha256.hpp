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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace fts {

using Sha256Digest = std::array<uint8_t, 32>;

/// SHA-256 over the UTF-8 bytes of `text`.
Sha256Digest content_hash(std::string_view text);

std::string to_hex(const Sha256Digest& digest);

struct Sha256DigestHash {
  size_t operator()(const Sha256Digest& digest) const noexcept {
    uint64_t v;
    static_assert(sizeof(v) <= sizeof(Sha256Digest));
    __builtin_memcpy(&v, digest.data(), sizeof(v));
    return static_cast<size_t>(v);
  }
};

}  // namespace fts
