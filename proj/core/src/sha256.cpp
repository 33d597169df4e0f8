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

#include "ftsearch/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace fts {

Sha256Digest content_hash(std::string_view text) {
  Sha256Digest digest{};
  unsigned int out_len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &out_len,
                 EVP_sha256(), nullptr) != 1 ||
      out_len != digest.size()) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return digest;
}

std::string to_hex(const Sha256Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (uint8_t byte : digest) {
    out.push_back(kHex[byte >> 4]);
    out.push_back(kHex[byte & 0x0F]);
  }
  return out;
}

}  // namespace fts
