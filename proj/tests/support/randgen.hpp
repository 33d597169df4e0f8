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

// Seeded corpus and query generators shared by unit tests and the
// acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "ftsearch/query.hpp"

namespace fts::testing {

class RandomQueries {
 public:
  RandomQueries(uint64_t seed, uint32_t vocab_size) : rng_(seed) {
    for (uint32_t i = 0; i < vocab_size; ++i) {
      vocab_.push_back("w" + std::to_string(i));
    }
  }

  std::mt19937_64& rng() { return rng_; }
  const std::vector<std::string>& vocab() const { return vocab_; }

  std::string random_text(uint32_t words_min, uint32_t words_max) {
    std::uniform_int_distribution<uint32_t> len(words_min, words_max);
    std::uniform_int_distribution<size_t> pick(0, vocab_.size() - 1);
    uint32_t n = len(rng_);
    std::string text;
    for (uint32_t i = 0; i < n; ++i) {
      if (i > 0) text.push_back(' ');
      text += vocab_[pick(rng_)];
    }
    return text;
  }

  query::MatchPhrase random_phrase(uint32_t len_min, uint32_t len_max, uint32_t slop_max) {
    std::uniform_int_distribution<uint32_t> len(len_min, len_max);
    std::uniform_int_distribution<uint32_t> slop(0, slop_max);
    query::MatchPhrase phrase;
    uint32_t n = len(rng_);
    phrase.text = random_text(n, n);
    phrase.slop = slop(rng_);
    return phrase;
  }

  query::Match random_match(uint32_t len_max = 3) {
    std::uniform_int_distribution<uint32_t> len(1, len_max);
    uint32_t n = len(rng_);
    return query::Match{"text", random_text(n, n)};
  }

  /// Mixed match / phrase / bool query.
  query::Ast random_mixed() {
    std::uniform_int_distribution<int> kind(0, 3);
    switch (kind(rng_)) {
      case 0:
        return query::Ast{random_match()};
      case 1:
      case 2:
        return query::Ast{random_phrase(1, 4, 3)};
      default: {
        query::Bool node;
        std::uniform_int_distribution<int> coin(0, 1);
        node.must.push_back(query::Ast{random_match(2)});
        if (coin(rng_) != 0) node.should.push_back(query::Ast{random_phrase(1, 2, 1)});
        if (coin(rng_) != 0) node.must_not.push_back(query::Ast{random_match(1)});
        if (!node.should.empty()) node.minimum_should_match = 1;
        return query::Ast{std::move(node)};
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> vocab_;
};

}  // namespace fts::testing
