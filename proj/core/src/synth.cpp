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

#include "ftsearch/synth.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "ftsearch/error.hpp"

namespace fts::synth {

namespace {

constexpr const char* kCommonWords[] = {
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was",
    "with", "be", "by", "on", "not", "he", "this", "are", "or", "his", "from",
    "at", "which", "but", "have", "an", "had", "they", "you", "were", "their",
    "one", "all", "we", "can", "her", "has", "there", "been", "if", "more",
    "when", "will", "would", "who", "so", "no", "she", "other", "its", "may",
    "these", "what", "them", "than", "some", "him", "time", "into", "only",
    "could", "new", "then", "do", "any", "such", "first", "water", "people",
    "over", "work", "world", "after", "make", "years", "also", "life", "two",
    "day", "part", "between", "many", "being", "through", "where", "because",
    "under", "most", "both", "before", "house", "about", "those", "same",
    "during", "year", "while", "system", "place", "each", "right", "state",
    "used", "found", "small", "large", "great", "every", "different", "name",
    "school", "still", "should", "home", "good", "much", "change", "power",
    "country", "order", "point", "given", "well", "even", "number", "city",
    "science", "group", "study", "often", "high", "early", "form", "land",
    "light", "story", "energy", "climate", "action", "data", "model", "field",
    "level", "value", "result", "line", "word", "language", "example", "case",
    "river", "music", "history", "common", "area", "known", "several", "until",
    "along", "around", "against", "become", "within", "without", "important",
    "process", "development", "information", "research", "report", "public",
};

constexpr const char* kOnsets[] = {"b", "br", "c", "ch", "d", "dr", "f", "fl",
                                   "g", "gr", "h", "j", "k", "l", "m", "n",
                                   "p", "pl", "pr", "qu", "r", "s", "sh", "st",
                                   "t", "th", "tr", "v", "w"};
constexpr const char* kNuclei[] = {"a", "e", "i", "o", "u", "ai", "ea", "ou", "oo"};
constexpr const char* kCodas[] = {"", "n", "r", "s", "t", "l", "nd", "st", "ck", "m"};

}  // namespace

std::vector<std::string> make_vocabulary(uint32_t size, uint64_t seed) {
  if (size == 0) throw_error(ErrorCode::kInvalidConfig, "vocabulary must be >= 1");
  std::vector<std::string> words;
  words.reserve(size);
  for (const char* word : kCommonWords) {
    if (words.size() >= size) break;
    words.emplace_back(word);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> onset(0, std::size(kOnsets) - 1);
  std::uniform_int_distribution<size_t> nucleus(0, std::size(kNuclei) - 1);
  std::uniform_int_distribution<size_t> coda(0, std::size(kCodas) - 1);
  std::uniform_int_distribution<int> syllables(2, 3);
  while (words.size() < size) {
    std::string word;
    int n = syllables(rng);
    for (int s = 0; s < n; ++s) {
      word += kOnsets[onset(rng)];
      word += kNuclei[nucleus(rng)];
      word += kCodas[coda(rng)];
    }
    words.push_back(std::move(word));
  }
  return words;
}

namespace {

class DocGenerator {
 public:
  explicit DocGenerator(const CorpusSpec& spec)
      : spec_(spec), rng_(spec.seed), vocabulary_(make_vocabulary(spec.vocabulary, spec.seed)) {
    if (spec.words_min == 0 || spec.words_max < spec.words_min) {
      throw_error(ErrorCode::kInvalidConfig, "invalid words_min/words_max");
    }
    if (spec.languages.empty() || spec.replicate == 0) {
      throw_error(ErrorCode::kInvalidConfig, "languages and replicate must be non-empty");
    }
    // Zipf-ish rank weights with a flattening offset.
    std::vector<double> weights(vocabulary_.size());
    for (size_t i = 0; i < weights.size(); ++i) {
      weights[i] = 1.0 / static_cast<double>(i + 3);
    }
    pick_word_ = std::discrete_distribution<size_t>(weights.begin(), weights.end());
    pick_len_ = std::uniform_int_distribution<uint32_t>(spec.words_min, spec.words_max);
  }

  /// Emits all documents (including replicas) through `sink`.
  template <typename Sink>
  void generate(Sink&& sink) {
    char id[64];
    for (uint64_t d = 0; d < spec_.docs; ++d) {
      uint32_t words = pick_len_(rng_);
      std::string text;
      text.reserve(words * 7);
      for (uint32_t w = 0; w < words; ++w) {
        if (w > 0) text.push_back(' ');
        text += vocabulary_[pick_word_(rng_)];
      }
      const std::string& language = spec_.languages[d % spec_.languages.size()];
      for (uint32_t copy = 0; copy < spec_.replicate; ++copy) {
        DocumentInput doc;
        if (spec_.replicate == 1) {
          std::snprintf(id, sizeof(id), "%s-%08llu", spec_.id_prefix.c_str(),
                        static_cast<unsigned long long>(d));
        } else {
          std::snprintf(id, sizeof(id), "%s-%08llu-r%u", spec_.id_prefix.c_str(),
                        static_cast<unsigned long long>(d), copy);
        }
        doc.external_id = id;
        doc.text = text;
        doc.source = "synthetic";
        doc.language = language;
        sink(std::move(doc));
      }
    }
  }

 private:
  const CorpusSpec& spec_;
  std::mt19937_64 rng_;
  std::vector<std::string> vocabulary_;
  std::discrete_distribution<size_t> pick_word_;
  std::uniform_int_distribution<uint32_t> pick_len_;
};

}  // namespace

std::vector<DocumentInput> generate_corpus(const CorpusSpec& spec) {
  std::vector<DocumentInput> docs;
  docs.reserve(spec.docs * spec.replicate);
  DocGenerator generator(spec);
  generator.generate([&docs](DocumentInput doc) { docs.push_back(std::move(doc)); });
  return docs;
}

uint64_t write_corpus_jsonl(const CorpusSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kIoFailure, "cannot create " + path.string());
  uint64_t written = 0;
  DocGenerator generator(spec);
  generator.generate([&](DocumentInput doc) {
    nlohmann::json line = {{"id", doc.external_id},
                           {"text", doc.text},
                           {"source", doc.source},
                           {"language", doc.language}};
    out << line.dump() << '\n';
    ++written;
  });
  out.flush();
  if (!out) throw_error(ErrorCode::kIoFailure, "write failed for " + path.string());
  return written;
}

}  // namespace fts::synth
