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

#include <doctest.h>

#include <random>

#include "ftsearch/analysis.hpp"
#include "ftsearch/error.hpp"

using namespace fts;
using namespace fts::analysis;

namespace {

std::vector<std::string> terms_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.term);
  return out;
}

std::string join_terms(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.term;
  }
  return out;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("strip_html removes tags") {
  CHECK(strip_html("<p>Hello <b>world</b></p>") == "Hello world");
  CHECK(strip_html("no tags here") == "no tags here");
  CHECK(strip_html("<script>var x=1;</script>text &amp; more") == "text & more");
}

TEST_CASE("strip_html drops style content and decodes entities") {
  CHECK(strip_html("<style>p{color:red}</style>visible") == "visible");
  CHECK(strip_html("a &lt;tag&gt; &quot;x&quot; &#65;&#x42;") == "a <tag> \"x\" AB");
  CHECK(strip_html("a&nbsp;b") == "a b");
  CHECK(strip_html("5 &undefined; 6") == "5 &undefined; 6");
}

TEST_CASE("strip_html separates text across tag boundaries") {
  CHECK(strip_html("<p>a</p><p>b</p>") == "a b");
  CHECK(strip_html("<div><span>x</span>y</div>") == "x y");
}

TEST_CASE("strip_html tolerates malformed markup") {
  CHECK(strip_html("abc <unclosed") == "abc");
  CHECK(strip_html("a < b") == "a < b");  // lone '<' is text
  CHECK(strip_html("<script>never closed") == "");
  CHECK(strip_html("<!-- comment -->x<!-- open") == "x");
  CHECK(strip_html("<a href=\"x>y\">z</a>") == "z");  // '>' inside quoted attr
}

TEST_CASE("strip_html output never retains a well-formed input tag") {
  const char* inputs[] = {
      "<p>a</p>", "x<br/>y", "<div class='c'>t</div>", "<B>bold</B>",
      "<a href=\"u\">l</a>n<i>m</i>",
  };
  for (const char* input : inputs) {
    std::string out = strip_html(input);
    CHECK(out.find('<') == std::string::npos);
  }
}

TEST_CASE("tokenize splits words and drops punctuation") {
  auto tokens = tokenize("Hello, world!");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].term == "Hello");
  CHECK(tokens[0].position == 0);
  CHECK(tokens[1].term == "world");
  CHECK(tokens[1].position == 1);

  CHECK(tokenize("").empty());

  auto four = tokenize("climate action and change");
  REQUIRE(four.size() == 4);
  for (uint32_t i = 0; i < 4; ++i) CHECK(four[i].position == i);
}

TEST_CASE("tokenize keeps medial punctuation inside words") {
  CHECK(terms_of(tokenize("don't stop")) == std::vector<std::string>{"don't", "stop"});
  CHECK(terms_of(tokenize("3.14 and 1,000")) == std::vector<std::string>{"3.14", "and", "1,000"});
  CHECK(terms_of(tokenize("a:b c: d")) == std::vector<std::string>{"a:b", "c", "d"});
  CHECK(terms_of(tokenize("end.")) == std::vector<std::string>{"end"});
  CHECK(terms_of(tokenize("foo_bar")) == std::vector<std::string>{"foo_bar"});
}

TEST_CASE("tokenize spans reference the input bytes") {
  std::string text = "ab cd";
  auto tokens = tokenize(text);
  REQUIRE(tokens.size() == 2);
  CHECK(text.substr(tokens[0].span_begin, tokens[0].span_end - tokens[0].span_begin) == "ab");
  CHECK(text.substr(tokens[1].span_begin, tokens[1].span_end - tokens[1].span_begin) == "cd");
}

TEST_CASE("ascii_fold maps Latin diacritics only") {
  CHECK(ascii_fold("café") == "cafe");
  CHECK(ascii_fold("zürich") == "zurich");
  CHECK(ascii_fold("ไทย") == "ไทย");           // Thai passes through
  CHECK(ascii_fold("αβγ") == "αβγ");           // Greek passes through
  CHECK(ascii_fold("Москва") == "Москва");     // Cyrillic passes through
  CHECK(ascii_fold("œuvre") == "oeuvre");
  CHECK(ascii_fold("straße") == "strasse");
  CHECK(ascii_fold("café") == "cafe");   // decomposed form
}

TEST_CASE("lowercase handles ASCII and beyond") {
  CHECK(lowercase("HELLO") == "hello");
  CHECK(lowercase("Zürich") == "zürich");
  CHECK(lowercase("ΣΙΓΜΑ") == "σιγμα");
}

TEST_CASE("analyze composes the web content chain") {
  auto config = AnalyzerConfig::web_content();
  auto tokens = analyze("<b>Café au lait</b>", config);
  CHECK(terms_of(tokens) == std::vector<std::string>{"cafe", "au", "lait"});

  auto two = analyze("Climate Change", config);
  CHECK(terms_of(two) == std::vector<std::string>{"climate", "change"});
}

TEST_CASE("analyze span offsets point into the raw pre-strip text") {
  auto config = AnalyzerConfig::web_content();
  std::string raw = "<b>Hello</b> world";
  auto tokens = analyze(raw, config);
  REQUIRE(tokens.size() == 2);
  CHECK(raw.substr(tokens[0].span_begin, tokens[0].span_end - tokens[0].span_begin) == "Hello");
  CHECK(raw.substr(tokens[1].span_begin, tokens[1].span_end - tokens[1].span_begin) == "world");
}

TEST_CASE("analyze positions are dense after empty-term drops") {
  auto config = AnalyzerConfig::web_content();
  // A standalone combining acute accent tokenizes as a word character run
  // and folds to nothing.
  auto tokens = analyze("x ́ y", config);
  CHECK(terms_of(tokens) == std::vector<std::string>{"x", "y"});
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].position == 0);
  CHECK(tokens[1].position == 1);
}

TEST_CASE("analyze is idempotent on its own output") {
  auto config = AnalyzerConfig::web_content();
  const char* samples[] = {
      "<p>Hello <b>World</b>!</p>",
      "Don't fold CAFÉ twice",
      "l'été à Zürich coûte 3.14",
      "mixed ไทย and English",
      "<script>drop()</script>keep this",
  };
  for (const char* sample : samples) {
    auto first = analyze(sample, config);
    auto second = analyze(join_terms(first), config);
    CHECK(terms_of(first) == terms_of(second));
  }
}

TEST_CASE("analyze idempotence and density hold for random corpora") {
  std::mt19937_64 rng(20260809);
  const char* fragments[] = {"Héllo", "WORLD", "<b>", "</b>", "don't", "3.14",
                             "ไทย", "café", "&amp;", "x", "<p>", "</p>", "…", "—"};
  auto config = AnalyzerConfig::web_content();
  std::uniform_int_distribution<size_t> pick(0, std::size(fragments) - 1);
  std::uniform_int_distribution<int> len(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
      text += fragments[pick(rng)];
      text.push_back(' ');
    }
    auto tokens = analyze(text, config);
    for (uint32_t i = 0; i < tokens.size(); ++i) {
      CHECK(tokens[i].position == i);
      CHECK(!tokens[i].term.empty());
    }
    auto again = analyze(join_terms(tokens), config);
    CHECK(terms_of(tokens) == terms_of(again));
  }
}

TEST_CASE("analyzer config validation") {
  AnalyzerConfig no_tokenize{{Stage::kHtmlStrip, Stage::kLowercase}};
  CHECK_THROWS_AS(no_tokenize.validate(), Error);

  AnalyzerConfig strip_after{{Stage::kTokenize, Stage::kHtmlStrip}};
  CHECK_THROWS_AS(strip_after.validate(), Error);

  AnalyzerConfig lower_before{{Stage::kLowercase, Stage::kTokenize}};
  CHECK_THROWS_AS(lower_before.validate(), Error);

  AnalyzerConfig duplicate{{Stage::kTokenize, Stage::kLowercase, Stage::kLowercase}};
  CHECK_THROWS_AS(duplicate.validate(), Error);

  CHECK_NOTHROW(AnalyzerConfig::web_content().validate());
  AnalyzerConfig bare{{Stage::kTokenize}};
  CHECK_NOTHROW(bare.validate());
  CHECK(terms_of(analyze("Mixed CASE", bare)) == std::vector<std::string>{"Mixed", "CASE"});
}

TEST_CASE("stage name round-trip") {
  auto config = AnalyzerConfig::web_content();
  auto names = config.stage_names();
  CHECK(names == std::vector<std::string>{"html_strip", "tokenize", "lowercase", "ascii_fold"});
  auto back = AnalyzerConfig::from_stage_names(names);
  CHECK(back.stages == config.stages);
  CHECK_THROWS_AS(AnalyzerConfig::from_stage_names({"tokenize", "stemmer"}), Error);
}

TEST_CASE("utf8 validation") {
  CHECK(is_valid_utf8("plain ascii"));
  CHECK(is_valid_utf8("καλημέρα κόσμε"));
  CHECK(is_valid_utf8("\xF0\x9F\x98\x80"));      // 4-byte emoji
  CHECK(is_valid_utf8("\xEF\xBF\xBD"));          // encoded U+FFFD is fine
  CHECK_FALSE(is_valid_utf8("\xC0\xAF"));        // overlong
  CHECK_FALSE(is_valid_utf8("\xE2\x82"));        // truncated
  CHECK_FALSE(is_valid_utf8("\xED\xA0\x80"));    // surrogate
  CHECK_FALSE(is_valid_utf8("ok\xFFtail"));      // stray byte
}

}  // TEST_SUITE
