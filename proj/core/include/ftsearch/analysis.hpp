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
#include <string>
#include <string_view>
#include <vector>

namespace fts::analysis {

/// One analyzed term. `position` is the 0-based token ordinal; `span_begin`
/// and `span_end` are byte offsets into the text handed to analyze(), i.e.
/// the pre-strip source when the chain starts with html_strip.
struct Token {
  std::string term;
  uint32_t position = 0;
  uint32_t span_begin = 0;
  uint32_t span_end = 0;

  bool operator==(const Token&) const = default;
};

enum class Stage {
  kHtmlStrip,
  kTokenize,
  kLowercase,
  kAsciiFold,
};

/// Ordered stage chain. Exactly one tokenize stage; text->text stages
/// (html_strip) come before it, term->term stages (lowercase, ascii_fold)
/// after it.
struct AnalyzerConfig {
  std::vector<Stage> stages;

  /// html_strip, tokenize, lowercase, ascii_fold.
  static AnalyzerConfig web_content();

  /// Throws InvalidConfig if the chain violates the ordering rules.
  void validate() const;

  bool has_stage(Stage stage) const;

  std::vector<std::string> stage_names() const;
  static AnalyzerConfig from_stage_names(const std::vector<std::string>& names);
};

/// Removes tags, drops script/style element contents, decodes character
/// entities, and collapses whitespace runs. Malformed markup never fails:
/// an unclosed tag is consumed to the end of the input.
std::string strip_html(std::string_view raw);

/// Splits plain text on word boundaries; punctuation is not a token.
/// Positions are assigned 0,1,2,... and spans index into `text`.
std::vector<Token> tokenize(std::string_view text);

/// Lowercases one term (full Unicode simple mappings).
std::string lowercase(std::string_view term);

/// Folds Latin-script letters with diacritics to plain ASCII; other scripts
/// pass through unchanged.
std::string ascii_fold(std::string_view term);

/// Runs the configured chain. Token spans always reference `raw`. Terms that
/// come out empty are dropped and the remaining tokens renumbered so output
/// positions are exactly 0..n-1.
std::vector<Token> analyze(std::string_view raw, const AnalyzerConfig& config);

/// Returns true when `text` is well-formed UTF-8.
bool is_valid_utf8(std::string_view text);

}  // namespace fts::analysis
