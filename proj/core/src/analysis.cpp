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

#include "ftsearch/analysis.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "ftsearch/error.hpp"

namespace fts::analysis {

namespace {

#include "unicode_tables.inc"

constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes one codepoint; returns bytes consumed. Malformed sequences decode
// to U+FFFD one byte at a time.
size_t decode_utf8(const char* data, size_t size, char32_t& cp) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  unsigned char b0 = bytes[0];
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  size_t len = 0;
  char32_t value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    cp = kReplacementChar;
    return 1;
  }
  if (len > size) {
    cp = kReplacementChar;
    return 1;
  }
  for (size_t i = 1; i < len; ++i) {
    if ((bytes[i] & 0xC0) != 0x80) {
      cp = kReplacementChar;
      return 1;
    }
    value = (value << 6) | (bytes[i] & 0x3F);
  }
  static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (value < kMinByLen[len] || value > 0x10FFFF ||
      (value >= 0xD800 && value <= 0xDFFF)) {
    cp = kReplacementChar;
    return 1;
  }
  cp = value;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

template <size_t N>
bool in_ranges(const CodepointRange (&ranges)[N], char32_t cp) {
  auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                             [](char32_t v, const CodepointRange& r) { return v < r.lo; });
  return it != std::begin(ranges) && cp <= (it - 1)->hi;
}

bool is_word_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= 'a' && cp <= 'z');
  }
  return in_ranges(kWordCharRanges, cp);
}

bool is_digit_cp(char32_t cp) {
  if (cp < 0x80) return cp >= '0' && cp <= '9';
  return in_ranges(kDigitRanges, cp);
}

bool is_ideograph_cp(char32_t cp) {
  if (cp < 0x2E80) return false;
  return in_ranges(kIdeographRanges, cp);
}

bool is_generic_mark(char32_t cp) {
  if (cp < 0x300) return false;
  return in_ranges(kGenericMarkRanges, cp);
}

// Medial punctuation kept inside a token when flanked by word characters of
// the matching class, approximating default word-boundary rules: apostrophes,
// full stop, colon and middle dot between letters; full stop and comma
// between digits.
bool is_mid_letter(char32_t cp) {
  return cp == U'\'' || cp == 0x2019 || cp == U'.' || cp == U':' || cp == 0xB7;
}

bool is_mid_digit(char32_t cp) {
  return cp == U'.' || cp == U',';
}

const CaseMapping* find_lower(char32_t cp) {
  auto it = std::lower_bound(std::begin(kLowerMap), std::end(kLowerMap), cp,
                             [](const CaseMapping& m, char32_t v) { return m.cp < v; });
  if (it != std::end(kLowerMap) && it->cp == cp) return &*it;
  return nullptr;
}

const FoldMapping* find_fold(char32_t cp) {
  auto it = std::lower_bound(std::begin(kAsciiFoldMap), std::end(kAsciiFoldMap), cp,
                             [](const FoldMapping& m, char32_t v) { return m.cp < v; });
  if (it != std::end(kAsciiFoldMap) && it->cp == cp) return &*it;
  return nullptr;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool ascii_iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char ca = a[i], cb = b[i];
    if (ca >= 'A' && ca <= 'Z') ca += 32;
    if (cb >= 'A' && cb <= 'Z') cb += 32;
    if (ca != cb) return false;
  }
  return true;
}

struct StrippedText {
  std::string text;
  // Per output byte: the raw byte range it was produced from.
  std::vector<uint32_t> src_begin;
  std::vector<uint32_t> src_end;
};

// Decodes the entity starting at raw[i] ('&'). On success appends the
// decoded character(s) and returns the raw length consumed; returns 0 when
// the sequence is not a recognizable entity.
size_t decode_entity(std::string_view raw, size_t i, std::string& decoded) {
  size_t semi = raw.find(';', i + 1);
  if (semi == std::string_view::npos || semi - i > 12) return 0;
  std::string_view body = raw.substr(i + 1, semi - i - 1);
  if (body.empty()) return 0;
  if (body[0] == '#') {
    char32_t cp = 0;
    bool ok = false;
    if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
      for (size_t k = 2; k < body.size(); ++k) {
        char c = body[k];
        int digit;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
        else return 0;
        cp = cp * 16 + digit;
        ok = true;
      }
    } else {
      for (size_t k = 1; k < body.size(); ++k) {
        char c = body[k];
        if (c < '0' || c > '9') return 0;
        cp = cp * 10 + (c - '0');
        ok = true;
      }
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    append_utf8(decoded, cp);
    return semi - i + 1;
  }
  static constexpr std::pair<std::string_view, std::string_view> kNamed[] = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"},
      {"quot", "\""}, {"apos", "'"}, {"nbsp", " "},
  };
  for (const auto& [name, value] : kNamed) {
    if (body == name) {
      decoded.append(value);
      return semi - i + 1;
    }
  }
  return 0;
}

// Consumes a tag starting at raw[i] ('<'). Returns one past the closing '>'
// (or raw.size() for an unclosed tag) and reports the tag name and whether
// it is a closing tag.
size_t consume_tag(std::string_view raw, size_t i, std::string& name, bool& closing) {
  size_t j = i + 1;
  closing = false;
  name.clear();
  if (j < raw.size() && raw[j] == '/') {
    closing = true;
    ++j;
  }
  if (j < raw.size() && (raw[j] == '!' || raw[j] == '?')) {
    if (raw.compare(j, 3, "!--") == 0) {
      size_t end = raw.find("-->", j + 3);
      return end == std::string_view::npos ? raw.size() : end + 3;
    }
    size_t end = raw.find('>', j);
    return end == std::string_view::npos ? raw.size() : end + 1;
  }
  while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) != 0)) {
    name.push_back(raw[j]);
    ++j;
  }
  char quote = 0;
  while (j < raw.size()) {
    char c = raw[j];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j + 1;
    }
    ++j;
  }
  return raw.size();
}

// Whether a '<' at raw[i] opens markup rather than literal text.
bool starts_tag(std::string_view raw, size_t i) {
  if (i + 1 >= raw.size()) return false;
  char c = raw[i + 1];
  return c == '/' || c == '!' || c == '?' ||
         (std::isalpha(static_cast<unsigned char>(c)) != 0);
}

StrippedText strip_html_mapped(std::string_view raw) {
  StrippedText out;
  out.text.reserve(raw.size());
  out.src_begin.reserve(raw.size());
  out.src_end.reserve(raw.size());
  bool pending_space = false;
  std::string tag_name;
  std::string decoded;

  auto emit = [&](std::string_view bytes, uint32_t begin, uint32_t end) {
    if (pending_space && !out.text.empty()) {
      out.text.push_back(' ');
      out.src_begin.push_back(begin);
      out.src_end.push_back(begin);
    }
    pending_space = false;
    for (size_t k = 0; k < bytes.size(); ++k) {
      out.text.push_back(bytes[k]);
      out.src_begin.push_back(begin);
      out.src_end.push_back(end);
    }
  };

  size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    if (c == '<' && starts_tag(raw, i)) {
      bool closing = false;
      size_t next = consume_tag(raw, i, tag_name, closing);
      if (!closing && (ascii_iequals(tag_name, "script") || ascii_iequals(tag_name, "style"))) {
        // Drop element content up to (and including) the matching close tag.
        size_t search = next;
        size_t content_end = raw.size();
        while (search < raw.size()) {
          size_t lt = raw.find('<', search);
          if (lt == std::string_view::npos) break;
          if (lt + 1 < raw.size() && raw[lt + 1] == '/') {
            std::string close_name;
            bool close_flag = false;
            size_t after = consume_tag(raw, lt, close_name, close_flag);
            if (ascii_iequals(close_name, tag_name)) {
              content_end = after;
              break;
            }
          }
          search = lt + 1;
        }
        next = content_end;
      }
      i = next;
      pending_space = true;
    } else if (c == '&') {
      decoded.clear();
      size_t consumed = decode_entity(raw, i, decoded);
      if (consumed > 0) {
        if (decoded == " ") {
          pending_space = true;
        } else {
          emit(decoded, static_cast<uint32_t>(i), static_cast<uint32_t>(i + consumed));
        }
        i += consumed;
      } else {
        emit(std::string_view(&raw[i], 1), static_cast<uint32_t>(i), static_cast<uint32_t>(i + 1));
        ++i;
      }
    } else if (is_ascii_space(c)) {
      pending_space = true;
      ++i;
    } else {
      // Copy one UTF-8 sequence verbatim, byte offsets preserved.
      char32_t cp;
      size_t len = decode_utf8(raw.data() + i, raw.size() - i, cp);
      if (pending_space && !out.text.empty()) {
        out.text.push_back(' ');
        out.src_begin.push_back(static_cast<uint32_t>(i));
        out.src_end.push_back(static_cast<uint32_t>(i));
      }
      pending_space = false;
      for (size_t k = 0; k < len; ++k) {
        out.text.push_back(raw[i + k]);
        out.src_begin.push_back(static_cast<uint32_t>(i + k));
        out.src_end.push_back(static_cast<uint32_t>(i + k + 1));
      }
      i += len;
    }
  }
  return out;
}

}  // namespace

AnalyzerConfig AnalyzerConfig::web_content() {
  return AnalyzerConfig{{Stage::kHtmlStrip, Stage::kTokenize, Stage::kLowercase, Stage::kAsciiFold}};
}

void AnalyzerConfig::validate() const {
  size_t tokenize_count = 0;
  size_t tokenize_at = 0;
  for (size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] == Stage::kTokenize) {
      ++tokenize_count;
      tokenize_at = i;
    }
  }
  if (tokenize_count != 1) {
    throw_error(ErrorCode::kInvalidConfig, "analyzer requires exactly one tokenize stage");
  }
  for (size_t i = 0; i < stages.size(); ++i) {
    Stage s = stages[i];
    if (s == Stage::kTokenize) continue;
    bool text_stage = s == Stage::kHtmlStrip;
    if (text_stage && i > tokenize_at) {
      throw_error(ErrorCode::kInvalidConfig, "html_strip must precede tokenize");
    }
    if (!text_stage && i < tokenize_at) {
      throw_error(ErrorCode::kInvalidConfig, "term filters must follow tokenize");
    }
    if (std::count(stages.begin(), stages.end(), s) != 1) {
      throw_error(ErrorCode::kInvalidConfig, "duplicate analyzer stage");
    }
  }
}

bool AnalyzerConfig::has_stage(Stage stage) const {
  return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

std::vector<std::string> AnalyzerConfig::stage_names() const {
  std::vector<std::string> names;
  names.reserve(stages.size());
  for (Stage s : stages) {
    switch (s) {
      case Stage::kHtmlStrip: names.emplace_back("html_strip"); break;
      case Stage::kTokenize: names.emplace_back("tokenize"); break;
      case Stage::kLowercase: names.emplace_back("lowercase"); break;
      case Stage::kAsciiFold: names.emplace_back("ascii_fold"); break;
    }
  }
  return names;
}

AnalyzerConfig AnalyzerConfig::from_stage_names(const std::vector<std::string>& names) {
  AnalyzerConfig config;
  for (const auto& name : names) {
    if (name == "html_strip") config.stages.push_back(Stage::kHtmlStrip);
    else if (name == "tokenize") config.stages.push_back(Stage::kTokenize);
    else if (name == "lowercase") config.stages.push_back(Stage::kLowercase);
    else if (name == "ascii_fold") config.stages.push_back(Stage::kAsciiFold);
    else throw_error(ErrorCode::kInvalidConfig, "unknown analyzer stage: " + name);
  }
  config.validate();
  return config;
}

std::string strip_html(std::string_view raw) {
  return strip_html_mapped(raw).text;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  uint32_t position = 0;
  const size_t n = text.size();

  auto classify_digit = [](char32_t cp) { return is_digit_cp(cp); };

  while (i < n) {
    char32_t cp;
    size_t len = decode_utf8(text.data() + i, n - i, cp);
    if (is_ideograph_cp(cp)) {
      tokens.push_back(Token{std::string(text.substr(i, len)), position++,
                             static_cast<uint32_t>(i), static_cast<uint32_t>(i + len)});
      i += len;
      continue;
    }
    if (!is_word_cp(cp) && cp != U'_') {
      i += len;
      continue;
    }
    size_t start = i;
    bool has_word = cp != U'_';
    bool prev_digit = classify_digit(cp);
    i += len;
    while (i < n) {
      char32_t cur;
      size_t cur_len = decode_utf8(text.data() + i, n - i, cur);
      if (is_ideograph_cp(cur)) break;
      if (is_word_cp(cur) || cur == U'_') {
        has_word = has_word || cur != U'_';
        if (cur != U'_') prev_digit = classify_digit(cur);
        i += cur_len;
        continue;
      }
      // Medial punctuation joins only when flanked by same-class word chars.
      bool candidate = prev_digit ? is_mid_digit(cur) : is_mid_letter(cur);
      if (candidate && i + cur_len < n) {
        char32_t following;
        size_t following_len = decode_utf8(text.data() + i + cur_len, n - i - cur_len, following);
        bool next_ok = prev_digit
                           ? is_digit_cp(following)
                           : (is_word_cp(following) && !is_digit_cp(following) &&
                              !is_ideograph_cp(following));
        if (next_ok) {
          prev_digit = classify_digit(following);
          i += cur_len + following_len;
          continue;
        }
      }
      break;
    }
    if (has_word) {
      tokens.push_back(Token{std::string(text.substr(start, i - start)), position++,
                             static_cast<uint32_t>(start), static_cast<uint32_t>(i)});
    }
  }
  return tokens;
}

std::string lowercase(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  size_t i = 0;
  while (i < term.size()) {
    unsigned char b = static_cast<unsigned char>(term[i]);
    if (b < 0x80) {
      out.push_back(b >= 'A' && b <= 'Z' ? static_cast<char>(b + 32) : static_cast<char>(b));
      ++i;
      continue;
    }
    char32_t cp;
    size_t len = decode_utf8(term.data() + i, term.size() - i, cp);
    if (const CaseMapping* m = find_lower(cp)) {
      for (unsigned k = 0; k < m->len; ++k) append_utf8(out, m->to[k]);
    } else {
      out.append(term.substr(i, len));
    }
    i += len;
  }
  return out;
}

std::string ascii_fold(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  size_t i = 0;
  while (i < term.size()) {
    unsigned char b = static_cast<unsigned char>(term[i]);
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
      ++i;
      continue;
    }
    char32_t cp;
    size_t len = decode_utf8(term.data() + i, term.size() - i, cp);
    if (const FoldMapping* m = find_fold(cp)) {
      out.append(m->to);
    } else if (!is_generic_mark(cp)) {
      out.append(term.substr(i, len));
    }
    i += len;
  }
  return out;
}

std::vector<Token> analyze(std::string_view raw, const AnalyzerConfig& config) {
  config.validate();

  std::vector<Token> tokens;
  if (config.has_stage(Stage::kHtmlStrip)) {
    StrippedText stripped = strip_html_mapped(raw);
    tokens = tokenize(stripped.text);
    for (Token& token : tokens) {
      uint32_t begin = stripped.src_begin[token.span_begin];
      uint32_t end = stripped.src_end[token.span_end - 1];
      token.span_begin = begin;
      token.span_end = end;
    }
  } else {
    tokens = tokenize(raw);
  }

  size_t tokenize_at = 0;
  for (size_t i = 0; i < config.stages.size(); ++i) {
    if (config.stages[i] == Stage::kTokenize) tokenize_at = i;
  }
  for (size_t i = tokenize_at + 1; i < config.stages.size(); ++i) {
    Stage stage = config.stages[i];
    for (Token& token : tokens) {
      if (stage == Stage::kLowercase) token.term = lowercase(token.term);
      else if (stage == Stage::kAsciiFold) token.term = ascii_fold(token.term);
    }
  }

  // Drop terms that filtered away to nothing and keep positions dense.
  std::vector<Token> result;
  result.reserve(tokens.size());
  uint32_t position = 0;
  for (Token& token : tokens) {
    if (token.term.empty()) continue;
    token.position = position++;
    result.push_back(std::move(token));
  }
  return result;
}

bool is_valid_utf8(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      ++i;
      continue;
    }
    char32_t cp;
    size_t len = decode_utf8(text.data() + i, text.size() - i, cp);
    if (cp == kReplacementChar && (len == 1 && b >= 0x80)) {
      // decode_utf8 only yields a 1-byte U+FFFD for malformed input.
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace fts::analysis
