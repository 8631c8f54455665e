// Copyright 2026 The texcorpus Authors.
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

// String and LaTeX scanning primitives shared by every pipeline stage.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace texcorpus {
namespace text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
inline bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

inline char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline bool starts_with_at(std::string_view s, std::size_t pos, std::string_view lit) {
  return pos <= s.size() && s.substr(pos).starts_with(lit);
}

// Runs of whitespace become one space; leading/trailing whitespace is dropped.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) words.push_back(s.substr(b, i - b));
  }
  return words;
}

inline std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// ---------------------------------------------------------------------------
// UTF-8

inline bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
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

inline std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 8);
  for (char c : s) append_utf8(out, static_cast<unsigned char>(c));
  return out;
}

// Source files are UTF-8; anything that fails validation is read as Latin-1.
inline std::string decode_source(std::string_view bytes, bool* used_fallback = nullptr) {
  bool ok = is_valid_utf8(bytes);
  if (used_fallback != nullptr) *used_fallback = !ok;
  return ok ? std::string(bytes) : latin1_to_utf8(bytes);
}

// Decodes to code points; the input must be valid UTF-8.
inline std::u32string to_code_points(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else if (c >= 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if (c >= 0xC0) {
      cp = c & 0x1F;
      len = 2;
    }
    for (std::size_t k = 1; k < len && i + k < s.size(); ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    out.push_back(static_cast<char32_t>(cp));
    i += len;
  }
  return out;
}

// Maps common Latin-1 / Latin Extended-A letters to their unaccented base.
inline char32_t fold_diacritic(char32_t cp) {
  static constexpr std::string_view kLatin1 =
      "AAAAAAACEEEEIIIIDNOOOOOxOUUUUYTsaaaaaaaceeeeiiiidnooooo/ouuuuyty";
  if (cp >= 0xC0 && cp <= 0xFF) {
    char base = kLatin1[cp - 0xC0];
    if (base != 'x' && base != '/') return static_cast<char32_t>(base);
    return cp;
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    static constexpr std::string_view kExtA =
        "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIiJjJjKkkLlLlLlLlLlNnNnNnnNnOoOoOoOoRrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";
    return static_cast<char32_t>(kExtA[cp - 0x100]);
  }
  return cp;
}

}  // namespace text

namespace tex {

// Letters for control-word purposes; '@' is treated as a letter throughout.
inline bool is_letter(char c) { return text::is_alpha(c) || c == '@'; }

struct ControlSequence {
  std::size_t begin = 0;  // position of the backslash
  std::size_t end = 0;    // one past the last character of the name
  std::string_view name;  // without the backslash
};

// `pos` must point at a backslash. Control words take the maximal run of
// letters; anything else is a one-character control symbol.
inline ControlSequence read_control_sequence(std::string_view s, std::size_t pos) {
  ControlSequence cs;
  cs.begin = pos;
  std::size_t i = pos + 1;
  if (i >= s.size()) {
    cs.end = i > s.size() ? s.size() : i;
    return cs;
  }
  if (is_letter(s[i])) {
    while (i < s.size() && is_letter(s[i])) ++i;
  } else {
    ++i;
  }
  cs.end = i;
  cs.name = s.substr(pos + 1, i - pos - 1);
  return cs;
}

inline std::size_t skip_spaces(std::string_view s, std::size_t pos) {
  while (pos < s.size() && text::is_space(s[pos])) ++pos;
  return pos;
}

// Returns the index of the '}' matching the '{' at `open`.
inline std::optional<std::size_t> find_matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      ++i;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

// Returns the index of the ']' closing the '[' at `open`, ignoring brackets
// nested in braces.
inline std::optional<std::size_t> find_matching_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open + 1; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      ++i;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
    } else if (c == ']' && depth <= 0) {
      return i;
    }
  }
  return std::nullopt;
}

struct Group {
  std::size_t content_begin = 0;
  std::size_t content_end = 0;
  std::size_t end = 0;  // one past the closing delimiter

  std::string_view content(std::string_view s) const {
    return s.substr(content_begin, content_end - content_begin);
  }
};

// Reads `{...}` after optional whitespace.
inline std::optional<Group> read_brace_group(std::string_view s, std::size_t pos) {
  pos = skip_spaces(s, pos);
  if (pos >= s.size() || s[pos] != '{') return std::nullopt;
  auto close = find_matching_brace(s, pos);
  if (!close) return std::nullopt;
  return Group{pos + 1, *close, *close + 1};
}

// Reads `[...]` after optional whitespace.
inline std::optional<Group> read_bracket_group(std::string_view s, std::size_t pos) {
  pos = skip_spaces(s, pos);
  if (pos >= s.size() || s[pos] != '[') return std::nullopt;
  auto close = find_matching_bracket(s, pos);
  if (!close) return std::nullopt;
  return Group{pos + 1, *close, *close + 1};
}

inline constexpr std::array<std::string_view, 8> kVerbatimEnvironments = {
    "verbatim", "verbatim*", "Verbatim", "Verbatim*", "lstlisting", "minted", "BVerbatim", "comment"};

inline bool is_verbatim_environment(std::string_view name) {
  return std::find(kVerbatimEnvironments.begin(), kVerbatimEnvironments.end(), name) !=
         kVerbatimEnvironments.end();
}

struct EnvMarker {
  std::string_view name;
  std::size_t end = 0;  // one past the closing brace of the marker
};

// Recognizes `\begin{name}` (or `\end{name}` when `keyword` is "end") at pos.
inline std::optional<EnvMarker> read_env_marker(std::string_view s, std::size_t pos,
                                                std::string_view keyword) {
  if (pos >= s.size() || s[pos] != '\\') return std::nullopt;
  auto cs = read_control_sequence(s, pos);
  if (cs.name != keyword) return std::nullopt;
  std::size_t i = skip_spaces(s, cs.end);
  if (i >= s.size() || s[i] != '{') return std::nullopt;
  std::size_t close = s.find('}', i + 1);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view name = s.substr(i + 1, close - i - 1);
  if (name.empty() || name.find_first_of("{\\\n") != std::string_view::npos) return std::nullopt;
  return EnvMarker{name, close + 1};
}

// If a verbatim span (verbatim-like environment or inline \verb) starts at
// `pos`, returns one past its end. An unterminated verbatim environment runs
// to the end of the text; an unterminated \verb is not a verbatim span.
inline std::optional<std::size_t> verbatim_span_end(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || s[pos] != '\\') return std::nullopt;
  if (auto m = read_env_marker(s, pos, "begin"); m && is_verbatim_environment(m->name)) {
    std::string closing = "\\end{" + std::string(m->name) + "}";
    std::size_t e = s.find(closing, m->end);
    return e == std::string_view::npos ? s.size() : e + closing.size();
  }
  auto cs = read_control_sequence(s, pos);
  if (cs.name == "verb") {
    std::size_t i = cs.end;
    if (i < s.size() && s[i] == '*') ++i;
    if (i >= s.size()) return std::nullopt;
    char delim = s[i];
    if (is_letter(delim) || text::is_space(delim)) return std::nullopt;
    for (std::size_t k = i + 1; k < s.size() && s[k] != '\n'; ++k) {
      if (s[k] == delim) return k + 1;
    }
  }
  return std::nullopt;
}

// The position of the next unescaped `needle` character, skipping verbatim.
inline std::size_t find_unescaped(std::string_view s, char needle, std::size_t pos = 0) {
  for (std::size_t i = pos; i < s.size(); ++i) {
    if (s[i] == '\\') {
      if (auto v = verbatim_span_end(s, i)) {
        i = *v - 1;
        continue;
      }
      ++i;
      continue;
    }
    if (s[i] == needle) return i;
  }
  return std::string_view::npos;
}

}  // namespace tex
}  // namespace texcorpus
