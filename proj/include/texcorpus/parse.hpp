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

// Structural segmentation of normalized LaTeX: environment blocks, the
// section tree, paragraphs, sentences and citation markers.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texcorpus/error.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::parse {

// ---------------------------------------------------------------------------
// Environment blocks

struct EnvironmentBlock {
  std::string env_name;
  std::string body;
  std::vector<EnvironmentBlock> children;
  std::size_t begin = 0;       // offset of "\begin"
  std::size_t end = 0;         // one past "\end{name}"
  std::size_t body_begin = 0;  // offset of the first body character
  std::size_t body_end = 0;
  std::optional<std::string> label;
  std::optional<std::string> caption;
};

namespace detail {

// First `\name[..]{arg}` in `s` outside the masked ranges; returns the
// mandatory argument.
inline std::optional<std::string> find_command_argument(std::string_view s, std::string_view name,
                                                        const std::vector<std::pair<std::size_t, std::size_t>>& masked) {
  std::string needle = "\\" + std::string(name);
  for (std::size_t pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + 1)) {
    bool inside = std::any_of(masked.begin(), masked.end(),
                              [&](const auto& r) { return pos >= r.first && pos < r.second; });
    if (inside) continue;
    auto cs = tex::read_control_sequence(s, pos);
    if (cs.name != name) continue;
    std::size_t p = cs.end;
    if (p < s.size() && s[p] == '*') ++p;
    if (auto opt = tex::read_bracket_group(s, p)) p = opt->end;
    if (auto g = tex::read_brace_group(s, p)) return std::string(text::trim(g->content(s)));
  }
  return std::nullopt;
}

inline void attach_label_and_caption(EnvironmentBlock& b) {
  std::vector<std::pair<std::size_t, std::size_t>> masked;
  for (const auto& c : b.children) masked.emplace_back(c.begin - b.body_begin, c.end - b.body_begin);
  b.label = find_command_argument(b.body, "label", masked);
  b.caption = find_command_argument(b.body, "caption", masked);
}

}  // namespace detail

// Returns the top-level environment blocks of `source` with nesting resolved.
// Verbatim-like environments are leaves; their bodies are not scanned.
inline std::vector<EnvironmentBlock> extract_blocks(std::string_view source) {
  std::vector<EnvironmentBlock> top;
  std::vector<EnvironmentBlock> stack;
  std::size_t i = 0;
  while (i < source.size()) {
    if (source[i] != '\\') {
      std::size_t next = source.find('\\', i);
      i = next == std::string_view::npos ? source.size() : next;
      continue;
    }
    if (auto m = tex::read_env_marker(source, i, "begin")) {
      EnvironmentBlock b;
      b.env_name = std::string(m->name);
      b.begin = i;
      b.body_begin = m->end;
      if (tex::is_verbatim_environment(m->name)) {
        std::string closing = "\\end{" + b.env_name + "}";
        std::size_t e = source.find(closing, m->end);
        if (e == std::string_view::npos) {
          throw Error(ErrorCode::kUnbalancedEnvironment, "\\begin{" + b.env_name + "} is never closed");
        }
        b.body_end = e;
        b.end = e + closing.size();
        b.body = std::string(source.substr(b.body_begin, b.body_end - b.body_begin));
        detail::attach_label_and_caption(b);
        (stack.empty() ? top : stack.back().children).push_back(std::move(b));
        i = e + closing.size();
        continue;
      }
      stack.push_back(std::move(b));
      i = m->end;
      continue;
    }
    if (auto m = tex::read_env_marker(source, i, "end")) {
      if (stack.empty()) {
        throw Error(ErrorCode::kUnbalancedEnvironment, "\\end{" + std::string(m->name) + "} without \\begin");
      }
      if (stack.back().env_name != m->name) {
        throw Error(ErrorCode::kUnbalancedEnvironment,
                    "\\begin{" + stack.back().env_name + "} closed by \\end{" + std::string(m->name) + "}");
      }
      EnvironmentBlock b = std::move(stack.back());
      stack.pop_back();
      b.body_end = i;
      b.end = m->end;
      b.body = std::string(source.substr(b.body_begin, b.body_end - b.body_begin));
      detail::attach_label_and_caption(b);
      (stack.empty() ? top : stack.back().children).push_back(std::move(b));
      i = m->end;
      continue;
    }
    if (auto v = tex::verbatim_span_end(source, i)) {
      i = *v;
      continue;
    }
    i = tex::read_control_sequence(source, i).end;
  }
  if (!stack.empty()) {
    throw Error(ErrorCode::kUnbalancedEnvironment, "\\begin{" + stack.back().env_name + "} is never closed");
  }
  return top;
}

// ---------------------------------------------------------------------------
// Sentences

inline constexpr std::string_view kAbbreviationListVersion = "1";

// Tokens after which a period never ends a sentence. Single capital
// initials ("J.") are handled separately.
inline constexpr std::array<std::string_view, 46> kAbbreviations = {
    "al.",   "Fig.",  "Figs.", "fig.",   "figs.", "Eq.",   "Eqs.",    "eq.",   "eqs.",  "Eqn.",  "Eqns.", "i.e.",
    "e.g.",  "vs.",   "cf.",   "Cf.",    "Sec.",  "Secs.", "sec.",    "Tab.",  "tab.",  "Ref.",  "Refs.", "ref.",
    "Thm.",  "Def.",  "Alg.",  "Prop.",  "Lem.",  "Cor.",  "Dr.",     "Mr.",   "Mrs.",  "Ms.",   "Prof.", "No.",
    "no.",   "resp.", "approx.", "Ch.",  "Vol.",  "vol.",  "pp.",     "Jr.",   "St.",   "w.r.t."};

namespace detail {

inline bool is_abbreviation(std::string_view token) {
  while (!token.empty() && (token.front() == '(' || token.front() == '[' || token.front() == '"' ||
                            token.front() == '\'' || token.front() == '`')) {
    token.remove_prefix(1);
  }
  if (token.size() == 2 && text::is_upper(token[0]) && token[1] == '.') return true;
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end();
}

}  // namespace detail

// Rule-based splitting: a sentence ends at '.', '?' or '!' (plus closing
// quotes/brackets) followed by whitespace and an uppercase letter or digit.
// Never splits inside $..$ or <equation>..</equation>, or after an
// abbreviation.
inline std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool in_math = false;
  bool in_display = false;
  auto push = [&](std::size_t b, std::size_t e) {
    std::string_view piece = text::trim(s.substr(b, e - b));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_display) {
      if (text::starts_with_at(s, i, "</equation>")) {
        in_display = false;
        i += 10;
      }
      continue;
    }
    if (c == '\\') {
      ++i;
      continue;
    }
    if (c == '$') {
      in_math = !in_math;
      continue;
    }
    if (in_math) continue;
    if (text::starts_with_at(s, i, "<equation>")) {
      in_display = true;
      i += 9;
      continue;
    }
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t q = i + 1;
    while (q < s.size() && (s[q] == '.' || s[q] == '?' || s[q] == '!')) ++q;
    while (q < s.size() && (s[q] == '"' || s[q] == '\'' || s[q] == ')' || s[q] == ']')) ++q;
    if (q >= s.size() || !text::is_space(s[q])) continue;
    std::size_t r = q;
    while (r < s.size() && text::is_space(s[r])) ++r;
    if (r >= s.size() || !(text::is_upper(s[r]) || text::is_digit(s[r]))) continue;
    if (c == '.' && q == i + 1) {
      std::size_t tb = i;
      while (tb > start && !text::is_space(s[tb - 1])) --tb;
      if (detail::is_abbreviation(s.substr(tb, i + 1 - tb))) continue;
    }
    push(start, q);
    start = r;
    i = r - 1;
  }
  push(start, s.size());
  return out;
}

// ---------------------------------------------------------------------------
// Citations

struct Citation {
  std::size_t offset = 0;  // offset of the <cite> token in the rewritten text
  std::string key;
};

struct CitationScan {
  std::string text;
  std::vector<Citation> citations;
};

inline constexpr std::array<std::string_view, 18> kCiteCommands = {
    "cite",     "citep",      "citet",    "citealp",  "citealt",   "citeauthor", "citeyear", "citeyearpar", "parencite",
    "textcite", "autocite",   "footcite", "Cite",     "Citep",     "Citet",      "citenum",  "Citealp",     "smartcite"};

inline bool is_cite_command(std::string_view name) {
  return std::find(kCiteCommands.begin(), kCiteCommands.end(), name) != kCiteCommands.end();
}

// Replaces each \cite-family command by the token <cite> and returns one
// record per key, in document order. \nocite is removed without a token.
inline CitationScan extract_citations(std::string_view s, Warnings* warnings = nullptr) {
  CitationScan scan;
  scan.text.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\\') {
      std::size_t next = s.find('\\', i);
      if (next == std::string_view::npos) next = s.size();
      scan.text.append(s.substr(i, next - i));
      i = next;
      continue;
    }
    auto cs = tex::read_control_sequence(s, i);
    const bool nocite = cs.name == "nocite";
    if (!nocite && !is_cite_command(cs.name)) {
      scan.text.append(s.substr(i, cs.end - i));
      i = cs.end;
      continue;
    }
    std::size_t p = cs.end;
    if (p < s.size() && s[p] == '*') ++p;
    for (int k = 0; k < 2; ++k) {
      if (auto opt = tex::read_bracket_group(s, p)) p = opt->end;
    }
    auto keys = tex::read_brace_group(s, p);
    if (!keys) {
      warn(warnings, "malformed \\" + std::string(cs.name) + " at offset " + std::to_string(i));
      scan.text.append(s.substr(i, cs.end - i));
      i = cs.end;
      continue;
    }
    if (!nocite) {
      const std::size_t offset = scan.text.size();
      std::string_view list = keys->content(s);
      const std::size_t before = scan.citations.size();
      std::size_t b = 0;
      while (b <= list.size()) {
        std::size_t e = list.find(',', b);
        if (e == std::string_view::npos) e = list.size();
        std::string_view key = text::trim(list.substr(b, e - b));
        if (!key.empty()) scan.citations.push_back({offset, std::string(key)});
        b = e + 1;
      }
      if (scan.citations.size() > before) {
        scan.text.append("<cite>");
      } else {
        warn(warnings, "\\" + std::string(cs.name) + " without keys at offset " + std::to_string(i));
      }
    }
    i = keys->end;
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Paragraphs and sections

struct Paragraph {
  std::vector<std::string> sentences;
  std::vector<std::pair<std::size_t, std::string>> object_refs;  // (sentence index, object id)
  std::vector<std::pair<std::size_t, std::string>> cite_marks;   // (sentence index, bib key)
};

struct SectionNode {
  std::string title;
  int level = 0;  // 0 = preamble, 1 = section, 2 = subsection, 3 = subsubsection
  std::vector<Paragraph> paragraphs;
  std::vector<SectionNode> children;
};

struct SectionTree {
  SectionNode root;
  std::optional<std::string> abstract;
};

// Turns the raw LaTeX of one paragraph into a Paragraph; returning nullopt
// drops it.
using ParagraphProcessor = std::function<std::optional<Paragraph>(std::string_view)>;

inline std::optional<Paragraph> plain_paragraph(std::string_view raw) {
  Paragraph p;
  p.sentences = split_sentences(text::collapse_whitespace(raw));
  if (p.sentences.empty()) return std::nullopt;
  return p;
}

// Paragraph boundaries are blank lines, \par, and \paragraph headings.
inline std::vector<std::string> split_paragraphs(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto push = [&](std::size_t b, std::size_t e) {
    std::string_view piece = s.substr(b, e - b);
    if (!text::trim(piece).empty()) out.emplace_back(piece);
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\n') {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
      if (j < s.size() && s[j] == '\n') {
        push(start, i);
        while (j < s.size() && text::is_space(s[j])) ++j;
        start = i = j;
        continue;
      }
      ++i;
      continue;
    }
    if (s[i] == '\\') {
      if (auto v = tex::verbatim_span_end(s, i)) {
        i = *v;
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      if (cs.name == "par") {
        push(start, i);
        start = i = cs.end;
        continue;
      }
      if (cs.name == "paragraph" || cs.name == "subparagraph") {
        push(start, i);
        start = i;
      }
      i = std::max(cs.end, i + 1);
      continue;
    }
    ++i;
  }
  push(start, s.size());
  return out;
}

namespace detail {

inline int section_level(std::string_view name) {
  if (name == "section") return 1;
  if (name == "subsection") return 2;
  if (name == "subsubsection") return 3;
  return 0;
}

struct FlatSection {
  int level = 0;
  std::string title;
  std::string text;
};

inline std::size_t build_tree(SectionNode& parent, const std::vector<FlatSection>& flat, std::size_t idx,
                              const ParagraphProcessor& process) {
  while (idx < flat.size() && flat[idx].level > parent.level) {
    SectionNode node;
    node.level = flat[idx].level;
    node.title = flat[idx].title;
    for (const auto& raw : split_paragraphs(flat[idx].text)) {
      if (auto p = process(raw)) node.paragraphs.push_back(std::move(*p));
    }
    idx = build_tree(node, flat, idx + 1, process);
    parent.children.push_back(std::move(node));
  }
  return idx;
}

}  // namespace detail

// Splits on \section / \subsection / \subsubsection (starred or not) in
// document order. Text before the first heading lands in the level-0 root.
// An abstract environment (or \abstract{..}) is lifted out of the text.
inline SectionTree parse_sections(std::string_view source, const ParagraphProcessor& process = plain_paragraph,
                                  const std::function<std::string(std::string_view)>& clean_title = {}) {
  SectionTree tree;
  std::vector<detail::FlatSection> flat(1);
  std::size_t i = 0;
  std::size_t copied = 0;
  auto flush = [&](std::size_t upto) {
    flat.back().text.append(source.substr(copied, upto - copied));
    copied = upto;
  };
  while (i < source.size()) {
    if (source[i] != '\\') {
      std::size_t next = source.find('\\', i);
      i = next == std::string_view::npos ? source.size() : next;
      continue;
    }
    if (auto v = tex::verbatim_span_end(source, i)) {
      i = *v;
      continue;
    }
    if (auto m = tex::read_env_marker(source, i, "begin"); m && m->name == "abstract") {
      std::size_t close = source.find("\\end{abstract}", m->end);
      std::size_t body_end = close == std::string_view::npos ? source.size() : close;
      flush(i);
      tree.abstract = std::string(text::trim(source.substr(m->end, body_end - m->end)));
      copied = i = close == std::string_view::npos ? source.size() : close + 14;
      continue;
    }
    auto cs = tex::read_control_sequence(source, i);
    if (cs.name == "abstract") {
      if (auto g = tex::read_brace_group(source, cs.end)) {
        flush(i);
        tree.abstract = std::string(text::trim(g->content(source)));
        copied = i = g->end;
        continue;
      }
    }
    int level = detail::section_level(cs.name);
    if (level == 0) {
      i = std::max(cs.end, i + 1);
      continue;
    }
    std::size_t p = cs.end;
    if (p < source.size() && source[p] == '*') ++p;
    if (auto opt = tex::read_bracket_group(source, p)) p = opt->end;
    auto title = tex::read_brace_group(source, p);
    if (!title) {
      i = cs.end;
      continue;
    }
    flush(i);
    std::string_view raw_title = title->content(source);
    flat.push_back({level, clean_title ? clean_title(raw_title) : text::collapse_whitespace(raw_title), {}});
    copied = i = title->end;
  }
  flush(source.size());

  for (const auto& raw : split_paragraphs(flat.front().text)) {
    if (auto p = process(raw)) tree.root.paragraphs.push_back(std::move(*p));
  }
  detail::build_tree(tree.root, flat, 1, process);
  return tree;
}

// Pre-order traversal (document order).
template <typename Fn>
void for_each_section(const SectionNode& node, Fn&& fn) {
  fn(node);
  for (const auto& c : node.children) for_each_section(c, fn);
}

inline bool has_real_sections(const SectionNode& root) { return !root.children.empty(); }

// ---------------------------------------------------------------------------
// Object mentions

struct NumberedMention {
  std::string kind_word;  // canonical lowercase word, e.g. "table", "lemma"
  int number = 0;
};

// Finds "Table 3", "Fig. 2", "Lemma 4" style mentions.
inline std::vector<NumberedMention> find_numbered_mentions(std::string_view sentence) {
  static const std::regex kPattern(
      R"((^|[^A-Za-z])(table|tab\.|figure|fig\.|algorithm|alg\.|theorem|thm\.|lemma|lem\.|corollary|cor\.|proposition|prop\.|definition|def\.)\s*(\d+))",
      std::regex::icase | std::regex::optimize);
  static const std::map<std::string, std::string> kCanonical = {
      {"tab.", "table"},      {"fig.", "figure"}, {"alg.", "algorithm"},    {"thm.", "theorem"},
      {"lem.", "lemma"},      {"cor.", "corollary"}, {"prop.", "proposition"}, {"def.", "definition"}};
  std::vector<NumberedMention> out;
  std::string s(sentence);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPattern); it != std::sregex_iterator(); ++it) {
    std::string word = text::to_lower((*it)[2].str());
    if (auto c = kCanonical.find(word); c != kCanonical.end()) word = c->second;
    out.push_back({word, std::stoi((*it)[3].str())});
  }
  return out;
}

}  // namespace texcorpus::parse
