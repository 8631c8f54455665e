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

// Source ingestion: entry detection, include splicing, comment removal and
// user-macro expansion. Everything here is a pure function of its inputs.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "texcorpus/error.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::ingest {

struct SourceBundle {
  std::string paper_id;
  std::map<std::string, std::string> files;  // relative path -> decoded text
  std::optional<std::string> entry_path;
};

// Where a character of a derived text came from. Macro bodies have no
// source position and are marked synthetic.
struct CharOrigin {
  static constexpr std::uint32_t kSynthetic = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t file = kSynthetic;
  std::uint32_t offset = 0;
};

struct TrackedText {
  std::string text;
  std::vector<CharOrigin> origin;   // one entry per byte of text
  std::vector<std::string> files;   // file index -> relative path
};

struct ProvenanceSpan {
  std::size_t out_begin = 0;
  std::size_t out_end = 0;
  std::string file;
  std::size_t src_begin = 0;
  std::size_t src_end = 0;
};

struct MacroDefinition {
  int arity = 0;
  std::optional<std::string> default_arg;  // makes the first parameter optional
  std::string body;
};

using MacroTable = std::map<std::string, MacroDefinition>;

struct NormalizedSource {
  std::string text;
  MacroTable macro_table;
  std::vector<ProvenanceSpan> provenance;
};

inline constexpr int kMaxExpansionDepth = 100;
inline constexpr std::size_t kMaxExpandedSize = std::size_t{64} << 20;

// ---------------------------------------------------------------------------
// Comments

// Removes every unescaped `%` through end of line, the way TeX reads it.
// Verbatim environments and \verb spans are copied untouched. When
// `kept` is given it receives the source offset of every output byte.
inline std::string strip_comments(std::string_view s, std::vector<std::uint32_t>* kept = nullptr) {
  std::string out;
  out.reserve(s.size());
  auto copy = [&](std::size_t b, std::size_t e) {
    out.append(s.substr(b, e - b));
    if (kept) {
      for (std::size_t k = b; k < e; ++k) kept->push_back(static_cast<std::uint32_t>(k));
    }
  };
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\') {
      if (auto v = tex::verbatim_span_end(s, i)) {
        copy(i, *v);
        i = *v;
        continue;
      }
      std::size_t n = std::min<std::size_t>(2, s.size() - i);
      copy(i, i + n);
      i += n;
      continue;
    }
    if (c == '%') {
      std::size_t eol = s.find('\n', i);
      if (eol == std::string_view::npos) break;
      // The comment swallows its line end and the next line's indentation,
      // unless the next line is blank and so still ends the paragraph.
      std::size_t next = eol + 1;
      while (next < s.size() && (s[next] == ' ' || s[next] == '\t')) ++next;
      i = (next >= s.size() || s[next] == '\n' || s[next] == '\r') ? eol : next;
      continue;
    }
    std::size_t next = s.find_first_of("\\%", i);
    if (next == std::string_view::npos) next = s.size();
    copy(i, next);
    i = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry detection

namespace detail {

inline bool contains_env_begin(std::string_view s, std::string_view env) {
  for (std::size_t pos = s.find("\\begin"); pos != std::string_view::npos;
       pos = s.find("\\begin", pos + 1)) {
    if (auto m = tex::read_env_marker(s, pos, "begin"); m && m->name == env) return true;
  }
  return false;
}

inline bool contains_control_word(std::string_view s, std::string_view name) {
  std::string needle = "\\" + std::string(name);
  for (std::size_t pos = s.find(needle); pos != std::string_view::npos;
       pos = s.find(needle, pos + 1)) {
    if (tex::read_control_sequence(s, pos).name == name) return true;
  }
  return false;
}

}  // namespace detail

// Picks the file holding \begin{document}; among several, the one that also
// declares a document class. Sets bundle.entry_path.
inline std::string find_entry(SourceBundle& bundle) {
  std::vector<std::string> with_begin;
  std::vector<std::string> with_class;
  for (const auto& [path, raw] : bundle.files) {
    std::string body = strip_comments(raw);
    if (!detail::contains_env_begin(body, "document")) continue;
    with_begin.push_back(path);
    if (detail::contains_control_word(body, "documentclass") ||
        detail::contains_control_word(body, "documentstyle")) {
      with_class.push_back(path);
    }
  }
  if (with_begin.empty()) {
    throw Error(ErrorCode::kNoEntry, "no file in '" + bundle.paper_id + "' contains \\begin{document}");
  }
  std::string entry;
  if (with_begin.size() == 1) {
    entry = with_begin.front();
  } else if (with_class.size() == 1) {
    entry = with_class.front();
  } else {
    throw Error(ErrorCode::kAmbiguousEntry,
                std::to_string(with_begin.size()) + " candidate entry files in '" + bundle.paper_id + "'");
  }
  bundle.entry_path = entry;
  return entry;
}

// ---------------------------------------------------------------------------
// Includes

namespace detail {

inline std::optional<std::string> lookup_include(const SourceBundle& bundle, std::string_view name,
                                                 const std::string& from_file) {
  namespace fs = std::filesystem;
  std::string clean(text::trim(name));
  if (clean.empty()) return std::nullopt;
  std::vector<fs::path> bases = {fs::path()};
  fs::path parent = fs::path(from_file).parent_path();
  if (!parent.empty()) bases.push_back(parent);
  for (const auto& base : bases) {
    fs::path p = (base / clean).lexically_normal();
    for (const std::string& candidate : {p.generic_string(), p.generic_string() + ".tex"}) {
      if (bundle.files.count(candidate)) return candidate;
    }
  }
  return std::nullopt;
}

class IncludeResolver {
 public:
  IncludeResolver(const SourceBundle& bundle, Warnings* warnings) : bundle_(bundle), warnings_(warnings) {
    for (const auto& kv : bundle.files) out_.files.push_back(kv.first);
  }

  TrackedText run(const std::string& entry) {
    splice(entry);
    return std::move(out_);
  }

 private:
  std::uint32_t file_index(const std::string& path) const {
    auto it = std::find(out_.files.begin(), out_.files.end(), path);
    return static_cast<std::uint32_t>(it - out_.files.begin());
  }

  void emit(std::string_view s, std::uint32_t file, std::size_t offset) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      out_.text.push_back(s[k]);
      out_.origin.push_back({file, static_cast<std::uint32_t>(offset + k)});
    }
  }

  void splice(const std::string& path) {
    if (std::find(stack_.begin(), stack_.end(), path) != stack_.end()) {
      std::string chain;
      for (const auto& p : stack_) chain += p + " -> ";
      throw Error(ErrorCode::kIncludeCycle, chain + path);
    }
    stack_.push_back(path);
    const std::string& s = bundle_.files.at(path);
    const std::uint32_t fid = file_index(path);
    std::size_t i = 0;
    std::size_t copied = 0;
    auto flush = [&](std::size_t upto) {
      emit(std::string_view(s).substr(copied, upto - copied), fid, copied);
      copied = upto;
    };
    while (i < s.size()) {
      char c = s[i];
      if (c == '%') {
        std::size_t eol = s.find('\n', i);
        i = eol == std::string::npos ? s.size() : eol;
        continue;
      }
      if (c != '\\') {
        ++i;
        continue;
      }
      if (auto v = tex::verbatim_span_end(s, i)) {
        i = *v;
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      if (cs.name != "input" && cs.name != "include" && cs.name != "subfile") {
        i = std::max(cs.end, i + 1);
        continue;
      }
      std::optional<std::string> target;
      std::size_t end = cs.end;
      if (auto g = tex::read_brace_group(s, cs.end)) {
        target = std::string(g->content(s));
        end = g->end;
      } else if (cs.name == "input") {
        std::size_t b = tex::skip_spaces(s, cs.end);
        std::size_t e = b;
        while (e < s.size() && !text::is_space(s[e]) && s[e] != '}' && s[e] != '\\') ++e;
        if (e > b) {
          target = s.substr(b, e - b);
          end = e;
        }
      }
      if (!target || target->find('#') != std::string::npos) {
        i = cs.end;
        continue;
      }
      flush(i);
      if (auto found = lookup_include(bundle_, *target, path)) {
        splice(*found);
      } else {
        warn(warnings_, "missing include '" + *target + "' in " + path);
      }
      copied = end;
      i = end;
    }
    flush(s.size());
    stack_.pop_back();
  }

  const SourceBundle& bundle_;
  Warnings* warnings_;
  TrackedText out_;
  std::vector<std::string> stack_;
};

}  // namespace detail

inline TrackedText resolve_inputs_tracked(const SourceBundle& bundle, Warnings* warnings = nullptr) {
  if (!bundle.entry_path) throw Error(ErrorCode::kInvalidArgument, "entry_path not set");
  return detail::IncludeResolver(bundle, warnings).run(*bundle.entry_path);
}

// Splices \input / \include targets recursively, starting at the entry file.
// Missing targets become empty text plus a warning.
inline std::string resolve_inputs(const SourceBundle& bundle, Warnings* warnings = nullptr) {
  return resolve_inputs_tracked(bundle, warnings).text;
}

// ---------------------------------------------------------------------------
// Macros
//
// Conventions (shared with the documented oracle in the tests):
//  * a call is a control sequence whose name is in the table;
//  * zero-arity calls do not consume following spaces;
//  * each argument skips whitespace, then takes a balanced {group} (braces
//    stripped), a control sequence, or one character; nothing at end of text
//    gives an empty argument; a '}' is never consumed as an argument;
//  * an optional first parameter takes [..] when present, else its default;
//  * one pass replaces every call left to right without rescanning inserted
//    text; passes repeat until nothing changes;
//  * everything a call produces, substituted arguments included, sits one
//    level deeper than the call, and no call may sit deeper than
//    kMaxExpansionDepth. This bounds self-feeding input such as
//    \dup\dup where the argument re-creates the call.

namespace detail {

struct WorkText {
  std::string text;
  std::vector<CharOrigin> origin;
  std::vector<std::uint16_t> depth;

  void push(char c, CharOrigin o, std::uint16_t d) {
    text.push_back(c);
    origin.push_back(o);
    depth.push_back(d);
  }
  void append(const WorkText& src, std::size_t b, std::size_t e) {
    text.append(src.text, b, e - b);
    origin.insert(origin.end(), src.origin.begin() + static_cast<std::ptrdiff_t>(b),
                  src.origin.begin() + static_cast<std::ptrdiff_t>(e));
    depth.insert(depth.end(), src.depth.begin() + static_cast<std::ptrdiff_t>(b),
                 src.depth.begin() + static_cast<std::ptrdiff_t>(e));
  }
};

inline std::size_t utf8_length(char lead) {
  auto c = static_cast<unsigned char>(lead);
  if (c >= 0xF0) return 4;
  if (c >= 0xE0) return 3;
  if (c >= 0xC0) return 2;
  return 1;
}

struct ArgRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool use_default = false;
};

// Reads the arguments of a call whose name ends at `pos`; returns the end of
// the call and fills `args`.
inline std::size_t read_call_arguments(std::string_view s, std::size_t pos, const MacroDefinition& def,
                                       std::vector<ArgRange>& args) {
  args.clear();
  for (int k = 0; k < def.arity; ++k) {
    if (k == 0 && def.default_arg) {
      std::size_t q = tex::skip_spaces(s, pos);
      if (q < s.size() && s[q] == '[') {
        if (auto close = tex::find_matching_bracket(s, q)) {
          args.push_back({q + 1, *close, false});
          pos = *close + 1;
          continue;
        }
      }
      args.push_back({0, 0, true});
      continue;
    }
    std::size_t q = tex::skip_spaces(s, pos);
    if (q >= s.size() || s[q] == '}') {
      args.push_back({q, q, false});
      pos = q;
      continue;
    }
    if (s[q] == '{') {
      if (auto close = tex::find_matching_brace(s, q)) {
        args.push_back({q + 1, *close, false});
        pos = *close + 1;
      } else {
        args.push_back({q, q, false});
        pos = q;
      }
      continue;
    }
    if (s[q] == '\\') {
      auto cs = tex::read_control_sequence(s, q);
      args.push_back({q, cs.end, false});
      pos = cs.end;
      continue;
    }
    std::size_t len = std::min(utf8_length(s[q]), s.size() - q);
    args.push_back({q, q + len, false});
    pos = q + len;
  }
  return pos;
}

// One left-to-right substitution pass. Returns true if anything changed.
inline bool expand_pass(const WorkText& in, WorkText& out, const MacroTable& table) {
  out = WorkText{};
  out.text.reserve(in.text.size());
  const std::string_view s = in.text;
  bool changed = false;
  std::vector<ArgRange> args;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\\') {
      std::size_t next = s.find('\\', i);
      if (next == std::string_view::npos) next = s.size();
      out.append(in, i, next);
      i = next;
      continue;
    }
    if (auto v = tex::verbatim_span_end(s, i)) {
      out.append(in, i, *v);
      i = *v;
      continue;
    }
    auto cs = tex::read_control_sequence(s, i);
    auto it = cs.name.empty() ? table.end() : table.find(std::string(cs.name));
    if (it == table.end()) {
      out.append(in, i, cs.end);
      i = cs.end;
      continue;
    }
    const MacroDefinition& def = it->second;
    const int depth = in.depth[i] + 1;
    if (depth > kMaxExpansionDepth) {
      throw Error(ErrorCode::kExpansionDepthExceeded,
                  "\\" + it->first + " exceeds expansion depth " + std::to_string(kMaxExpansionDepth));
    }
    std::size_t end = read_call_arguments(s, cs.end, def, args);
    const auto d = static_cast<std::uint16_t>(depth);
    const CharOrigin synthetic{};
    const std::string& body = def.body;
    for (std::size_t b = 0; b < body.size(); ++b) {
      if (body[b] == '#' && b + 1 < body.size()) {
        char n = body[b + 1];
        if (n == '#') {
          out.push('#', synthetic, d);
          ++b;
          continue;
        }
        if (n >= '1' && n <= '9' && n - '0' <= def.arity) {
          const ArgRange& a = args[static_cast<std::size_t>(n - '1')];
          if (a.use_default) {
            for (char c : *def.default_arg) out.push(c, synthetic, d);
          } else {
            for (std::size_t k = a.begin; k < a.end; ++k) {
              out.push(in.text[k], in.origin[k], std::max(in.depth[k], d));
            }
          }
          ++b;
          continue;
        }
      }
      out.push(body[b], synthetic, d);
    }
    if (out.text.size() > kMaxExpandedSize) {
      throw Error(ErrorCode::kExpansionDepthExceeded, "macro expansion output exceeds size limit");
    }
    changed = true;
    i = end;
  }
  return changed;
}

struct DefinitionSite {
  std::size_t begin = 0;
  std::size_t end = 0;  // includes trailing blanks and one newline
};

inline std::size_t eat_definition_tail(std::string_view s, std::size_t pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos < s.size() && s[pos] == '\n') ++pos;
  return pos;
}

inline std::optional<std::string> read_macro_name(std::string_view s, std::size_t& pos) {
  pos = tex::skip_spaces(s, pos);
  if (pos >= s.size()) return std::nullopt;
  if (s[pos] == '\\') {
    auto cs = tex::read_control_sequence(s, pos);
    if (cs.name.empty()) return std::nullopt;
    pos = cs.end;
    return std::string(cs.name);
  }
  if (s[pos] == '{') {
    auto g = tex::read_brace_group(s, pos);
    if (!g) return std::nullopt;
    std::string_view inner = text::trim(g->content(s));
    if (inner.size() < 2 || inner[0] != '\\') return std::nullopt;
    auto cs = tex::read_control_sequence(inner, 0);
    if (cs.end != inner.size() || cs.name.empty()) return std::nullopt;
    pos = g->end;
    return std::string(cs.name);
  }
  return std::nullopt;
}

// Parses \newcommand-family syntax after the command word ending at `pos`.
inline std::optional<std::pair<std::string, MacroDefinition>> parse_newcommand(std::string_view s,
                                                                                std::size_t& pos) {
  std::size_t p = pos;
  if (p < s.size() && s[p] == '*') ++p;
  auto name = read_macro_name(s, p);
  if (!name) return std::nullopt;
  MacroDefinition def;
  if (auto g = tex::read_bracket_group(s, p)) {
    std::string_view n = text::trim(g->content(s));
    if (n.size() != 1 || !text::is_digit(n[0])) return std::nullopt;
    def.arity = n[0] - '0';
    p = g->end;
    if (auto dflt = tex::read_bracket_group(s, p)) {
      if (def.arity == 0) return std::nullopt;
      def.default_arg = std::string(dflt->content(s));
      p = dflt->end;
    }
  }
  auto body = tex::read_brace_group(s, p);
  if (!body) return std::nullopt;
  def.body = std::string(body->content(s));
  pos = body->end;
  return std::make_pair(*name, std::move(def));
}

enum class DefParse { kOk, kMalformed, kDelimited };

// Parses \def\name#1#2{body}. Delimited parameter text is reported, not
// supported.
inline DefParse parse_def(std::string_view s, std::size_t& pos, std::pair<std::string, MacroDefinition>& out) {
  std::size_t p = pos;
  auto name = read_macro_name(s, p);
  if (!name) return DefParse::kMalformed;
  std::size_t brace = s.find('{', p);
  if (brace == std::string_view::npos) return DefParse::kMalformed;
  std::string params;
  for (char c : s.substr(p, brace - p)) {
    if (!text::is_space(c)) params.push_back(c);
  }
  int arity = 0;
  for (std::size_t k = 0; k < params.size(); k += 2) {
    if (params[k] != '#' || k + 1 >= params.size() || params[k + 1] != static_cast<char>('1' + arity)) {
      return DefParse::kDelimited;
    }
    ++arity;
  }
  auto body = tex::read_brace_group(s, brace);
  if (!body) return DefParse::kMalformed;
  out.first = *name;
  out.second.arity = arity;
  out.second.body = std::string(body->content(s));
  pos = body->end;
  return DefParse::kOk;
}

inline MacroTable collect_definitions(std::string_view s, std::vector<DefinitionSite>& sites,
                                      Warnings* warnings) {
  MacroTable table;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\\') {
      ++i;
      continue;
    }
    if (auto v = tex::verbatim_span_end(s, i)) {
      i = *v;
      continue;
    }
    auto cs = tex::read_control_sequence(s, i);
    std::size_t next = std::max(cs.end, i + 1);
    const std::string_view n = cs.name;
    if (n == "newcommand" || n == "renewcommand" || n == "providecommand" || n == "DeclareRobustCommand") {
      std::size_t p = cs.end;
      if (auto parsed = parse_newcommand(s, p)) {
        auto [name, def] = std::move(*parsed);
        if (n == "providecommand" && table.count(name)) {
          // first definition stays
        } else {
          if (n == "newcommand" && table.count(name)) warn(warnings, "\\" + name + " defined twice");
          table[name] = std::move(def);
        }
        std::size_t end = eat_definition_tail(s, p);
        sites.push_back({i, end});
        next = end;
      } else {
        warn(warnings, "malformed \\" + std::string(n) + " left in place");
      }
    } else if (n == "def" || n == "gdef" || n == "edef" || n == "xdef") {
      std::size_t p = cs.end;
      std::pair<std::string, MacroDefinition> parsed;
      switch (parse_def(s, p, parsed)) {
        case DefParse::kOk: {
          table[parsed.first] = std::move(parsed.second);
          std::size_t end = eat_definition_tail(s, p);
          sites.push_back({i, end});
          next = end;
          break;
        }
        case DefParse::kDelimited:
          warn(warnings, "unsupported delimited \\" + std::string(n) + " left verbatim");
          break;
        case DefParse::kMalformed:
          warn(warnings, "malformed \\" + std::string(n) + " left in place");
          break;
      }
    }
    i = next;
  }
  return table;
}

inline std::vector<ProvenanceSpan> provenance_of(const WorkText& w, const std::vector<std::string>& files) {
  std::vector<ProvenanceSpan> spans;
  for (std::size_t k = 0; k < w.origin.size(); ++k) {
    const CharOrigin& o = w.origin[k];
    if (o.file == CharOrigin::kSynthetic || o.file >= files.size()) continue;
    if (!spans.empty()) {
      ProvenanceSpan& last = spans.back();
      if (last.out_end == k && last.file == files[o.file] && last.src_end == o.offset) {
        ++last.out_end;
        ++last.src_end;
        continue;
      }
    }
    spans.push_back({k, k + 1, files[o.file], o.offset, std::size_t{o.offset} + 1});
  }
  return spans;
}

inline WorkText run_to_fixed_point(WorkText work, const MacroTable& table) {
  if (table.empty()) return work;
  WorkText next;
  while (expand_pass(work, next, table)) std::swap(work, next);
  return work;
}

}  // namespace detail

// Expands `text` with an existing table; definitions in `text` are not
// collected. Used to check that expansion output is a fixed point.
inline std::string expand_with_table(std::string_view text, const MacroTable& table) {
  detail::WorkText w;
  w.text = std::string(text);
  w.origin.assign(text.size(), CharOrigin{});
  w.depth.assign(text.size(), 0);
  return detail::run_to_fixed_point(std::move(w), table).text;
}

// Collects \newcommand / \renewcommand / \providecommand / \def definitions,
// removes them, and substitutes every use until a fixed point is reached.
inline NormalizedSource expand_macros(const TrackedText& source, Warnings* warnings = nullptr) {
  std::vector<detail::DefinitionSite> sites;
  NormalizedSource result;
  result.macro_table = detail::collect_definitions(source.text, sites, warnings);

  detail::WorkText work;
  work.text.reserve(source.text.size());
  std::size_t copied = 0;
  auto keep = [&](std::size_t b, std::size_t e) {
    work.text.append(source.text, b, e - b);
    for (std::size_t k = b; k < e; ++k) {
      work.origin.push_back(k < source.origin.size() ? source.origin[k] : CharOrigin{});
    }
  };
  for (const auto& site : sites) {
    keep(copied, site.begin);
    copied = site.end;
  }
  keep(copied, source.text.size());
  work.depth.assign(work.text.size(), 0);

  work = detail::run_to_fixed_point(std::move(work), result.macro_table);
  result.provenance = detail::provenance_of(work, source.files);
  result.text = std::move(work.text);
  return result;
}

inline NormalizedSource expand_macros(std::string_view text, Warnings* warnings = nullptr) {
  TrackedText t;
  t.text = std::string(text);
  t.files = {"<input>"};
  t.origin.reserve(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) t.origin.push_back({0, static_cast<std::uint32_t>(k)});
  return expand_macros(t, warnings);
}

// ---------------------------------------------------------------------------
// Bundles

inline bool is_source_extension(const std::filesystem::path& p) {
  std::string ext = text::to_lower(p.extension().string());
  return ext == ".tex" || ext == ".ltx" || ext == ".bbl" || ext == ".bib";
}

inline std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A directory becomes a multi-file bundle (paper id = directory name); a
// single .tex file becomes a one-file bundle (paper id = file stem).
inline SourceBundle load_bundle(const std::filesystem::path& path, Warnings* warnings = nullptr) {
  namespace fs = std::filesystem;
  SourceBundle bundle;
  auto add = [&](const fs::path& file, const std::string& rel) {
    bool fallback = false;
    bundle.files[rel] = text::decode_source(read_file_bytes(file), &fallback);
    if (fallback) warn(warnings, rel + ": not valid UTF-8, decoded as Latin-1");
  };
  if (fs::is_directory(path)) {
    bundle.paper_id = path.filename().string();
    std::vector<fs::path> found;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file() && is_source_extension(e.path())) found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    for (const auto& f : found) add(f, f.lexically_relative(path).generic_string());
  } else if (fs::is_regular_file(path)) {
    bundle.paper_id = path.stem().string();
    add(path, path.filename().generic_string());
  } else {
    throw Error(ErrorCode::kIo, "no such paper source: " + path.string());
  }
  if (bundle.files.empty()) throw Error(ErrorCode::kNoEntry, "no source files under " + path.string());
  return bundle;
}

// The full ingest chain: entry detection, per-file comment removal, include
// splicing and macro expansion.
inline NormalizedSource normalize(SourceBundle& bundle, Warnings* warnings = nullptr) {
  if (!bundle.entry_path) find_entry(bundle);
  SourceBundle stripped = bundle;
  std::map<std::string, std::vector<std::uint32_t>> offsets;
  for (auto& [path, body] : stripped.files) {
    if (!path.ends_with(".bib")) body = strip_comments(body, &offsets[path]);
  }
  TrackedText spliced = resolve_inputs_tracked(stripped, warnings);
  for (auto& o : spliced.origin) {
    if (o.file == CharOrigin::kSynthetic) continue;
    auto it = offsets.find(spliced.files[o.file]);
    if (it != offsets.end() && o.offset < it->second.size()) o.offset = it->second[o.offset];
  }
  return expand_macros(spliced, warnings);
}

}  // namespace texcorpus::ingest
