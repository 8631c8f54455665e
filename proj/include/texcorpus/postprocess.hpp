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

// Machine-readable payloads: linearized tables, normalized math, emphasis
// tokens and figure paths.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texcorpus/error.hpp"
#include "texcorpus/parse.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::postprocess {

// ---------------------------------------------------------------------------
// Reserved tokens

inline constexpr std::array<std::string_view, 10> kReservedTokens = {
    "<table>", "<row>", "<cell>", "<equation>", "</equation>", "<bold>", "</bold>", "<italic>", "</italic>", "<cite>"};

namespace detail {

struct TokenRun {
  std::size_t begin = 0;  // first '<' of the run
  std::size_t end = 0;    // one past the last '>'
  std::size_t open = 0;   // '<' count
  std::size_t close = 0;  // '>' count
};

// Matches '<'^k name '>'^m with k, m >= 1 at `pos`, where name is a reserved
// token without its brackets.
inline std::optional<TokenRun> match_token_run(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i < s.size() && s[i] == '<') ++i;
  if (i == pos) return std::nullopt;
  for (std::string_view tok : kReservedTokens) {
    std::string_view name = tok.substr(1, tok.size() - 2);
    if (!text::starts_with_at(s, i, name)) continue;
    std::size_t j = i + name.size();
    std::size_t k = j;
    while (k < s.size() && s[k] == '>') ++k;
    if (k == j) continue;
    return TokenRun{pos, k, i - pos, k - j};
  }
  return std::nullopt;
}

inline std::string shift_brackets(std::string_view s, int delta) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<') {
      if (auto run = match_token_run(s, i)) {
        // The innermost n brackets on each side belong to the token; any
        // surplus on one side is literal.
        std::size_t n = std::min(run->open, run->close);
        std::size_t target = delta > 0 ? n + 1 : (n >= 2 ? n - 1 : n);
        std::string_view inner = s.substr(i + run->open, run->end - i - run->open - run->close);
        out.append(run->open - n, '<');
        out.append(target, '<');
        out.append(inner);
        out.append(target, '>');
        out.append(run->close - n, '>');
        i = run->end;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

}  // namespace detail

// Literal occurrences of reserved tokens get one more bracket on each side,
// so <cell> becomes <<cell>> and <<cell>> becomes <<<cell>>>.
inline std::string escape_reserved(std::string_view s) { return detail::shift_brackets(s, +1); }

// Inverse of escape_reserved. Single-bracket tokens are real tokens and are
// left alone.
inline std::string unescape_reserved(std::string_view s) { return detail::shift_brackets(s, -1); }

inline bool contains_reserved_token(std::string_view s) {
  return std::any_of(kReservedTokens.begin(), kReservedTokens.end(),
                     [&](std::string_view t) { return s.find(t) != std::string_view::npos; });
}

// ---------------------------------------------------------------------------
// Tables

struct LinearTable {
  std::vector<std::vector<std::string>> grid;
  std::string linear;
  bool equal_columns = true;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;       // widest row
  bool nested_flattened = false;  // a tabular inside a cell was flattened
};

// linear := "<table>" (" <row>" (" <cell> " cell)+)+
inline std::string serialize_grid(const std::vector<std::vector<std::string>>& grid) {
  std::string out = "<table>";
  for (const auto& row : grid) {
    out += " <row>";
    for (const auto& cell : row) {
      out += " <cell> ";
      out += cell;
    }
  }
  return out;
}

// Inverse of serialize_grid. Throws InvalidArgument on anything outside the
// grammar.
inline std::vector<std::vector<std::string>> parse_linear(std::string_view s) {
  constexpr std::string_view kRow = " <row>";
  constexpr std::string_view kCell = " <cell> ";
  auto bad = [&](const char* why) { return Error(ErrorCode::kInvalidArgument, std::string("linear table: ") + why); };
  if (!text::starts_with_at(s, 0, "<table>")) throw bad("missing <table>");
  std::vector<std::vector<std::string>> grid;
  std::size_t i = 7;
  if (!text::starts_with_at(s, i, kRow)) throw bad("no rows");
  while (i < s.size()) {
    if (!text::starts_with_at(s, i, kRow)) throw bad("expected <row>");
    i += kRow.size();
    grid.emplace_back();
    if (!text::starts_with_at(s, i, kCell)) throw bad("row without cells");
    while (text::starts_with_at(s, i, kCell)) {
      i += kCell.size();
      std::size_t next_cell = s.find(kCell, i);
      std::size_t next_row = s.find(kRow, i);
      std::size_t e = std::min({next_cell, next_row, s.size()});
      grid.back().emplace_back(s.substr(i, e - i));
      i = e;
    }
  }
  return grid;
}

namespace detail {

inline constexpr std::array<std::string_view, 16> kRuleCommands = {
    "hline",     "toprule",      "midrule", "bottomrule", "cline",   "cmidrule",   "specialrule", "addlinespace",
    "hhline",    "morecmidrules", "endhead", "endfirsthead", "endfoot", "endlastfoot", "rowcolor",  "noalign"};

inline bool is_rule_command(std::string_view name) {
  return std::find(kRuleCommands.begin(), kRuleCommands.end(), name) != kRuleCommands.end();
}

inline bool is_tabular_env(std::string_view name) {
  return name == "tabular" || name == "tabular*" || name == "tabularx" || name == "tabulary" ||
         name == "longtable" || name == "longtable*" || name == "tabu" || name == "supertabular" ||
         name == "array";
}

// Drops `(..)`, `[..]` and `{..}` arguments that follow a rule command.
inline std::size_t skip_rule_arguments(std::string_view s, std::size_t p) {
  for (;;) {
    std::size_t q = tex::skip_spaces(s, p);
    if (q < s.size() && s[q] == '(') {
      std::size_t close = s.find(')', q);
      if (close == std::string_view::npos) return p;
      p = close + 1;
    } else if (auto g = tex::read_bracket_group(s, p)) {
      p = g->end;
    } else if (auto b = tex::read_brace_group(s, p)) {
      p = b->end;
    } else {
      return p;
    }
  }
}

// Flattens a nested tabular: its row and cell separators become spaces.
inline std::string flatten_nested(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\\') {
      if (auto m = tex::read_env_marker(s, i, "begin"); m && is_tabular_env(m->name)) {
        std::size_t p = m->end;
        if (auto opt = tex::read_bracket_group(s, p)) p = opt->end;
        if (auto spec = tex::read_brace_group(s, p)) p = spec->end;
        out += ' ';
        i = p;
        continue;
      }
      if (auto m = tex::read_env_marker(s, i, "end"); m && is_tabular_env(m->name)) {
        out += ' ';
        i = m->end;
        continue;
      }
      if (i + 1 < s.size() && s[i + 1] == '\\') {
        out += ' ';
        i += 2;
        continue;
      }
      out += s.substr(i, 2);
      i += 2;
      continue;
    }
    out += s[i] == '&' ? ' ' : s[i];
    ++i;
  }
  return out;
}

// One cell's final text plus the number of grid columns it covers.
inline std::pair<std::string, std::size_t> finish_cell(std::string_view raw, bool* nested) {
  std::string cell = text::collapse_whitespace(raw);
  std::size_t span = 1;
  for (bool again = true; again;) {
    again = false;
    if (cell.rfind("\\multicolumn", 0) == 0 || cell.rfind("\\multirow", 0) == 0) {
      const bool multicolumn = cell.rfind("\\multicolumn", 0) == 0;
      std::size_t p = multicolumn ? 12 : 9;
      // \multirow[vpos]{n}[bigstruts]{width}[fixup]{text}
      std::vector<std::string_view> args;
      std::string_view view = cell;
      for (;;) {
        if (auto opt = tex::read_bracket_group(view, p)) {
          p = opt->end;
          continue;
        }
        auto g = tex::read_brace_group(view, p);
        if (!g) break;
        args.push_back(g->content(view));
        p = g->end;
        if (args.size() == 3) break;
      }
      if (args.size() == 3 && text::trim(view.substr(p)).empty()) {
        if (multicolumn) {
          int k = 0;
          for (char c : text::trim(args[0])) {
            if (!text::is_digit(c)) {
              k = 0;
              break;
            }
            k = k * 10 + (c - '0');
          }
          if (k >= 1) span *= static_cast<std::size_t>(k);
        }
        cell = text::collapse_whitespace(args[2]);
        again = true;
      }
    }
  }
  if (cell.find("\\begin{") != std::string::npos) {
    std::string flat = flatten_nested(cell);
    if (flat != cell) {
      *nested = true;
      cell = text::collapse_whitespace(flat);
    }
  }
  return {escape_reserved(cell), span};
}

}  // namespace detail

// Strips `[pos]`, width and column-spec arguments from the body of a
// tabular-like environment, leaving the rows.
inline std::string_view tabular_content(std::string_view env_name, std::string_view body) {
  std::size_t p = 0;
  if (auto opt = tex::read_bracket_group(body, p)) p = opt->end;
  int groups = (env_name == "tabular*" || env_name == "tabularx" || env_name == "tabulary") ? 2 : 1;
  if (env_name == "tabu") groups = 1;
  for (int k = 0; k < groups; ++k) {
    if (auto g = tex::read_brace_group(body, p)) p = g->end;
  }
  return body.substr(p);
}

// Rows split on `\\` and cells on unescaped `&`, both at brace depth zero
// and outside nested tabulars.
inline LinearTable linearize_table(std::string_view body) {
  LinearTable t;
  std::vector<std::string> row;
  std::string cell;
  auto end_cell = [&] {
    auto [text, span] = detail::finish_cell(cell, &t.nested_flattened);
    row.push_back(std::move(text));
    for (std::size_t k = 1; k < span; ++k) row.emplace_back();
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    if (!(row.size() == 1 && row[0].empty())) t.grid.push_back(std::move(row));
    row.clear();
  };
  int depth = 0;
  int env_depth = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    char c = body[i];
    if (c == '\\') {
      if (auto v = tex::verbatim_span_end(body, i)) {
        cell.append(body.substr(i, *v - i));
        i = *v;
        continue;
      }
      if (auto m = tex::read_env_marker(body, i, "begin")) {
        ++env_depth;
        cell.append(body.substr(i, m->end - i));
        i = m->end;
        continue;
      }
      if (auto m = tex::read_env_marker(body, i, "end")) {
        --env_depth;
        cell.append(body.substr(i, m->end - i));
        i = m->end;
        continue;
      }
      auto cs = tex::read_control_sequence(body, i);
      if (depth == 0 && env_depth == 0) {
        if (cs.name == "\\" || cs.name == "tabularnewline") {
          std::size_t p = cs.end;
          if (p < body.size() && body[p] == '*') ++p;
          if (auto opt = tex::read_bracket_group(body, p)) p = opt->end;
          end_row();
          i = p;
          continue;
        }
        if (detail::is_rule_command(cs.name)) {
          i = detail::skip_rule_arguments(body, cs.end);
          cell += ' ';
          continue;
        }
      }
      cell.append(body.substr(i, cs.end - i));
      i = cs.end;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == '&' && depth == 0 && env_depth == 0) {
      end_cell();
      ++i;
      continue;
    }
    cell += c;
    ++i;
  }
  end_row();
  if (t.grid.empty()) throw Error(ErrorCode::kEmptyTable, "table has no rows");
  t.n_rows = t.grid.size();
  for (const auto& r : t.grid) t.n_cols = std::max(t.n_cols, r.size());
  t.equal_columns = std::all_of(t.grid.begin(), t.grid.end(), [&](const auto& r) { return r.size() == t.n_cols; });
  t.linear = serialize_grid(t.grid);
  return t;
}

// ---------------------------------------------------------------------------
// Math

inline bool is_display_math_env(std::string_view name) {
  if (!name.empty() && name.back() == '*') name.remove_suffix(1);
  static constexpr std::array<std::string_view, 10> kNames = {
      "equation", "align", "gather", "multline", "eqnarray", "flalign", "alignat", "displaymath", "dmath", "dgroup"};
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

namespace detail {

inline std::string equation_token(std::string_view body) {
  return "<equation> " + std::string(text::trim(body)) + " </equation>";
}

}  // namespace detail

// Inline math stays as $..$ (\(..\) is rewritten to $..$). Display math
// becomes "<equation> body </equation>" with the body kept as written.
// An unterminated span is left untouched with a warning.
inline std::string normalize_equations(std::string_view s, Warnings* warnings = nullptr) {
  std::string out;
  out.reserve(s.size() + 32);
  std::size_t i = 0;
  auto copy_to = [&](std::size_t e) {
    out.append(s.substr(i, e - i));
    i = e;
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\') {
      if (auto v = tex::verbatim_span_end(s, i)) {
        copy_to(*v);
        continue;
      }
      if (auto m = tex::read_env_marker(s, i, "begin"); m && is_display_math_env(m->name)) {
        std::string closing = "\\end{" + std::string(m->name) + "}";
        std::size_t e = s.find(closing, m->end);
        if (e == std::string_view::npos) {
          warn(warnings, "unterminated \\begin{" + std::string(m->name) + "}");
          copy_to(m->end);
          continue;
        }
        out += detail::equation_token(s.substr(m->end, e - m->end));
        i = e + closing.size();
        continue;
      }
      if (i + 1 < s.size() && (s[i + 1] == '[' || s[i + 1] == '(')) {
        const bool display = s[i + 1] == '[';
        std::size_t e = s.find(display ? "\\]" : "\\)", i + 2);
        if (e == std::string_view::npos) {
          warn(warnings, display ? "unterminated \\[" : "unterminated \\(");
          copy_to(i + 2);
          continue;
        }
        std::string_view body = s.substr(i + 2, e - i - 2);
        if (display) {
          out += detail::equation_token(body);
        } else {
          out += '$';
          out.append(body);
          out += '$';
        }
        i = e + 2;
        continue;
      }
      copy_to(std::min(s.size(), i + 2));
      continue;
    }
    if (c == '$') {
      const bool display = i + 1 < s.size() && s[i + 1] == '$';
      std::size_t e = display ? s.find("$$", i + 2) : tex::find_unescaped(s, '$', i + 1);
      if (e == std::string_view::npos) {
        warn(warnings, "unbalanced math delimiter at offset " + std::to_string(i));
        copy_to(s.size());
        continue;
      }
      if (display) {
        out += detail::equation_token(s.substr(i + 2, e - i - 2));
        i = e + 2;
      } else {
        copy_to(e + 1);
      }
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emphasis

namespace detail {

inline const char* emphasis_tag(std::string_view command) {
  if (command == "textbf" || command == "bf" || command == "bfseries") return "bold";
  if (command == "textit" || command == "emph" || command == "it" || command == "em" || command == "itshape") {
    return "italic";
  }
  return nullptr;
}

// Length of a math span starting at i ($..$ or <equation>..</equation>), or 0.
inline std::size_t math_span_length(std::string_view s, std::size_t i) {
  if (s[i] == '$') {
    std::size_t e = tex::find_unescaped(s, '$', i + 1);
    return e == std::string_view::npos ? 0 : e + 1 - i;
  }
  if (text::starts_with_at(s, i, "<equation>")) {
    std::size_t e = s.find("</equation>", i);
    return e == std::string_view::npos ? 0 : e + 11 - i;
  }
  return 0;
}

}  // namespace detail

// \textbf{x} -> "<bold> x </bold>", \textit{x} and \emph{x} ->
// "<italic> x </italic>", applied inside out. Also handles {\bf x} and
// {\em x}. Math spans are left alone.
inline std::string mark_emphasis(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::size_t m = detail::math_span_length(s, i)) {
      out.append(s.substr(i, m));
      i += m;
      continue;
    }
    if (c == '\\') {
      if (auto v = tex::verbatim_span_end(s, i)) {
        out.append(s.substr(i, *v - i));
        i = *v;
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      const char* tag = detail::emphasis_tag(cs.name);
      if (tag != nullptr && (cs.name == "textbf" || cs.name == "textit" || cs.name == "emph")) {
        if (auto g = tex::read_brace_group(s, cs.end)) {
          out += "<" + std::string(tag) + "> " + mark_emphasis(g->content(s)) + " </" + tag + ">";
          i = g->end;
          continue;
        }
      }
      out.append(s.substr(i, cs.end - i));
      i = cs.end;
      continue;
    }
    if (c == '{' && i + 1 < s.size() && s[i + 1] == '\\') {
      auto cs = tex::read_control_sequence(s, i + 1);
      const char* tag = detail::emphasis_tag(cs.name);
      if (tag != nullptr && cs.name != "textbf" && cs.name != "textit" && cs.name != "emph") {
        if (auto close = tex::find_matching_brace(s, i)) {
          std::string_view inner = text::trim(s.substr(cs.end, *close - cs.end));
          out += "<" + std::string(tag) + "> " + mark_emphasis(inner) + " </" + tag + ">";
          i = *close + 1;
          continue;
        }
      }
    }
    out += c;
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Figures

struct FigurePayload {
  std::vector<std::string> image_paths;
  std::optional<std::string> caption;
};

// Every \includegraphics (and \includesvg, \epsfig{file=..}) argument in the
// block, subfigures included, in source order.
inline FigurePayload extract_figure_paths(const parse::EnvironmentBlock& block) {
  FigurePayload f;
  f.caption = block.caption;
  std::string_view s = block.body;
  for (std::size_t i = s.find('\\'); i != std::string_view::npos; i = s.find('\\', i + 1)) {
    auto cs = tex::read_control_sequence(s, i);
    const bool graphics = cs.name == "includegraphics" || cs.name == "includesvg";
    const bool eps = cs.name == "epsfig" || cs.name == "psfig" || cs.name == "epsfbox";
    if (!graphics && !eps) continue;
    std::size_t p = cs.end;
    if (p < s.size() && s[p] == '*') ++p;
    if (auto opt = tex::read_bracket_group(s, p)) p = opt->end;
    auto g = tex::read_brace_group(s, p);
    if (!g) continue;
    std::string_view arg = text::trim(g->content(s));
    if (cs.name == "epsfig" || cs.name == "psfig") {
      std::size_t k = arg.find("file=");
      if (k == std::string_view::npos) continue;
      arg = arg.substr(k + 5);
      arg = text::trim(arg.substr(0, arg.find(',')));
    }
    if (!arg.empty()) f.image_paths.emplace_back(arg);
    i = g->end - 1;
  }
  return f;
}

}  // namespace texcorpus::postprocess
