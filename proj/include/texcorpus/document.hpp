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

// Assembly of a PaperDocument from a normalized source: object extraction
// and numbering, cross-reference resolution, paragraph rendering and the
// bibliography.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/bibres.hpp"
#include "texcorpus/classify.hpp"
#include "texcorpus/error.hpp"
#include "texcorpus/ingest.hpp"
#include "texcorpus/parse.hpp"
#include "texcorpus/postprocess.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::corpus {

using classify::ObjectKind;

struct Metadata {
  std::string title;
  std::vector<std::string> authors;
  std::vector<std::string> categories;
  std::string date;
};

struct PaperObject {
  std::string id;  // label, or "<kind>-<ordinal>" when unlabeled
  ObjectKind kind = ObjectKind::kOther;
  std::string env_name;
  std::optional<std::string> label;
  std::optional<std::string> caption;
  std::optional<std::string> number;  // printed number, when the object is numbered
  std::optional<postprocess::LinearTable> table;
  std::vector<std::string> image_paths;
  std::string text;  // plain text, or the LaTeX body for equations
  bool has_content = false;
};

struct PaperDocument {
  std::string paper_id;
  Metadata metadata;
  std::string abstract;
  parse::SectionNode body;
  std::vector<PaperObject> objects;
  std::vector<bibres::BibEntry> bib;
  std::vector<bibres::ResolutionResult> links;
  std::size_t word_count = 0;
  std::vector<std::string> dangling_refs;
  // Attachable from outside; never computed here.
  std::vector<std::string> similar_papers;
  std::vector<std::string> code_links;
};

// Whether an object kept its payload: a non-empty grid, an image, or text.
inline bool payload_has_content(const PaperObject& o) {
  switch (o.kind) {
    case ObjectKind::kTable: return o.table.has_value() && !o.table->grid.empty();
    case ObjectKind::kFigure: return !o.image_paths.empty();
    default: return !text::trim(o.text).empty();
  }
}

// Whitespace tokens of every body sentence, preamble paragraphs included.
inline std::size_t count_body_words(const parse::SectionNode& root) {
  std::size_t n = 0;
  parse::for_each_section(root, [&](const parse::SectionNode& s) {
    for (const auto& p : s.paragraphs) {
      for (const auto& sent : p.sentences) n += text::count_words(sent);
    }
  });
  return n;
}

// ---------------------------------------------------------------------------
// LaTeX to plain text

namespace detail {

// Commands removed together with this many mandatory arguments.
inline int dropped_arity(std::string_view name) {
  static const std::map<std::string_view, int> kDropped = {
      {"label", 1},        {"index", 1},        {"footnote", 1},       {"footnotetext", 1}, {"thanks", 1},
      {"vspace", 1},       {"hspace", 1},       {"includegraphics", 1}, {"pageref", 1},     {"bibliographystyle", 1},
      {"bibliography", 1}, {"addcontentsline", 3}, {"setlength", 2},    {"addtolength", 2}, {"setcounter", 2},
      {"captionsetup", 1}, {"caption", 1},      {"title", 1},          {"author", 1},       {"date", 1},
      {"affiliation", 1},  {"email", 1},        {"keywords", 1},       {"institute", 1},    {"url", 0},
      {"maketitle", 0},    {"centering", 0},    {"noindent", 0},       {"newpage", 0},      {"clearpage", 0},
      {"footnotemark", 0}, {"appendix", 0},     {"tableofcontents", 0}, {"vfill", 0},       {"hfill", 0},
      {"smallskip", 0},    {"medskip", 0},      {"bigskip", 0},        {"par", 0},          {"protect", 0},
      {"small", 0},        {"footnotesize", 0}, {"scriptsize", 0},     {"large", 0},        {"Large", 0},
      {"normalsize", 0},   {"tiny", 0},         {"huge", 0},           {"rm", 0},           {"sf", 0},
      {"tt", 0},           {"sc", 0},           {"normalfont", 0},     {"phantom", 1},      {"vskip", 0},
      {"linewidth", 0},    {"textwidth", 0},    {"columnwidth", 0},    {"hline", 0},        {"newline", 0},
      {"linebreak", 0},    {"bibitem", 1},      {"nolinebreak", 0},    {"ignorespaces", 0}};
  auto it = kDropped.find(name);
  return it == kDropped.end() ? -1 : it->second;
}

inline std::string_view symbol_word(std::string_view name) {
  static const std::map<std::string_view, std::string_view> kWords = {
      {"ldots", "..."}, {"dots", "..."},   {"cdots", "..."},  {"textendash", "-"}, {"textemdash", "-"},
      {"LaTeX", "LaTeX"}, {"TeX", "TeX"},  {"textasciitilde", "~"}, {"textbackslash", "\\"}, {"S", "Section"},
      {"textquoteright", "'"}, {"textquoteleft", "'"}, {"textless", "<"}, {"textgreater", ">"}, {"copyright", "(c)"}};
  auto it = kWords.find(name);
  return it == kWords.end() ? std::string_view{} : it->second;
}

// Environments whose \begin carries one argument that is not content.
inline bool env_has_argument(std::string_view name) {
  return name == "minipage" || name == "multicols" || name == "adjustbox" || name == "wrapfigure" ||
         name == "wraptable" || name == "tabularx" || name == "resizebox";
}

inline std::size_t skip_group_arguments(std::string_view s, std::size_t p, int mandatory) {
  if (p < s.size() && s[p] == '*') ++p;
  for (;;) {
    std::size_t q = tex::skip_spaces(s, p);
    auto opt = tex::read_bracket_group(s, q);
    if (!opt) break;
    p = opt->end;
  }
  for (int k = 0; k < mandatory; ++k) {
    std::size_t q = tex::skip_spaces(s, p);
    auto g = tex::read_brace_group(s, q);
    if (!g) break;
    p = g->end;
  }
  return p;
}

}  // namespace detail

// Reduces LaTeX text to plain words. Math spans ($..$ and
// <equation>..</equation>) are copied verbatim. Layout and reference-only
// commands disappear with their arguments; other commands lose only their
// name. Bytes 0x1e..0x1f (reference markers) pass through.
inline std::string latex_to_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '$' || c == '<') {
      std::size_t len = postprocess::detail::math_span_length(s, i);
      if (len > 0) {
        out.append(s.substr(i, len));
        i += len;
        continue;
      }
      out += c;
      ++i;
      continue;
    }
    if (c == '\\') {
      if (i + 1 >= s.size()) {
        ++i;
        continue;
      }
      char n = s[i + 1];
      if (bibres::detail::is_accent_symbol(n)) {
        i += 2;
        continue;
      }
      if (n == '&' || n == '%' || n == '#' || n == '_' || n == '{' || n == '}') {
        out += n;
        i += 2;
        continue;
      }
      if (n == '$') {  // stays escaped so it never opens a math span
        out += "\\$";
        i += 2;
        continue;
      }
      if (n == ',' || n == ';' || n == ':' || n == '!' || n == ' ' || n == '\n') {
        out += ' ';
        i += 2;
        continue;
      }
      if (n == '-' || n == '/' || n == '@') {
        i += 2;
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      std::string_view name = cs.name;
      std::size_t p = cs.end;
      if (name == "\\") {
        out += ' ';
        i = detail::skip_group_arguments(s, p, 0);
        continue;
      }
      if (auto letter = bibres::detail::special_letter(name); !letter.empty()) {
        out.append(letter);
        i = p;
        if (i < s.size() && s[i] == ' ' && !out.empty() && text::is_alpha(out.back()) && i + 1 < s.size() &&
            text::is_alpha(s[i + 1])) {
          ++i;
        }
        continue;
      }
      if (bibres::detail::is_accent_word(name)) {
        i = p;
        if (i < s.size() && s[i] == ' ') ++i;
        continue;
      }
      if (name == "begin" || name == "end") {
        auto g = tex::read_brace_group(s, p);
        if (g) {
          std::string env(g->content(s));
          p = g->end;
          if (name == "begin") {
            p = detail::skip_group_arguments(s, p, detail::env_has_argument(env) ? 1 : 0);
          }
        }
        out += ' ';
        i = p;
        continue;
      }
      if (name == "item") {
        out += ' ';
        i = p;
        continue;
      }
      if (name == "href") {
        if (auto g = tex::read_brace_group(s, tex::skip_spaces(s, p))) p = g->end;
        i = p;
        continue;
      }
      if (auto sym = detail::symbol_word(name); !sym.empty()) {
        out.append(sym);
        i = p;
        continue;
      }
      if (int arity = detail::dropped_arity(name); arity >= 0) {
        i = detail::skip_group_arguments(s, p, arity);
        continue;
      }
      // Unknown command: the name goes, arguments stay.
      i = p;
      continue;
    }
    if (c == '{' || c == '}') {
      ++i;
      continue;
    }
    if (c == '~') {
      out += ' ';
    } else if ((c == '`' || c == '\'') && i + 1 < s.size() && s[i + 1] == c) {
      out += '"';
      ++i;
    } else {
      out += c;
    }
    ++i;
  }
  return text::collapse_whitespace(out);
}

// ---------------------------------------------------------------------------
// Theorem declarations

struct TheoremStyle {
  std::string counter;  // shared counter name
  std::string printed;  // "Lemma"
  bool numbered = true;
};

// \newtheorem{name}{Printed}[within], \newtheorem{name}[shared]{Printed},
// \newtheorem*{name}{Printed} and \declaretheorem[name=Printed]{name}.
inline std::map<std::string, TheoremStyle> scan_theorem_declarations(std::string_view s) {
  std::map<std::string, TheoremStyle> out;
  for (std::size_t i = s.find('\\'); i != std::string_view::npos; i = s.find('\\', i + 1)) {
    auto cs = tex::read_control_sequence(s, i);
    if (cs.name == "newtheorem") {
      std::size_t p = cs.end;
      bool starred = p < s.size() && s[p] == '*';
      if (starred) ++p;
      auto name = tex::read_brace_group(s, tex::skip_spaces(s, p));
      if (!name) continue;
      p = name->end;
      std::string shared;
      if (auto opt = tex::read_bracket_group(s, tex::skip_spaces(s, p))) {
        shared = std::string(text::trim(opt->content(s)));
        p = opt->end;
      }
      auto printed = tex::read_brace_group(s, tex::skip_spaces(s, p));
      if (!printed) continue;
      std::string key(text::trim(name->content(s)));
      out[key] = {shared.empty() ? key : shared, latex_to_text(printed->content(s)), !starred};
      i = printed->end - 1;
    } else if (cs.name == "declaretheorem") {
      std::size_t p = cs.end;
      std::string printed;
      if (auto opt = tex::read_bracket_group(s, tex::skip_spaces(s, p))) {
        std::smatch m;
        std::string opts(opt->content(s));
        if (std::regex_search(opts, m, std::regex(R"(name\s*=\s*([^,\]]+))"))) printed = text::collapse_whitespace(m[1].str());
        p = opt->end;
      }
      auto name = tex::read_brace_group(s, tex::skip_spaces(s, p));
      if (!name) continue;
      std::string key(text::trim(name->content(s)));
      if (printed.empty() && !key.empty()) {
        printed = key;
        printed[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(printed[0])));
      }
      out[key] = {key, printed, true};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building

struct BuildOptions {
  const classify::AliasTable* aliases = nullptr;  // built-in table when null
  classify::ExternalTagger* tagger = nullptr;
  bibres::FieldTagger* field_tagger = nullptr;
};

namespace detail {

inline constexpr char kMarkOpen = '\x1e';
inline constexpr char kMarkClose = '\x1f';

struct RefTarget {
  std::optional<std::string> object_id;
  std::string word;     // "Table", "Lemma", "Section", "Equation"
  std::string number;   // "??" when unnumbered
};

inline bool is_float_kind(ObjectKind k) {
  return k == ObjectKind::kTable || k == ObjectKind::kFigure || k == ObjectKind::kAlgorithm;
}

inline std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline const parse::EnvironmentBlock* first_tabular(const parse::EnvironmentBlock& b, std::size_t* count) {
  const parse::EnvironmentBlock* found = nullptr;
  if (postprocess::detail::is_tabular_env(b.env_name)) {
    ++*count;
    return &b;
  }
  for (const auto& c : b.children) {
    if (auto f = first_tabular(c, count); f && !found) found = f;
  }
  return found;
}

class Builder {
 public:
  Builder(const BuildOptions& opts, Warnings* warnings)
      : opts_(opts), warnings_(warnings), aliases_(opts.aliases ? *opts.aliases : classify::AliasTable::builtin()) {}

  PaperDocument build(const ingest::SourceBundle& bundle, const ingest::NormalizedSource& src,
                      const std::optional<Metadata>& sidecar) {
    PaperDocument doc;
    doc.paper_id = bundle.paper_id;
    const std::string& full = src.text;

    theorems_ = scan_theorem_declarations(full);
    for (const auto& [name, style] : theorems_) {
      try {
        aliases_.add(name, ObjectKind::kTheorem);
      } catch (const Error&) {
        warn(warnings_, "theorem environment '" + name + "' already maps to another kind");
      }
    }

    std::string_view body = full;
    if (std::size_t b = full.find("\\begin{document}"); b != std::string::npos) {
      std::size_t start = b + 16;
      std::size_t e = full.find("\\end{document}", start);
      body = std::string_view(full).substr(start, (e == std::string::npos ? full.size() : e) - start);
    }

    doc.metadata = sidecar ? *sidecar : metadata_from_source(full);

    auto blocks = parse::extract_blocks(body);
    std::vector<Edit> edits;
    walk(blocks, edits, doc);
    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
    std::string rewritten;
    std::size_t copied = 0;
    for (const auto& e : edits) {
      rewritten.append(body.substr(copied, e.begin - copied));
      rewritten += e.replacement;
      copied = e.end;
    }
    rewritten.append(body.substr(copied));

    number_objects(doc);
    collect_section_labels(rewritten);

    // Object payloads that need reference resolution are rendered only now.
    for (std::size_t k = 0; k < doc.objects.size(); ++k) {
      auto& o = doc.objects[k];
      if (pending_text_[k]) o.text = render_fragment(*pending_text_[k]);
      if (o.caption) o.caption = render_fragment(*o.caption);
      o.has_content = payload_has_content(o);
    }

    build_mention_index(doc);
    auto tree = parse::parse_sections(
        rewritten, [&](std::string_view raw) { return process_paragraph(raw); },
        [&](std::string_view t) { return latex_to_text(postprocess::escape_reserved(t)); });
    doc.body = std::move(tree.root);
    if (tree.abstract && abstract_raw_.empty()) abstract_raw_ = *tree.abstract;
    doc.abstract = render_fragment(abstract_raw_);
    doc.word_count = count_body_words(doc.body);
    doc.dangling_refs.assign(dangling_.begin(), dangling_.end());
    doc.bib = collect_bib(bundle, full);
    return doc;
  }

 private:
  struct Edit {
    std::size_t begin, end;
    std::string replacement;
  };

  Metadata metadata_from_source(std::string_view full) {
    Metadata m;
    std::vector<std::pair<std::size_t, std::size_t>> none;
    if (auto t = parse::detail::find_command_argument(full, "title", none)) m.title = latex_to_text(*t);
    if (auto a = parse::detail::find_command_argument(full, "author", none)) {
      std::string raw = *a;
      text::replace_all(raw, "\\and", "\n\\AND\n");
      std::vector<std::string> chunks;
      std::size_t b = 0;
      while (b <= raw.size()) {
        std::size_t e = raw.find("\\AND", b);
        if (e == std::string::npos) e = raw.size();
        chunks.push_back(raw.substr(b, e - b));
        b = e + 4;
      }
      for (auto chunk : chunks) {
        // Affiliations follow the first line break.
        if (std::size_t lb = chunk.find("\\\\"); lb != std::string::npos) chunk.erase(lb);
        std::string plain = latex_to_text(chunk);
        text::replace_all(plain, " and ", ",");
        text::replace_all(plain, "&", ",");
        std::size_t b2 = 0;
        while (b2 <= plain.size()) {
          std::size_t e2 = plain.find(',', b2);
          if (e2 == std::string::npos) e2 = plain.size();
          std::string name(text::trim(std::string_view(plain).substr(b2, e2 - b2)));
          if (!name.empty()) m.authors.push_back(std::move(name));
          b2 = e2 + 1;
        }
      }
    }
    if (auto d = parse::detail::find_command_argument(full, "date", none)) m.date = latex_to_text(*d);
    return m;
  }

  void walk(const std::vector<parse::EnvironmentBlock>& blocks, std::vector<Edit>& edits, PaperDocument& doc) {
    for (const auto& b : blocks) {
      std::string norm = classify::normalize_env_name(b.env_name);
      if (norm == "abstract") {
        abstract_raw_ = std::string(text::trim(b.body));
        edits.push_back({b.begin, b.end, "\n\n"});
        continue;
      }
      if (norm == "thebibliography") {
        inline_bib_ += b.body;
        inline_bib_ += '\n';
        edits.push_back({b.begin, b.end, "\n\n"});
        continue;
      }
      ObjectKind kind = classify::classify_with_plugin(b.env_name, b.body, opts_.tagger, aliases_, warnings_);
      if (kind == ObjectKind::kOther) {
        walk(b.children, edits, doc);
        continue;
      }
      add_object(b, kind, doc);
      if (kind == ObjectKind::kEquation) {
        // The equation stays in the running text, minus its labels.
        std::string stripped = strip_labels(b.body);
        if (stripped.size() != b.body.size()) {
          edits.push_back({b.body_begin, b.body_end, std::move(stripped)});
        }
      } else {
        edits.push_back({b.begin, b.end, is_float_kind(kind) ? " " : "\n\n"});
      }
    }
  }

  static std::string strip_labels(std::string_view s) {
    std::string out;
    std::size_t copied = 0;
    for (std::size_t i = s.find("\\label"); i != std::string_view::npos; i = s.find("\\label", i + 1)) {
      auto cs = tex::read_control_sequence(s, i);
      if (cs.name != "label") continue;
      auto g = tex::read_brace_group(s, cs.end);
      if (!g) continue;
      out.append(s.substr(copied, i - copied));
      copied = g->end;
      i = g->end - 1;
    }
    out.append(s.substr(copied));
    return out;
  }

  void add_object(const parse::EnvironmentBlock& b, ObjectKind kind, PaperDocument& doc) {
    PaperObject o;
    o.kind = kind;
    o.env_name = b.env_name;
    o.label = b.label;
    o.caption = b.caption;
    std::optional<std::string> pending;
    switch (kind) {
      case ObjectKind::kTable: {
        std::size_t count = 0;
        if (auto t = first_tabular(b, &count)) {
          if (count > 1) warn(warnings_, doc.paper_id + ": " + b.env_name + " holds several tabulars; using the first");
          try {
            o.table = postprocess::linearize_table(postprocess::tabular_content(t->env_name, t->body));
          } catch (const Error& e) {
            warn(warnings_, doc.paper_id + ": " + e.what());
          }
        }
        break;
      }
      case ObjectKind::kFigure:
        o.image_paths = postprocess::extract_figure_paths(b).image_paths;
        break;
      case ObjectKind::kEquation:
        o.text = std::string(text::trim(strip_labels(b.body)));
        break;
      case ObjectKind::kVerbatim:
        o.text = std::string(text::trim(b.body));
        break;
      default:
        pending = b.body;
        break;
    }
    doc.objects.push_back(std::move(o));
    pending_text_.push_back(std::move(pending));
    envs_.push_back(classify::normalize_env_name(b.env_name));
    starred_.push_back(b.env_name.find('*') != std::string::npos);
  }

  void number_objects(PaperDocument& doc) {
    std::map<std::string, int> counters;
    std::map<std::string, int> ordinals;
    std::set<std::string> used;
    for (const auto& o : doc.objects) {
      if (o.label) used.insert(*o.label);
    }
    std::set<std::string> taken;
    for (std::size_t k = 0; k < doc.objects.size(); ++k) {
      auto& o = doc.objects[k];
      const std::string kind = classify::kind_name(o.kind);
      std::string word = capitalized(kind);
      std::optional<std::string> counter;
      if (is_float_kind(o.kind)) {
        if (!is_nested_float(envs_[k])) counter = kind;
      } else if (o.kind == ObjectKind::kEquation) {
        if (!starred_[k] && envs_[k] != "displaymath") counter = "equation";
      } else if (o.kind == ObjectKind::kTheorem) {
        auto it = theorems_.find(o.env_name);
        if (it != theorems_.end()) {
          word = it->second.printed;
          if (it->second.numbered) counter = it->second.counter;
        } else {
          word = capitalized(envs_[k]);
        }
      }
      if (counter) o.number = std::to_string(++counters[*counter]);

      int ordinal = ++ordinals[kind];
      if (o.label && taken.insert(*o.label).second) {
        o.id = *o.label;
      } else {
        if (o.label) warn(warnings_, doc.paper_id + ": duplicate label " + *o.label);
        std::string id = kind + "-" + std::to_string(ordinal);
        while (used.count(id) || taken.count(id)) id += "'";
        taken.insert(id);
        o.id = id;
      }
      if (o.label && !labels_.count(*o.label)) {
        labels_[*o.label] = {o.id, word, o.number.value_or("??")};
      }
      object_words_.push_back(text::to_lower(word));
    }
  }

  static bool is_nested_float(std::string_view env) {
    return env == "subfigure" || env == "subtable";
  }

  // Section numbers follow \section / \subsection / \subsubsection order;
  // a \label before the next heading names the current section.
  void collect_section_labels(std::string_view s) {
    std::vector<int> numbers(3, 0);
    std::string current;
    for (std::size_t i = s.find('\\'); i != std::string_view::npos; i = s.find('\\', i + 1)) {
      auto cs = tex::read_control_sequence(s, i);
      int level = parse::detail::section_level(cs.name);
      if (level > 0) {
        std::size_t p = cs.end;
        if (p < s.size() && s[p] == '*') {
          current.clear();
          continue;
        }
        ++numbers[level - 1];
        for (int k = level; k < 3; ++k) numbers[k] = 0;
        current.clear();
        for (int k = 0; k < level; ++k) current += (k ? "." : "") + std::to_string(numbers[k]);
        continue;
      }
      if (cs.name == "label" && !current.empty()) {
        if (auto g = tex::read_brace_group(s, cs.end)) {
          std::string label(text::trim(g->content(s)));
          if (!labels_.count(label)) labels_[label] = {std::nullopt, "Section", current};
        }
      }
    }
  }

  void build_mention_index(const PaperDocument& doc) {
    std::set<std::string> words;
    for (std::size_t k = 0; k < doc.objects.size(); ++k) {
      const auto& o = doc.objects[k];
      if (!o.number || o.kind == ObjectKind::kEquation) continue;
      mentions_[{object_words_[k], *o.number}] = o.id;
      words.insert(object_words_[k]);
    }
    if (words.empty()) return;
    std::string alternatives;
    auto add = [&](const std::string& w) {
      if (!alternatives.empty()) alternatives += '|';
      for (char c : w) {
        if (!text::is_alnum(c) && c != ' ') alternatives += '\\';
        alternatives += c;
      }
    };
    // Longer words first so "figures" style prefixes never shadow.
    std::vector<std::string> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (const auto& w : sorted) add(w);
    for (const auto& [abbr, canonical] : kMentionAbbreviations) {
      if (words.count(canonical)) add(abbr);
    }
    mention_re_ = std::regex("(^|[^A-Za-z])(" + alternatives + ")\\s*(\\d+)", std::regex::icase);
  }

  inline static const std::vector<std::pair<std::string, std::string>> kMentionAbbreviations = {
      {"tab.", "table"}, {"fig.", "figure"}, {"alg.", "algorithm"}, {"thm.", "theorem"},
      {"lem.", "lemma"}, {"cor.", "corollary"}, {"prop.", "proposition"}, {"def.", "definition"}};

  std::vector<std::string> mentioned_objects(const std::string& sentence) const {
    std::vector<std::string> out;
    if (!mention_re_) return out;
    for (auto it = std::sregex_iterator(sentence.begin(), sentence.end(), *mention_re_); it != std::sregex_iterator();
         ++it) {
      std::string word = text::to_lower((*it)[2].str());
      for (const auto& [abbr, canonical] : kMentionAbbreviations) {
        if (word == abbr) word = canonical;
      }
      auto m = mentions_.find({word, (*it)[3].str()});
      if (m != mentions_.end()) out.push_back(m->second);
    }
    return out;
  }

  // \ref-family commands become printed numbers; with `refs` set, each
  // object reference also leaves a marker behind.
  std::string resolve_refs(std::string_view s, std::vector<std::string>* refs) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] == '$' || s[i] == '<') {
        if (std::size_t len = postprocess::detail::math_span_length(s, i)) {
          out.append(s.substr(i, len));
          i += len;
          continue;
        }
      }
      if (s[i] != '\\') {
        out += s[i++];
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      std::string_view name = cs.name;
      const bool plain = name == "ref" || name == "subref" || name == "vref";
      const bool paren = name == "eqref";
      const bool worded = name == "autoref" || name == "cref" || name == "Cref" || name == "Autoref";
      if (!plain && !paren && !worded) {
        out.append(s.substr(i, cs.end - i));
        i = cs.end;
        continue;
      }
      std::size_t p = cs.end;
      if (p < s.size() && s[p] == '*') ++p;
      auto g = tex::read_brace_group(s, p);
      if (!g) {
        out.append(s.substr(i, cs.end - i));
        i = cs.end;
        continue;
      }
      std::string_view list = g->content(s);
      std::string rendered;
      std::string marks;
      std::size_t b = 0;
      while (b <= list.size()) {
        std::size_t e = list.find(',', b);
        if (e == std::string_view::npos) e = list.size();
        std::string label(text::trim(list.substr(b, e - b)));
        b = e + 1;
        if (label.empty()) continue;
        if (!rendered.empty()) rendered += ", ";
        auto it = labels_.find(label);
        if (it == labels_.end()) {
          dangling_.insert(label);
          rendered += "??";
          continue;
        }
        const RefTarget& t = it->second;
        if (paren) {
          rendered += "(" + t.number + ")";
        } else if (worded) {
          rendered += t.word + " " + t.number;
        } else {
          rendered += t.number;
        }
        if (refs && t.object_id) {
          marks += kMarkOpen;
          marks += 'R' + std::to_string(refs->size());
          marks += kMarkClose;
          refs->push_back(*t.object_id);
        }
      }
      out += rendered + marks;
      i = g->end;
    }
    return out;
  }

  // escape -> equations -> citations -> emphasis -> references -> text
  std::string render(std::string_view raw, std::vector<std::string>* refs,
                     std::vector<std::vector<std::string>>* cites) {
    std::string s = postprocess::escape_reserved(raw);
    s = postprocess::normalize_equations(s, warnings_);
    auto scan = parse::extract_citations(s, warnings_);
    if (cites) {
      std::string marked;
      std::size_t copied = 0;
      std::size_t k = 0;
      while (k < scan.citations.size()) {
        std::size_t off = scan.citations[k].offset;
        std::vector<std::string> keys;
        while (k < scan.citations.size() && scan.citations[k].offset == off) keys.push_back(scan.citations[k++].key);
        std::size_t after = off + 6;  // "<cite>"
        marked.append(scan.text, copied, after - copied);
        marked += kMarkOpen;
        marked += 'C' + std::to_string(cites->size());
        marked += kMarkClose;
        cites->push_back(std::move(keys));
        copied = after;
      }
      marked.append(scan.text, copied);
      s = std::move(marked);
    } else {
      s = std::move(scan.text);
    }
    s = postprocess::mark_emphasis(s);
    s = resolve_refs(s, refs);
    return latex_to_text(s);
  }

  std::string render_fragment(std::string_view raw) { return render(raw, nullptr, nullptr); }

  std::optional<parse::Paragraph> process_paragraph(std::string_view raw) {
    std::vector<std::string> refs;
    std::vector<std::vector<std::string>> cites;
    std::string s = render(raw, &refs, &cites);
    parse::Paragraph p;
    for (auto& sentence : parse::split_sentences(s)) {
      std::string clean;
      std::vector<std::string> sentence_refs;
      std::size_t idx = p.sentences.size();
      for (std::size_t k = 0; k < sentence.size(); ++k) {
        if (sentence[k] != kMarkOpen) {
          clean += sentence[k];
          continue;
        }
        std::size_t close = sentence.find(kMarkClose, k);
        char type = sentence[k + 1];
        std::size_t n = std::stoul(sentence.substr(k + 2, close - k - 2));
        if (type == 'R') {
          sentence_refs.push_back(refs[n]);
        } else {
          for (const auto& key : cites[n]) p.cite_marks.emplace_back(idx, key);
        }
        k = close;
      }
      clean = text::collapse_whitespace(clean);
      if (clean.empty()) continue;
      for (auto& id : mentioned_objects(clean)) sentence_refs.push_back(std::move(id));
      std::set<std::string> seen;
      for (auto& id : sentence_refs) {
        if (seen.insert(id).second) p.object_refs.emplace_back(idx, id);
      }
      p.sentences.push_back(std::move(clean));
    }
    if (p.sentences.empty()) return std::nullopt;
    return p;
  }

  // Inline thebibliography, then .bbl files, then the .bib files named by
  // \bibliography (every .bib when none is named). First key wins.
  std::vector<bibres::BibEntry> collect_bib(const ingest::SourceBundle& bundle, std::string_view full) {
    std::vector<bibres::BibEntry> all;
    auto take = [&](std::string_view text_in) {
      for (auto& e : bibres::parse_bib_entries(text_in, warnings_)) all.push_back(std::move(e));
    };
    if (!inline_bib_.empty()) take(inline_bib_);
    for (const auto& [path, body] : bundle.files) {
      if (path.ends_with(".bbl")) take(body);
    }
    std::set<std::string> named;
    std::vector<std::pair<std::size_t, std::size_t>> none;
    if (auto arg = parse::detail::find_command_argument(full, "bibliography", none)) {
      std::size_t b = 0;
      while (b <= arg->size()) {
        std::size_t e = arg->find(',', b);
        if (e == std::string::npos) e = arg->size();
        std::string stem(text::trim(std::string_view(*arg).substr(b, e - b)));
        if (!stem.empty()) named.insert(stem.ends_with(".bib") ? stem.substr(0, stem.size() - 4) : stem);
        b = e + 1;
      }
    }
    auto stem_of = [](const std::string& path) {
      std::filesystem::path p(path);
      return (p.parent_path() / p.stem()).generic_string();
    };
    bool any_named = false;
    for (const auto& [path, body] : bundle.files) {
      if (path.ends_with(".bib") && named.count(stem_of(path))) any_named = true;
    }
    for (const auto& [path, body] : bundle.files) {
      if (!path.ends_with(".bib")) continue;
      if (any_named && !named.count(stem_of(path))) continue;
      take(body);
    }
    std::vector<bibres::BibEntry> out;
    std::set<std::string> keys;
    for (auto& e : all) {
      if (!keys.insert(e.key).second) continue;
      if (e.fields.empty()) e = bibres::extract_fields(std::move(e), opts_.field_tagger, warnings_);
      out.push_back(std::move(e));
    }
    return out;
  }

  const BuildOptions& opts_;
  Warnings* warnings_;
  classify::AliasTable aliases_;
  std::map<std::string, TheoremStyle> theorems_;
  std::string abstract_raw_;
  std::string inline_bib_;
  std::vector<std::optional<std::string>> pending_text_;
  std::vector<std::string> envs_;
  std::vector<bool> starred_;
  std::vector<std::string> object_words_;
  std::map<std::string, RefTarget> labels_;
  std::map<std::pair<std::string, std::string>, std::string> mentions_;
  std::optional<std::regex> mention_re_;
  std::set<std::string> dangling_;
};

}  // namespace detail

inline PaperDocument build_document(const ingest::SourceBundle& bundle, const ingest::NormalizedSource& src,
                                    const std::optional<Metadata>& sidecar = std::nullopt,
                                    const BuildOptions& opts = {}, Warnings* warnings = nullptr) {
  detail::Builder builder(opts, warnings);
  return builder.build(bundle, src, sidecar);
}

// metadata.json next to the sources: {"title", "authors", "categories", "date"}.
inline std::optional<Metadata> read_metadata_sidecar(const std::filesystem::path& dir) {
  auto path = dir / "metadata.json";
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kIo, "malformed " + path.string());
  Metadata m;
  m.title = j.value("title", "");
  m.authors = j.value("authors", std::vector<std::string>{});
  m.categories = j.value("categories", std::vector<std::string>{});
  m.date = j.value("date", "");
  return m;
}

// The whole per-paper chain from a directory or single .tex file.
inline PaperDocument build_from_path(const std::filesystem::path& path, const BuildOptions& opts = {},
                                     Warnings* warnings = nullptr) {
  auto bundle = ingest::load_bundle(path, warnings);
  auto src = ingest::normalize(bundle, warnings);
  std::optional<Metadata> sidecar;
  if (std::filesystem::is_directory(path)) sidecar = read_metadata_sidecar(path);
  return build_document(bundle, src, sidecar, opts, warnings);
}

}  // namespace texcorpus::corpus
