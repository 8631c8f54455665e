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

// Bibliography entries, field extraction, and linking entries to a metadata
// database by title edit distance plus author-form matching.

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/error.hpp"
#include "texcorpus/subprocess.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::bibres {

inline constexpr std::array<std::string_view, 13> kEntityNames = {
    "note",      "volume", "date",      "title",   "journal", "publisher", "tech",
    "institution", "pages", "location", "booktitle", "editor", "author"};

inline bool is_entity_name(std::string_view s) {
  return std::find(kEntityNames.begin(), kEntityNames.end(), s) != kEntityNames.end();
}

struct BibEntry {
  std::string key;
  std::string raw;
  std::map<std::string, std::string> fields;  // keys drawn from kEntityNames
};

// ---------------------------------------------------------------------------
// LaTeX to plain text for bibliography strings

namespace detail {

inline bool is_accent_symbol(char c) {
  return c == '"' || c == '\'' || c == '`' || c == '^' || c == '~' || c == '=' || c == '.';
}

inline bool is_accent_word(std::string_view w) {
  return w == "u" || w == "v" || w == "H" || w == "c" || w == "k" || w == "r" || w == "d" || w == "b" || w == "t";
}

inline std::string_view special_letter(std::string_view w) {
  static const std::map<std::string_view, std::string_view> kLetters = {
      {"ss", "ss"}, {"o", "o"}, {"O", "O"}, {"l", "l"}, {"L", "L"}, {"ae", "ae"}, {"AE", "AE"},
      {"oe", "oe"}, {"OE", "OE"}, {"aa", "a"}, {"AA", "A"}, {"i", "i"}, {"j", "j"}};
  auto it = kLetters.find(w);
  return it == kLetters.end() ? std::string_view{} : it->second;
}

}  // namespace detail

// Accent commands drop to their base letter, other commands lose their name
// but keep their arguments, braces go, ~ is a space, and TeX quotes become
// '"'. \newblock is kept as a marker for field splitting.
inline std::string bib_plain(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\' && i + 1 < s.size()) {
      char n = s[i + 1];
      if (detail::is_accent_symbol(n)) {
        i += 2;
        continue;
      }
      if (n == '&' || n == '%' || n == '$' || n == '#' || n == '_' || n == '{' || n == '}') {
        out += n;
        i += 2;
        continue;
      }
      auto cs = tex::read_control_sequence(s, i);
      if (cs.name == "newblock") {
        out += " \\newblock ";
        i = cs.end;
        continue;
      }
      if (auto letter = detail::special_letter(cs.name); !letter.empty()) {
        out.append(letter);
        i = cs.end;
        if (i < s.size() && s[i] == ' ') ++i;
        continue;
      }
      if (detail::is_accent_word(cs.name)) {
        i = cs.end;
        if (i < s.size() && s[i] == ' ') ++i;
        continue;
      }
      if (cs.name == "\\") out += ' ';
      i = cs.end;
      if (!cs.name.empty() && tex::is_letter(cs.name[0]) && i < s.size() && s[i] == ' ') ++i;
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
// Entry parsing

namespace detail {

inline std::string map_bib_field(std::string_view name) {
  std::string n = text::to_lower(name);
  if (n == "year" || n == "date") return "date";
  if (n == "address" || n == "location") return "location";
  if (n == "school" || n == "organization" || n == "institution") return "institution";
  if (n == "type") return "tech";
  if (is_entity_name(n)) return n;
  return {};
}

// Reads one field value: {..}, ".." or a bare word, joined by '#'.
inline std::optional<std::pair<std::string, std::size_t>> read_bib_value(std::string_view s, std::size_t p) {
  std::string value;
  for (;;) {
    p = tex::skip_spaces(s, p);
    if (p >= s.size()) return std::nullopt;
    if (s[p] == '{') {
      auto close = tex::find_matching_brace(s, p);
      if (!close) return std::nullopt;
      value.append(s.substr(p + 1, *close - p - 1));
      p = *close + 1;
    } else if (s[p] == '"') {
      std::size_t q = p + 1;
      int depth = 0;
      while (q < s.size() && !(s[q] == '"' && depth == 0)) {
        if (s[q] == '\\') ++q;
        else if (s[q] == '{') ++depth;
        else if (s[q] == '}') --depth;
        ++q;
      }
      if (q >= s.size()) return std::nullopt;
      value.append(s.substr(p + 1, q - p - 1));
      p = q + 1;
    } else {
      std::size_t q = p;
      while (q < s.size() && s[q] != ',' && s[q] != '}' && s[q] != ')' && s[q] != '#' && !text::is_space(s[q])) ++q;
      if (q == p) return std::nullopt;
      value.append(s.substr(p, q - p));
      p = q;
    }
    p = tex::skip_spaces(s, p);
    if (p < s.size() && s[p] == '#') {
      ++p;
      continue;
    }
    return std::make_pair(value, p);
  }
}

inline std::vector<BibEntry> parse_bib(std::string_view s, Warnings* warnings) {
  std::vector<BibEntry> out;
  std::size_t i = 0;
  while ((i = s.find('@', i)) != std::string_view::npos) {
    std::size_t p = i + 1;
    while (p < s.size() && text::is_alpha(s[p])) ++p;
    std::string type = text::to_lower(s.substr(i + 1, p - i - 1));
    p = tex::skip_spaces(s, p);
    if (type.empty() || p >= s.size() || (s[p] != '{' && s[p] != '(')) {
      ++i;
      continue;
    }
    const char close_char = s[p] == '{' ? '}' : ')';
    std::size_t close = std::string_view::npos;
    if (close_char == '}') {
      if (auto c = tex::find_matching_brace(s, p)) close = *c;
    } else {
      close = s.find(')', p);
    }
    if (close == std::string_view::npos) {
      warn(warnings, "unterminated @" + type + " entry at offset " + std::to_string(i));
      i = p;
      continue;
    }
    const std::size_t next = close + 1;
    if (type == "comment" || type == "string" || type == "preamble") {
      i = next;
      continue;
    }
    std::string_view body = s.substr(p + 1, close - p - 1);
    std::size_t comma = body.find(',');
    BibEntry e;
    e.key = std::string(text::trim(body.substr(0, comma)));
    e.raw = std::string(s.substr(i, next - i));
    if (e.key.empty() || e.key.find_first_of(" \t\n=") != std::string::npos) {
      warn(warnings, "@" + type + " entry without a key at offset " + std::to_string(i));
      i = next;
      continue;
    }
    std::size_t q = comma == std::string_view::npos ? body.size() : comma + 1;
    bool ok = true;
    while (ok) {
      q = tex::skip_spaces(body, q);
      if (q >= body.size()) break;
      std::size_t eq = body.find('=', q);
      if (eq == std::string_view::npos) break;
      std::string name(text::trim(body.substr(q, eq - q)));
      auto value = read_bib_value(body, eq + 1);
      if (!value) {
        warn(warnings, "malformed field '" + name + "' in entry " + e.key);
        ok = false;
        break;
      }
      if (std::string mapped = map_bib_field(name); !mapped.empty() && !e.fields.count(mapped)) {
        std::string v = bib_plain(value->first);
        if (!v.empty()) e.fields[mapped] = v;
      }
      q = tex::skip_spaces(body, value->second);
      if (q < body.size() && body[q] == ',') ++q;
    }
    if (ok) out.push_back(std::move(e));
    i = next;
  }
  return out;
}

inline std::vector<BibEntry> parse_bbl(std::string_view s, Warnings* warnings) {
  std::vector<BibEntry> out;
  std::size_t stop = s.find("\\end{thebibliography}");
  if (stop == std::string_view::npos) stop = s.size();
  std::vector<std::size_t> starts;
  for (std::size_t p = s.find("\\bibitem"); p < stop; p = s.find("\\bibitem", p + 1)) {
    if (tex::read_control_sequence(s, p).name == "bibitem") starts.push_back(p);
  }
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::size_t end = k + 1 < starts.size() ? starts[k + 1] : stop;
    std::size_t p = tex::read_control_sequence(s, starts[k]).end;
    if (auto opt = tex::read_bracket_group(s, p)) p = opt->end;
    auto key = tex::read_brace_group(s, p);
    if (!key || key->end > end || text::trim(key->content(s)).empty()) {
      warn(warnings, "\\bibitem without a key at offset " + std::to_string(starts[k]));
      continue;
    }
    BibEntry e;
    e.key = std::string(text::trim(key->content(s)));
    e.raw = text::collapse_whitespace(s.substr(key->end, end - key->end));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

// .bbl text (\bibitem blocks) or .bib text (@type{key, ...}). .bib fields are
// mapped onto the entity names; .bbl entries carry raw text only.
inline std::vector<BibEntry> parse_bib_entries(std::string_view s, Warnings* warnings = nullptr) {
  if (s.find("\\bibitem") != std::string_view::npos) return detail::parse_bbl(s, warnings);
  return detail::parse_bib(s, warnings);
}

// ---------------------------------------------------------------------------
// Field extraction

using Span = std::pair<std::size_t, std::size_t>;

// Contract for a pluggable entity tagger. Returns entity -> [begin, end)
// byte spans into raw, or nullopt to decline; throws on failure.
class FieldTagger {
 public:
  virtual ~FieldTagger() = default;
  virtual std::optional<std::map<std::string, Span>> tag(std::string_view raw) = 0;
};

// Line protocol: {"raw":..} in, {"fields":{"title":[b,e],..}} or
// {"decline":true} out.
class SubprocessFieldTagger : public FieldTagger {
 public:
  explicit SubprocessFieldTagger(std::vector<std::string> argv) : proc_(std::move(argv)) {}

  std::optional<std::map<std::string, Span>> tag(std::string_view raw) override {
    nlohmann::json req = {{"raw", raw}};
    nlohmann::json j = nlohmann::json::parse(proc_.exchange(req.dump()), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kTaggerUnavailable, "tagger reply is not JSON");
    if (j.value("decline", false)) return std::nullopt;
    auto it = j.find("fields");
    if (it == j.end() || !it->is_object()) throw Error(ErrorCode::kTaggerUnavailable, "tagger reply has no fields");
    std::map<std::string, Span> spans;
    for (const auto& [name, v] : it->items()) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
        throw Error(ErrorCode::kTaggerUnavailable, "bad span for " + name);
      }
      spans[name] = {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
    }
    return spans;
  }

 private:
  LineProcess proc_;
};

namespace detail {

inline bool is_bib_abbreviation(std::string_view token) {
  static const std::set<std::string_view> kAbbrev = {
      "al.",    "Proc.",  "Conf.",  "Int.",   "Intl.",  "Trans.", "J.",     "Assoc.", "Comput.", "Linguist.",
      "Univ.",  "Dept.",  "Inc.",   "Ltd.",   "Co.",    "Jr.",    "Sr.",    "St.",    "pp.",     "vol.",
      "Vol.",   "no.",    "No.",    "ed.",    "eds.",   "Ed.",    "Eds.",   "Symp.",  "Annu.",   "Meet.",
      "Res.",   "Rev.",   "Lett.",  "Sci.",   "Eng.",   "Inf.",   "Syst.",  "Lang.",  "Natl.",   "Acad.",
      "Am.",    "Phys.",  "Math.",  "Stat.",  "Mach.",  "Learn.", "Intell.", "Artif.", "Tech.",  "Rep.",
      "Comp.",  "Process.", "Adv.", "e.g.", "i.e.", "vs.", "et.", "Jan.", "Feb.",
      "Mar.",   "Apr.",   "Aug.",   "Sep.",   "Sept.",  "Oct.",   "Nov.",   "Dec.", "Nat.", "Soc."};
  // Initials: "J.", "J.-P.", "Ch."-style single letters, possibly joined.
  bool initial = !token.empty();
  for (std::size_t k = 0; k < token.size(); ++k) {
    char c = token[k];
    if (text::is_upper(c)) {
      if (k + 1 >= token.size() || token[k + 1] != '.') initial = false;
    } else if (c != '.' && c != '-') {
      initial = false;
    }
  }
  return initial || kAbbrev.count(token) > 0;
}

// Splits on \newblock when present, else on ". " after anything that is
// not an initial or a known abbreviation. Blocks keep no trailing period.
inline std::vector<std::string> split_blocks(std::string_view s) {
  std::vector<std::string> blocks;
  auto push = [&](std::string_view b) {
    b = text::trim(b);
    while (!b.empty() && (b.back() == '.' || b.back() == ',')) b = text::trim(b.substr(0, b.size() - 1));
    if (!b.empty()) blocks.emplace_back(b);
  };
  if (s.find("\\newblock") != std::string_view::npos) {
    std::size_t b = 0;
    for (std::size_t p = s.find("\\newblock"); p != std::string_view::npos; p = s.find("\\newblock", b)) {
      push(s.substr(b, p - b));
      b = p + 9;
    }
    push(s.substr(b));
    return blocks;
  }
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (quoted || s[i] != '.') continue;
    if (i + 1 < s.size() && !text::is_space(s[i + 1])) continue;
    std::size_t tb = i;
    while (tb > start && !text::is_space(s[tb - 1])) --tb;
    if (is_bib_abbreviation(s.substr(tb, i + 1 - tb))) continue;
    push(s.substr(start, i - start));
    start = i + 1;
  }
  push(s.substr(start));
  return blocks;
}

inline bool is_year_block(std::string_view b) {
  static const std::regex kYear(R"(^\(?(19|20)\d\d[a-z]?\)?$)");
  return std::regex_match(b.begin(), b.end(), kYear);
}

inline void heuristic_fields(std::string_view raw, std::map<std::string, std::string>& fields) {
  std::string plain = bib_plain(raw);
  if (plain.find('.') == std::string::npos) return;
  auto blocks = split_blocks(plain);
  std::string no_markers = plain;
  text::replace_all(no_markers, " \\newblock ", " ");
  no_markers = text::collapse_whitespace(no_markers);

  if (!blocks.empty() && !is_year_block(blocks[0])) fields["author"] = blocks[0];

  static const std::regex kQuoted(R"re("([^"]+)")re");
  std::smatch m;
  if (std::regex_search(no_markers, m, kQuoted)) {
    std::string t(text::trim(m[1].str()));
    while (!t.empty() && (t.back() == ',' || t.back() == '.')) t.pop_back();
    if (!t.empty()) fields["title"] = t;
  } else {
    for (std::size_t k = 1; k < blocks.size(); ++k) {
      if (is_year_block(blocks[k])) continue;
      fields["title"] = blocks[k];
      break;
    }
  }
  for (std::size_t k = 2; k < blocks.size(); ++k) {
    if (blocks[k].rfind("In ", 0) == 0 && fields.count("title") && blocks[k] != fields["title"]) {
      static const std::regex kTrailer(R"(([,\s]\s*((19|20)\d\d[a-z]?|pp?\.\s*[0-9].*|pages\s.*))+$)");
      fields["booktitle"] = std::regex_replace(blocks[k].substr(3), kTrailer, "");
      break;
    }
  }

  static const std::regex kDate(R"((^|[^0-9])((19|20)\d\d)([^0-9]|$))");
  if (std::regex_search(no_markers, m, kDate)) fields["date"] = m[2].str();
  static const std::regex kPages(R"((?:pp?\.|pages)\s*([0-9]+\s*(?:-{1,2}|–)\s*[0-9]+|[0-9]+))");
  if (std::regex_search(no_markers, m, kPages)) fields["pages"] = m[1].str();
  static const std::regex kVolume(R"((?:[Vv]ol\.|[Vv]olume)\s*([0-9]+))");
  if (std::regex_search(no_markers, m, kVolume)) fields["volume"] = m[1].str();
}

}  // namespace detail

// With a tagger, adopts its spans (each must lie inside raw and name a known
// entity; bad spans are dropped with a warning). Without one, or when the
// tagger declines or fails, applies the heuristic rules. Fields already set
// (from .bib syntax) are kept.
inline BibEntry extract_fields(BibEntry entry, FieldTagger* tagger = nullptr, Warnings* warnings = nullptr) {
  std::map<std::string, std::string> found;
  bool tagged = false;
  if (tagger != nullptr) {
    try {
      if (auto spans = tagger->tag(entry.raw)) {
        tagged = true;
        for (const auto& [name, span] : *spans) {
          if (!is_entity_name(name) || span.first >= span.second || span.second > entry.raw.size()) {
            warn(warnings, "tagger span for '" + name + "' outside entry " + entry.key);
            continue;
          }
          found[name] = entry.raw.substr(span.first, span.second - span.first);
        }
      }
    } catch (const std::exception& e) {
      warn(warnings, std::string("field tagger failed on ") + entry.key + ": " + e.what());
    }
  }
  if (!tagged) detail::heuristic_fields(entry.raw, found);
  for (auto& [name, value] : found) entry.fields.emplace(name, std::move(value));
  return entry;
}

// ---------------------------------------------------------------------------
// Titles

// Lowercase, diacritics folded, punctuation deleted, whitespace collapsed;
// returned as code points.
inline std::u32string normalize_title(std::string_view title) {
  std::string plain = bib_plain(title);
  text::replace_all(plain, "\\newblock", " ");
  std::u32string out;
  bool space = false;
  for (char32_t cp : text::to_code_points(plain)) {
    cp = text::fold_diacritic(cp);
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      if (text::is_space(c)) {
        space = true;
        continue;
      }
      if (!text::is_alnum(c)) continue;
      cp = static_cast<char32_t>(text::to_lower(c));
    } else if (cp == 0xA0 || cp == 0x2009 || cp == 0x202F) {
      space = true;
      continue;
    } else if ((cp >= 0x2000 && cp <= 0x206F) || (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) {
      continue;  // general punctuation and Latin-1 symbols
    }
    if (space && !out.empty()) out.push_back(U' ');
    space = false;
    out.push_back(cp);
  }
  return out;
}

inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  const std::u32string& s = a.size() < b.size() ? a : b;
  const std::u32string& t = a.size() < b.size() ? b : a;
  std::vector<std::size_t> row(s.size() + 1);
  for (std::size_t k = 0; k <= s.size(); ++k) row[k] = k;
  for (std::size_t j = 1; j <= t.size(); ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t k = 1; k <= s.size(); ++k) {
      std::size_t up = row[k];
      row[k] = std::min({row[k] + 1, row[k - 1] + 1, diag + (s[k - 1] == t[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[s.size()];
}

// Levenshtein distance if it is at most `bound`, else nullopt. Only the band
// |i - j| <= bound is evaluated.
inline std::optional<std::size_t> bounded_levenshtein(const std::u32string& a, const std::u32string& b,
                                                      std::size_t bound) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if ((n > m ? n - m : m - n) > bound) return std::nullopt;
  constexpr std::size_t kInf = static_cast<std::size_t>(-1) / 2;
  std::vector<std::size_t> prev(m + 1, kInf);
  std::vector<std::size_t> cur(m + 1, kInf);
  for (std::size_t j = 0; j <= std::min(m, bound); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > bound ? i - bound : 0;
    const std::size_t hi = std::min(m, i + bound);
    std::fill(cur.begin(), cur.end(), kInf);
    if (lo == 0) cur[0] = i;
    std::size_t best = lo == 0 ? cur[0] : kInf;
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      std::size_t v = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      v = std::min({v, prev[j] + 1, cur[j - 1] + 1});
      cur[j] = v;
      best = std::min(best, v);
    }
    if (best > bound) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[m] > bound) return std::nullopt;
  return prev[m];
}

// Levenshtein over normalized titles divided by the longer length.
inline double title_distance(const std::u32string& a, const std::u32string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

inline double title_distance(std::string_view a, std::string_view b) {
  return title_distance(normalize_title(a), normalize_title(b));
}

// ---------------------------------------------------------------------------
// Names

struct PersonName {
  std::vector<std::string> given;  // normalized tokens
  std::string surname;             // normalized, may contain spaces
  std::string full() const {
    std::string s;
    for (const auto& g : given) s += g + " ";
    return s + surname;
  }
};

namespace detail {

// Folded, lowercase, '.' dropped, hyphens and other punctuation as spaces.
inline std::vector<std::string> name_tokens(std::string_view s) {
  std::string plain = bib_plain(s);
  std::string folded;
  for (char32_t cp : text::to_code_points(plain)) {
    cp = text::fold_diacritic(cp);
    if (cp == U'.') {
      folded += ' ';
      continue;
    }
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      folded += (text::is_alnum(c) || c == '\'') ? text::to_lower(c) : ' ';
    } else {
      text::append_utf8(folded, cp);
    }
  }
  std::vector<std::string> out;
  for (auto w : text::split_words(folded)) out.emplace_back(w);
  return out;
}

}  // namespace detail

// "First Middle Last" or "Last, First". Surname is the last token in the
// first form and everything before the comma in the second.
inline std::optional<PersonName> parse_person(std::string_view s) {
  PersonName p;
  std::size_t comma = s.find(',');
  if (comma != std::string_view::npos) {
    auto last = detail::name_tokens(s.substr(0, comma));
    if (last.empty()) return std::nullopt;
    p.surname = text::join(last, " ");
    p.given = detail::name_tokens(s.substr(comma + 1));
    return p;
  }
  auto tokens = detail::name_tokens(s);
  if (tokens.empty()) return std::nullopt;
  p.surname = tokens.back();
  tokens.pop_back();
  p.given = std::move(tokens);
  return p;
}

// Splits an author list on " and ", "&" and commas. A list of "Last, First"
// names joined by " and " keeps its commas.
inline std::vector<PersonName> parse_author_list(std::string_view field) {
  std::string s = bib_plain(field);
  static const std::regex kAnd(R"(\s+and\s+|\s*&\s*|,\s*and\s+)");
  std::vector<std::string> parts;
  for (std::sregex_token_iterator it(s.begin(), s.end(), kAnd, -1), end; it != end; ++it) parts.push_back(it->str());
  // "A. Smith, B. Jones, C. Doe" has no " and "-level structure beyond commas.
  std::vector<std::string> pieces;
  for (const auto& part : parts) {
    std::size_t commas = static_cast<std::size_t>(std::count(part.begin(), part.end(), ','));
    bool split = commas >= 2;
    if (commas == 1) {
      // "Smith, John" is one person; "John Smith, Ann Doe" is two.
      auto before = text::split_words(std::string_view(part).substr(0, part.find(',')));
      split = before.size() >= 2;
    }
    if (!split) {
      pieces.push_back(part);
      continue;
    }
    std::size_t b = 0;
    while (b <= part.size()) {
      std::size_t e = part.find(',', b);
      if (e == std::string::npos) e = part.size();
      pieces.push_back(part.substr(b, e - b));
      b = e + 1;
    }
  }
  std::vector<PersonName> out;
  for (const auto& piece : pieces) {
    std::string t(text::trim(piece));
    std::string lower = text::to_lower(t);
    if (lower.empty() || lower == "et al" || lower == "et al." || lower == "others") continue;
    if (lower.size() > 7 && lower.compare(lower.size() - 6, 6, "et al.") == 0) t = t.substr(0, t.size() - 6);
    else if (lower.size() > 6 && lower.compare(lower.size() - 5, 5, "et al") == 0) t = t.substr(0, t.size() - 5);
    if (auto p = parse_person(t)) out.push_back(std::move(*p));
  }
  return out;
}

// Equal normalized full names, or equal surnames with each given-name token
// of the shorter form a prefix of the corresponding token of the longer one.
inline bool names_match(const PersonName& a, const PersonName& b) {
  if (a.full() == b.full()) return true;
  if (a.surname != b.surname) return false;
  const std::size_t n = std::min(a.given.size(), b.given.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& x = a.given[k];
    const std::string& y = b.given[k];
    const std::string& shorter = x.size() <= y.size() ? x : y;
    const std::string& longer = x.size() <= y.size() ? y : x;
    if (longer.compare(0, shorter.size(), shorter) != 0) return false;
  }
  return true;
}

inline bool match_authors(const std::vector<PersonName>& a, const std::vector<PersonName>& b) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (names_match(x, y)) return true;
    }
  }
  return false;
}

// Each string is one person, "First Last" or "Last, First".
inline bool match_authors(const std::vector<std::string>& entry_authors,
                          const std::vector<std::string>& record_authors) {
  std::vector<PersonName> a;
  std::vector<PersonName> b;
  for (const auto& s : entry_authors) {
    if (auto p = parse_person(s)) a.push_back(std::move(*p));
  }
  for (const auto& s : record_authors) {
    if (auto p = parse_person(s)) b.push_back(std::move(*p));
  }
  return match_authors(a, b);
}

// ---------------------------------------------------------------------------
// Metadata database and resolution

struct MetadataRecord {
  std::string id;
  std::string title;
  std::vector<std::string> authors;
};

inline constexpr double kDefaultThreshold = 0.15;

inline void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1)");
}

// Immutable after construction; safe to share across threads.
class MetadataDb {
 public:
  MetadataDb() = default;
  explicit MetadataDb(std::vector<MetadataRecord> records) : records_(std::move(records)) {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < records_.size(); ++k) {
      const auto& r = records_[k];
      if (r.id.empty()) throw Error(ErrorCode::kInvalidDatabase, "record " + std::to_string(k) + " has an empty id");
      if (text::trim(r.title).empty()) throw Error(ErrorCode::kInvalidDatabase, "record " + r.id + " has no title");
      if (!seen.insert(r.id).second) throw Error(ErrorCode::kInvalidDatabase, "duplicate id " + r.id);
      normalized_.push_back(normalize_title(r.title));
      names_.emplace_back();
      for (const auto& a : r.authors) {
        if (auto p = parse_person(a)) names_.back().push_back(std::move(*p));
      }
      by_length_.emplace(normalized_.back().size(), k);
    }
  }

  // JSON lines: {"id": string, "title": string, "authors": [string]}.
  static MetadataDb parse_jsonl(std::string_view text_in) {
    std::vector<MetadataRecord> records;
    std::size_t lineno = 0;
    std::size_t b = 0;
    while (b < text_in.size()) {
      std::size_t e = text_in.find('\n', b);
      if (e == std::string_view::npos) e = text_in.size();
      std::string_view line = text::trim(text_in.substr(b, e - b));
      b = e + 1;
      ++lineno;
      if (line.empty()) continue;
      auto fail = [&](const std::string& why) {
        return Error(ErrorCode::kInvalidDatabase, "line " + std::to_string(lineno) + ": " + why);
      };
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw fail("not a JSON object");
      auto id = j.find("id");
      auto title = j.find("title");
      if (id == j.end() || !id->is_string()) throw fail("missing string id");
      if (title == j.end() || !title->is_string()) throw fail("missing string title");
      MetadataRecord r{id->get<std::string>(), title->get<std::string>(), {}};
      if (auto a = j.find("authors"); a != j.end()) {
        if (!a->is_array()) throw fail("authors is not an array");
        for (const auto& x : *a) {
          if (!x.is_string()) throw fail("author is not a string");
          r.authors.push_back(x.get<std::string>());
        }
      }
      records.push_back(std::move(r));
    }
    return MetadataDb(std::move(records));
  }

  static MetadataDb load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidDatabase, "cannot read database " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_jsonl(data);
  }

  const std::vector<MetadataRecord>& records() const { return records_; }
  const std::u32string& normalized_title(std::size_t k) const { return normalized_[k]; }
  const std::vector<PersonName>& record_names(std::size_t k) const { return names_[k]; }
  std::size_t size() const { return records_.size(); }

  // Record indices whose normalized title length lies in [lo, hi], in
  // database order.
  std::vector<std::size_t> with_length_between(std::size_t lo, std::size_t hi) const {
    std::vector<std::size_t> out;
    for (auto it = by_length_.lower_bound(lo); it != by_length_.end() && it->first <= hi; ++it) {
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<MetadataRecord> records_;
  std::vector<std::u32string> normalized_;
  std::vector<std::vector<PersonName>> names_;
  std::multimap<std::size_t, std::size_t> by_length_;
};

struct TitleMatch {
  std::size_t index = 0;  // into db.records()
  double distance = 0.0;
};

// All records within `threshold`, ascending by distance, ties in database
// order. Records whose length alone rules them out are never compared.
inline std::vector<TitleMatch> match_title(std::string_view title, const MetadataDb& db,
                                           double threshold = kDefaultThreshold) {
  check_threshold(threshold);
  std::u32string q = normalize_title(title);
  if (q.empty()) return {};
  // distance <= t needs |la - lb| <= t * max(la, lb), so lb lies in
  // [la * (1 - t), la / (1 - t)].
  const double la = static_cast<double>(q.size());
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(la * (1.0 - threshold))));
  const auto hi = static_cast<std::size_t>(std::ceil(la / (1.0 - threshold)));
  std::vector<TitleMatch> out;
  for (std::size_t k : db.with_length_between(lo, hi)) {
    const std::u32string& r = db.normalized_title(k);
    const std::size_t longest = std::max(q.size(), r.size());
    const auto bound = static_cast<std::size_t>(std::floor(threshold * static_cast<double>(longest) + 1e-9));
    auto d = bounded_levenshtein(q, r, bound);
    if (!d) continue;
    double dist = static_cast<double>(*d) / static_cast<double>(longest);
    if (dist <= threshold) out.push_back({k, dist});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
  return out;
}

struct ResolutionResult {
  std::string entry_key;
  std::optional<std::string> linked_id;  // nullopt is the -1 sentinel
  std::optional<double> distance;
  std::size_t candidates_considered = 0;
  bool title_only = false;  // entry had no authors, so none were checked
};

inline std::vector<PersonName> entry_authors(const BibEntry& e) {
  auto it = e.fields.find("author");
  return it == e.fields.end() ? std::vector<PersonName>{} : parse_author_list(it->second);
}

inline ResolutionResult resolve(const BibEntry& entry, const MetadataDb& db, double threshold = kDefaultThreshold) {
  check_threshold(threshold);
  ResolutionResult r;
  r.entry_key = entry.key;
  auto title = entry.fields.find("title");
  if (title == entry.fields.end() || normalize_title(title->second).empty()) return r;
  auto candidates = match_title(title->second, db, threshold);
  r.candidates_considered = candidates.size();
  auto authors = entry_authors(entry);
  r.title_only = authors.empty();
  for (const auto& c : candidates) {
    if (!authors.empty() && !match_authors(authors, db.record_names(c.index))) continue;
    r.linked_id = db.records()[c.index].id;
    r.distance = c.distance;
    break;
  }
  return r;
}

}  // namespace texcorpus::bibres
