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

// Naive whole-text macro substitution used as an independent oracle for
// ingest::expand_macros. It re-implements the documented call conventions
// directly on std::string, with no depth tracking, provenance or verbatim
// handling, and repeats full passes until the text stops changing.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

struct Macro {
  int arity = 0;
  std::optional<std::string> default_arg;
  std::string body;
};

using MacroSet = std::map<std::string, Macro>;

inline bool letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '@'; }
inline bool blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Index just past the balanced group opened at `at`, or npos.
inline std::size_t close_of(const std::string& t, std::size_t at, char open, char close) {
  int depth = 0;
  int braces = 0;
  for (std::size_t k = at; k < t.size(); ++k) {
    if (t[k] == '\\') {
      ++k;
      continue;
    }
    if (open == '{') {
      if (t[k] == '{') ++depth;
      if (t[k] == '}' && --depth == 0) return k + 1;
    } else {
      if (k == at) continue;
      if (t[k] == '{') ++braces;
      if (t[k] == '}') --braces;
      if (t[k] == close && braces <= 0) return k + 1;
    }
  }
  return std::string::npos;
}

inline std::size_t cs_end(const std::string& t, std::size_t at) {
  std::size_t j = at + 1;
  if (j >= t.size()) return t.size();
  if (letter(t[j])) {
    while (j < t.size() && letter(t[j])) ++j;
    return j;
  }
  return j + 1;
}

inline std::string naive_expand(std::string text, const MacroSet& macros, int max_passes = 1000) {
  for (int pass = 0; pass < max_passes; ++pass) {
    std::string out;
    bool changed = false;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] != '\\') {
        out += text[i++];
        continue;
      }
      std::size_t j = cs_end(text, i);
      std::string name = text.substr(i + 1, j - i - 1);
      auto found = macros.find(name);
      if (found == macros.end()) {
        out += text.substr(i, j - i);
        i = j;
        continue;
      }
      const Macro& m = found->second;
      std::vector<std::string> args;
      std::size_t p = j;
      for (int k = 0; k < m.arity; ++k) {
        std::size_t q = p;
        while (q < text.size() && blank(text[q])) ++q;
        if (k == 0 && m.default_arg) {
          std::size_t e = (q < text.size() && text[q] == '[') ? close_of(text, q, '[', ']') : std::string::npos;
          if (e != std::string::npos) {
            args.push_back(text.substr(q + 1, e - q - 2));
            p = e;
          } else {
            args.push_back(*m.default_arg);
          }
          continue;
        }
        if (q >= text.size() || text[q] == '}') {
          args.emplace_back();
          p = q;
        } else if (text[q] == '{') {
          std::size_t e = close_of(text, q, '{', '}');
          if (e == std::string::npos) {
            args.emplace_back();
            p = q;
          } else {
            args.push_back(text.substr(q + 1, e - q - 2));
            p = e;
          }
        } else if (text[q] == '\\') {
          std::size_t e = cs_end(text, q);
          args.push_back(text.substr(q, e - q));
          p = e;
        } else {
          auto lead = static_cast<unsigned char>(text[q]);
          std::size_t len = lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : lead >= 0xC0 ? 2 : 1;
          args.push_back(text.substr(q, len));
          p = q + len;
        }
      }
      for (std::size_t b = 0; b < m.body.size(); ++b) {
        char c = m.body[b];
        if (c == '#' && b + 1 < m.body.size()) {
          char n = m.body[b + 1];
          if (n == '#') {
            out += '#';
            ++b;
            continue;
          }
          if (n >= '1' && n <= '9' && n - '0' <= m.arity) {
            out += args[static_cast<std::size_t>(n - '1')];
            ++b;
            continue;
          }
        }
        out += c;
      }
      changed = true;
      i = p;
    }
    if (!changed) return text;
    text = std::move(out);
  }
  return text;
}

// Random acyclic macro tables: macro k may only call macros with a larger
// index, so every expansion terminates.
struct MacroCase {
  MacroSet macros;
  std::vector<std::string> order;
  std::string definitions;
  std::string body;
};

class MacroCaseGenerator {
 public:
  explicit MacroCaseGenerator(std::uint64_t seed) : rng_(seed) {}

  MacroCase next() {
    MacroCase mc;
    int n = uniform(1, 10);
    for (int k = 0; k < n; ++k) mc.order.push_back(std::string("m") + static_cast<char>('a' + k));
    macros_ = &mc.macros;
    for (int k = n - 1; k >= 0; --k) {
      Macro m;
      m.arity = uniform(0, 3);
      if (m.arity > 0 && uniform(0, 9) < 3) m.default_arg = piece_text(4);
      m.body = body_for(mc.order, k + 1, m.arity, 30);
      mc.macros[mc.order[static_cast<std::size_t>(k)]] = m;
    }
    for (int k = 0; k < n; ++k) {
      const std::string& name = mc.order[static_cast<std::size_t>(k)];
      const Macro& m = mc.macros[name];
      if (!m.default_arg && uniform(0, 3) == 0) {
        mc.definitions += "\\def\\" + name;
        for (int a = 1; a <= m.arity; ++a) mc.definitions += "#" + std::to_string(a);
        mc.definitions += "{" + m.body + "}\n";
      } else {
        mc.definitions += "\\newcommand{\\" + name + "}";
        if (m.arity > 0) mc.definitions += "[" + std::to_string(m.arity) + "]";
        if (m.default_arg) mc.definitions += "[" + *m.default_arg + "]";
        mc.definitions += "{" + m.body + "}\n";
      }
    }
    mc.body = text_for(mc.order, 200);
    return mc;
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string piece_text(int max_len) {
    static const std::string kChars = "abcxyz ABC,.()-=+01";
    std::string s;
    int len = uniform(1, max_len);
    for (int k = 0; k < len; ++k) s += kChars[static_cast<std::size_t>(uniform(0, static_cast<int>(kChars.size()) - 1))];
    return s;
  }

  // A call with arguments that match the macro's arity. Arguments never
  // contain calls, so no call can feed itself through an argument.
  std::string call(const MacroSet& macros, const std::vector<std::string>& names, std::size_t from) {
    const std::string& name =
        names[from + static_cast<std::size_t>(uniform(0, static_cast<int>(names.size() - from) - 1))];
    std::string s = "\\" + name;
    auto it = macros.find(name);
    const int arity = it == macros.end() ? 0 : it->second.arity;
    const bool optional = it != macros.end() && it->second.default_arg.has_value();
    for (int k = 0; k < arity; ++k) {
      if (k == 0 && optional) {
        if (uniform(0, 1) == 0) s += "[" + piece_text(2) + "]";
        continue;
      }
      switch (uniform(0, 3)) {
        case 0: s += " x"; break;
        case 1: s += " {" + piece_text(3) + "}"; break;
        default: s += "{" + piece_text(3) + "}"; break;
      }
    }
    return s;
  }

  std::string body_for(const std::vector<std::string>& names, std::size_t callable_from, int arity,
                       std::size_t max_len) {
    std::string body;
    for (int tries = 0; tries < 12; ++tries) {
      std::string piece;
      int kind = uniform(0, 5);
      if (kind == 0 && arity > 0) {
        piece = "#" + std::to_string(uniform(1, arity));
      } else if (kind == 1 && callable_from < names.size()) {
        piece = call(*macros_, names, callable_from);
      } else if (kind == 2) {
        piece = "{" + piece_text(4) + "}";
      } else if (kind == 3) {
        piece = "\\textbf";
      } else {
        piece = piece_text(5);
      }
      if (body.size() + piece.size() > max_len) break;
      body += piece;
    }
    return body;
  }

  std::string text_for(const std::vector<std::string>& names, std::size_t max_len) {
    std::string t;
    while (t.size() < max_len) {
      std::string piece;
      switch (uniform(0, 6)) {
        case 0:
        case 1: piece = call(*macros_, names, 0); break;
        case 2: piece = "\\" + names[static_cast<std::size_t>(uniform(0, static_cast<int>(names.size()) - 1))] + "q"; break;
        case 3: piece = "\n"; break;
        case 4: piece = "\\foo{" + piece_text(3) + "}"; break;
        default: piece = piece_text(8); break;
      }
      if (t.size() + piece.size() > max_len) break;
      t += piece;
    }
    return t;
  }

  std::mt19937_64 rng_;
  const MacroSet* macros_ = nullptr;
};

}  // namespace oracle
