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

// Environment-name classification into the seven object kinds.

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/error.hpp"
#include "texcorpus/subprocess.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::classify {

enum class ObjectKind { kTable, kFigure, kEquation, kAlgorithm, kTheorem, kVerbatim, kText, kOther };

inline constexpr ObjectKind kObjectKinds[] = {ObjectKind::kTable,     ObjectKind::kFigure,  ObjectKind::kEquation,
                                              ObjectKind::kAlgorithm, ObjectKind::kTheorem, ObjectKind::kVerbatim,
                                              ObjectKind::kText};

inline const char* kind_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::kTable: return "table";
    case ObjectKind::kFigure: return "figure";
    case ObjectKind::kEquation: return "equation";
    case ObjectKind::kAlgorithm: return "algorithm";
    case ObjectKind::kTheorem: return "theorem";
    case ObjectKind::kVerbatim: return "verbatim";
    case ObjectKind::kText: return "text";
    case ObjectKind::kOther: return "other";
  }
  return "other";
}

inline std::optional<ObjectKind> parse_kind(std::string_view s) {
  std::string l = text::to_lower(s);
  for (ObjectKind k : kObjectKinds) {
    if (l == kind_name(k)) return k;
  }
  if (l == "other") return ObjectKind::kOther;
  return std::nullopt;
}

// Lowercase, drop every '*', then drop trailing digits.
inline std::string normalize_env_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c != '*') out += text::is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  while (!out.empty() && text::is_digit(out.back())) out.pop_back();
  return out;
}

class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::string version) : version_(std::move(version)) {}

  const std::string& version() const { return version_; }
  const std::map<std::string, ObjectKind>& entries() const { return entries_; }

  // Patterns are normalized on insertion. A pattern already mapped to a
  // different kind is rejected.
  void add(std::string_view pattern, ObjectKind kind) {
    std::string key = normalize_env_name(pattern);
    if (key.empty()) throw Error(ErrorCode::kInvalidArgument, "empty alias pattern '" + std::string(pattern) + "'");
    auto [it, inserted] = entries_.emplace(key, kind);
    if (!inserted && it->second != kind) {
      throw Error(ErrorCode::kInvalidArgument, "alias '" + key + "' maps to both " + kind_name(it->second) +
                                                   " and " + kind_name(kind));
    }
  }

  std::optional<ObjectKind> lookup(std::string_view env_name) const {
    auto it = entries_.find(normalize_env_name(env_name));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Built-in table.
  static const AliasTable& builtin() {
    static const AliasTable table = [] {
      AliasTable t("builtin-1");
      const std::pair<ObjectKind, std::vector<const char*>> groups[] = {
          {ObjectKind::kTable,
           {"table", "tabular", "tabularx", "tabulary", "longtable", "tabu", "supertabular", "sidewaystable",
            "wraptable", "threeparttable", "subtable"}},
          {ObjectKind::kFigure, {"figure", "subfigure", "wrapfigure", "sidewaysfigure", "scfigure"}},
          {ObjectKind::kEquation,
           {"equation", "align", "gather", "multline", "eqnarray", "flalign", "alignat", "displaymath", "dmath"}},
          {ObjectKind::kAlgorithm, {"algorithm", "algorithmic", "algo", "algorithmicx", "procedure", "pseudocode"}},
          {ObjectKind::kTheorem,
           {"theorem", "lemma", "proof", "corollary", "proposition", "definition", "remark", "claim", "conjecture",
            "example", "assumption", "observation", "fact", "hypothesis", "axiom", "problem", "thm", "lem", "prop",
            "defn", "cor"}},
          {ObjectKind::kVerbatim, {"verbatim", "lstlisting", "minted", "bverbatim", "alltt", "listing"}},
          {ObjectKind::kText, {"quote", "quotation", "itemize", "enumerate", "description", "verse", "displayquote"}},
          // Containers and math fragments. Listed so the content fallback
          // never promotes them.
          {ObjectKind::kOther,
           {"minipage", "center", "flushleft", "flushright", "document", "small", "footnotesize", "adjustbox",
            "landscape", "multicols", "aligned", "array", "cases", "split", "gathered", "alignedat", "matrix",
            "pmatrix", "bmatrix", "vmatrix", "subequations", "tikzpicture", "abstract", "thebibliography"}},
      };
      for (const auto& [kind, names] : groups) {
        for (const char* n : names) t.add(n, kind);
      }
      return t;
    }();
    return table;
  }

  // One `pattern kind` pair per line; blank lines and '#' comments skipped.
  static AliasTable parse(std::string_view config, std::string version = "config") {
    AliasTable t(std::move(version));
    std::istringstream in{std::string(config)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto words = text::split_words(line);
      if (words.empty()) continue;
      std::optional<ObjectKind> kind = words.size() == 2 ? parse_kind(words[1]) : std::nullopt;
      if (!kind) {
        throw Error(ErrorCode::kInvalidArgument, "alias line " + std::to_string(lineno) + ": expected 'pattern kind'");
      }
      t.add(words[0], *kind);
    }
    return t;
  }

  static AliasTable load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot read alias table " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

 private:
  std::string version_ = "empty";
  std::map<std::string, ObjectKind> entries_;
};

// Alias lookup first, then content: a tabular inside makes a Table, an
// image include makes a Figure, anything else is Other.
inline ObjectKind classify_env(std::string_view env_name, std::string_view body,
                               const AliasTable& table = AliasTable::builtin()) {
  if (auto k = table.lookup(env_name)) return *k;
  if (body.find("\\begin{tabular") != std::string_view::npos) return ObjectKind::kTable;
  if (body.find("\\includegraphics") != std::string_view::npos) return ObjectKind::kFigure;
  return ObjectKind::kOther;
}

// Contract for a pluggable classifier. Return nullopt to decline; throw
// Error(TaggerUnavailable) on failure.
class ExternalTagger {
 public:
  virtual ~ExternalTagger() = default;
  virtual std::optional<ObjectKind> classify(std::string_view env_name, std::string_view body) = 0;
};

inline ObjectKind classify_with_plugin(std::string_view env_name, std::string_view body, ExternalTagger* tagger,
                                       const AliasTable& table = AliasTable::builtin(),
                                       Warnings* warnings = nullptr) {
  if (tagger != nullptr) {
    try {
      if (auto k = tagger->classify(env_name, body)) return *k;
    } catch (const std::exception& e) {
      warn(warnings, "tagger failed on '" + std::string(env_name) + "': " + e.what());
    }
  }
  return classify_env(env_name, body, table);
}

// Speaks the line protocol: {"name":..,"body":..} in, {"kind":..} or
// {"decline":true} out.
class SubprocessTagger : public ExternalTagger {
 public:
  explicit SubprocessTagger(std::vector<std::string> argv) : proc_(std::move(argv)) {}

  std::optional<ObjectKind> classify(std::string_view env_name, std::string_view body) override {
    nlohmann::json req = {{"name", env_name}, {"body", body}};
    std::string reply = proc_.exchange(req.dump());
    nlohmann::json j = nlohmann::json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::kTaggerUnavailable, "tagger reply is not a JSON object");
    }
    if (j.value("decline", false)) return std::nullopt;
    if (auto it = j.find("kind"); it != j.end() && it->is_string()) {
      if (auto k = parse_kind(it->get<std::string>())) return k;
    }
    throw Error(ErrorCode::kTaggerUnavailable, "tagger reply has no valid kind");
  }

 private:
  LineProcess proc_;
};

}  // namespace texcorpus::classify
