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

// Corpus filters, statistics and the per-paper JSON record.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/document.hpp"
#include "texcorpus/error.hpp"

namespace texcorpus::corpus {

inline constexpr std::size_t kMinWords = 1000;
inline constexpr std::size_t kMaxWords = 12000;

// nullopt keeps the paper; otherwise the reject reason. Length is checked
// before structure.
inline std::optional<std::string> filter_paper(const PaperDocument& doc) {
  if (doc.word_count < kMinWords) return "too_short";
  if (doc.word_count > kMaxWords) return "too_long";
  if (!parse::has_real_sections(doc.body)) return "no_sections";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Statistics

struct KindStats {
  std::size_t count = 0;
  std::size_t with_content = 0;
  std::optional<double> percentage;  // undefined when count == 0
};

struct CorpusStats {
  std::size_t papers = 0;
  std::map<std::string, KindStats> kinds;  // every object kind, keyed by name
  std::size_t cite_marks = 0;
  std::size_t cite_marks_in_bib = 0;
  std::optional<double> citation_to_bib_rate;
  std::size_t bib_entries = 0;
  std::size_t bib_linked = 0;
  std::optional<double> bib_to_fulltext_rate;
  std::map<std::string, std::size_t> categories;
  std::map<std::string, std::size_t> rejects;
};

inline std::optional<double> percentage(std::size_t part, std::size_t whole) {
  if (whole == 0) return std::nullopt;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

inline CorpusStats compute_stats(const std::vector<PaperDocument>& corpus,
                                 const std::map<std::string, std::size_t>& rejects = {}) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no documents to summarize");
  CorpusStats s;
  s.papers = corpus.size();
  s.rejects = rejects;
  for (ObjectKind k : classify::kObjectKinds) {
    if (k != ObjectKind::kOther) s.kinds[classify::kind_name(k)];
  }
  for (const auto& doc : corpus) {
    for (const auto& o : doc.objects) {
      auto& ks = s.kinds[classify::kind_name(o.kind)];
      ++ks.count;
      if (o.has_content) ++ks.with_content;
    }
    std::set<std::string> keys;
    for (const auto& e : doc.bib) keys.insert(e.key);
    parse::for_each_section(doc.body, [&](const parse::SectionNode& sec) {
      for (const auto& p : sec.paragraphs) {
        for (const auto& [idx, key] : p.cite_marks) {
          ++s.cite_marks;
          if (keys.count(key)) ++s.cite_marks_in_bib;
        }
      }
    });
    s.bib_entries += doc.bib.size();
    for (const auto& l : doc.links) {
      if (l.linked_id) ++s.bib_linked;
    }
    for (const auto& c : doc.metadata.categories) ++s.categories[c];
  }
  for (auto& [name, ks] : s.kinds) ks.percentage = percentage(ks.with_content, ks.count);
  s.citation_to_bib_rate = percentage(s.cite_marks_in_bib, s.cite_marks);
  s.bib_to_fulltext_rate = percentage(s.bib_linked, s.bib_entries);
  return s;
}

// ---------------------------------------------------------------------------
// JSON

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson optional_string(const std::optional<std::string>& s) { return s ? ojson(*s) : ojson(nullptr); }

inline ojson optional_number(const std::optional<double>& d) { return d ? ojson(*d) : ojson(nullptr); }

inline ojson pairs_to_json(const std::vector<std::pair<std::size_t, std::string>>& v) {
  ojson a = ojson::array();
  for (const auto& [i, s] : v) a.push_back(ojson::array({i, s}));
  return a;
}

inline ojson paragraph_to_json(const parse::Paragraph& p) {
  ojson j;
  j["sentences"] = p.sentences;
  j["object_refs"] = pairs_to_json(p.object_refs);
  j["cite_marks"] = pairs_to_json(p.cite_marks);
  return j;
}

inline ojson paragraphs_to_json(const std::vector<parse::Paragraph>& ps) {
  ojson a = ojson::array();
  for (const auto& p : ps) a.push_back(paragraph_to_json(p));
  return a;
}

inline ojson section_to_json(const parse::SectionNode& s) {
  ojson j;
  j["title"] = s.title;
  j["level"] = s.level;
  j["paragraphs"] = paragraphs_to_json(s.paragraphs);
  j["children"] = ojson::array();
  for (const auto& c : s.children) j["children"].push_back(section_to_json(c));
  return j;
}

inline ojson payload_to_json(const PaperObject& o) {
  switch (o.kind) {
    case ObjectKind::kTable: {
      if (!o.table) return nullptr;
      ojson t;
      t["grid"] = o.table->grid;
      t["linear"] = o.table->linear;
      t["equal_columns"] = o.table->equal_columns;
      t["n_rows"] = o.table->n_rows;
      t["n_cols"] = o.table->n_cols;
      t["nested_flattened"] = o.table->nested_flattened;
      return t;
    }
    case ObjectKind::kFigure: return ojson{{"image_paths", o.image_paths}};
    case ObjectKind::kEquation: return ojson{{"latex", o.text}};
    default: return ojson{{"text", o.text}};
  }
}

template <typename J>
std::vector<std::pair<std::size_t, std::string>> pairs_from_json(const J& a) {
  std::vector<std::pair<std::size_t, std::string>> v;
  for (const auto& e : a) v.emplace_back(e.at(0).template get<std::size_t>(), e.at(1).template get<std::string>());
  return v;
}

template <typename J>
parse::Paragraph paragraph_from_json(const J& j) {
  parse::Paragraph p;
  p.sentences = j.at("sentences").template get<std::vector<std::string>>();
  p.object_refs = pairs_from_json(j.at("object_refs"));
  p.cite_marks = pairs_from_json(j.at("cite_marks"));
  return p;
}

template <typename J>
parse::SectionNode section_from_json(const J& j) {
  parse::SectionNode s;
  s.title = j.at("title").template get<std::string>();
  s.level = j.at("level").template get<int>();
  for (const auto& p : j.at("paragraphs")) s.paragraphs.push_back(paragraph_from_json(p));
  for (const auto& c : j.at("children")) s.children.push_back(section_from_json(c));
  return s;
}

template <typename J>
std::optional<std::string> optional_string_from(const J& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<std::string>();
}

}  // namespace detail

inline ojson link_to_json(const bibres::ResolutionResult& r) {
  ojson j;
  j["key"] = r.entry_key;
  j["id"] = r.linked_id ? ojson(*r.linked_id) : ojson(-1);
  j["distance"] = detail::optional_number(r.distance);
  j["candidates"] = r.candidates_considered;
  j["title_only"] = r.title_only;
  return j;
}

inline ojson object_to_json(const PaperObject& o) {
  ojson j;
  j["id"] = o.id;
  j["kind"] = classify::kind_name(o.kind);
  j["env"] = o.env_name;
  j["label"] = detail::optional_string(o.label);
  j["caption"] = detail::optional_string(o.caption);
  j["number"] = detail::optional_string(o.number);
  j["payload"] = detail::payload_to_json(o);
  j["has_content"] = o.has_content;
  return j;
}

// Key order is fixed here and mirrored by schemas/paper_document.schema.json.
inline ojson to_json(const PaperDocument& doc) {
  ojson j;
  j["paper_id"] = doc.paper_id;
  j["metadata"] = {{"title", doc.metadata.title},
                   {"authors", doc.metadata.authors},
                   {"categories", doc.metadata.categories},
                   {"date", doc.metadata.date}};
  j["abstract"] = doc.abstract;
  j["preamble"] = detail::paragraphs_to_json(doc.body.paragraphs);
  j["sections"] = ojson::array();
  for (const auto& c : doc.body.children) j["sections"].push_back(detail::section_to_json(c));
  j["objects"] = ojson::array();
  for (const auto& o : doc.objects) j["objects"].push_back(object_to_json(o));
  j["bib"] = ojson::array();
  for (const auto& e : doc.bib) j["bib"].push_back({{"key", e.key}, {"raw", e.raw}, {"fields", e.fields}});
  j["links"] = ojson::array();
  for (const auto& l : doc.links) j["links"].push_back(link_to_json(l));
  j["word_count"] = doc.word_count;
  j["dangling_refs"] = doc.dangling_refs;
  j["similar_papers"] = doc.similar_papers;
  j["code_links"] = doc.code_links;
  return j;
}

// One line, no trailing newline.
inline std::string emit(const PaperDocument& doc) { return to_json(doc).dump(); }

template <typename J>
PaperDocument from_json(const J& j) {
  try {
    PaperDocument doc;
    doc.paper_id = j.at("paper_id").template get<std::string>();
    const auto& m = j.at("metadata");
    doc.metadata.title = m.at("title").template get<std::string>();
    doc.metadata.authors = m.at("authors").template get<std::vector<std::string>>();
    doc.metadata.categories = m.at("categories").template get<std::vector<std::string>>();
    doc.metadata.date = m.at("date").template get<std::string>();
    doc.abstract = j.at("abstract").template get<std::string>();
    for (const auto& p : j.at("preamble")) doc.body.paragraphs.push_back(detail::paragraph_from_json(p));
    for (const auto& s : j.at("sections")) doc.body.children.push_back(detail::section_from_json(s));
    for (const auto& jo : j.at("objects")) {
      PaperObject o;
      o.id = jo.at("id").template get<std::string>();
      auto kind = classify::parse_kind(jo.at("kind").template get<std::string>());
      if (!kind) throw Error(ErrorCode::kSerialization, "unknown object kind");
      o.kind = *kind;
      o.env_name = jo.at("env").template get<std::string>();
      o.label = detail::optional_string_from(jo, "label");
      o.caption = detail::optional_string_from(jo, "caption");
      o.number = detail::optional_string_from(jo, "number");
      const auto& pl = jo.at("payload");
      if (o.kind == ObjectKind::kTable) {
        if (!pl.is_null()) {
          postprocess::LinearTable t;
          t.grid = pl.at("grid").template get<std::vector<std::vector<std::string>>>();
          t.linear = pl.at("linear").template get<std::string>();
          t.equal_columns = pl.at("equal_columns").template get<bool>();
          t.n_rows = pl.at("n_rows").template get<std::size_t>();
          t.n_cols = pl.at("n_cols").template get<std::size_t>();
          t.nested_flattened = pl.at("nested_flattened").template get<bool>();
          o.table = std::move(t);
        }
      } else if (o.kind == ObjectKind::kFigure) {
        o.image_paths = pl.at("image_paths").template get<std::vector<std::string>>();
      } else if (o.kind == ObjectKind::kEquation) {
        o.text = pl.at("latex").template get<std::string>();
      } else {
        o.text = pl.at("text").template get<std::string>();
      }
      o.has_content = jo.at("has_content").template get<bool>();
      doc.objects.push_back(std::move(o));
    }
    for (const auto& jb : j.at("bib")) {
      bibres::BibEntry e;
      e.key = jb.at("key").template get<std::string>();
      e.raw = jb.at("raw").template get<std::string>();
      e.fields = jb.at("fields").template get<std::map<std::string, std::string>>();
      doc.bib.push_back(std::move(e));
    }
    for (const auto& jl : j.at("links")) {
      bibres::ResolutionResult r;
      r.entry_key = jl.at("key").template get<std::string>();
      const auto& id = jl.at("id");
      if (id.is_string()) r.linked_id = id.template get<std::string>();
      if (!jl.at("distance").is_null()) r.distance = jl.at("distance").template get<double>();
      r.candidates_considered = jl.at("candidates").template get<std::size_t>();
      r.title_only = jl.at("title_only").template get<bool>();
      doc.links.push_back(std::move(r));
    }
    doc.word_count = j.at("word_count").template get<std::size_t>();
    doc.dangling_refs = j.at("dangling_refs").template get<std::vector<std::string>>();
    doc.similar_papers = j.at("similar_papers").template get<std::vector<std::string>>();
    doc.code_links = j.at("code_links").template get<std::vector<std::string>>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSerialization, std::string("malformed paper record: ") + e.what());
  }
}

inline PaperDocument parse_record(std::string_view line) {
  auto j = ojson::parse(line, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kSerialization, "paper record is not JSON");
  return from_json(j);
}

inline ojson stats_to_json(const CorpusStats& s) {
  ojson j;
  j["papers"] = s.papers;
  j["objects"] = ojson::object();
  for (ObjectKind k : classify::kObjectKinds) {
    if (k == ObjectKind::kOther) continue;
    const auto& ks = s.kinds.at(classify::kind_name(k));
    j["objects"][classify::kind_name(k)] = {
        {"count", ks.count}, {"with_content", ks.with_content}, {"percentage", detail::optional_number(ks.percentage)}};
  }
  j["citation_to_bib_rate"] = detail::optional_number(s.citation_to_bib_rate);
  j["bib_to_fulltext_rate"] = detail::optional_number(s.bib_to_fulltext_rate);
  j["cite_marks"] = s.cite_marks;
  j["bib_entries"] = s.bib_entries;
  j["bib_linked"] = s.bib_linked;
  j["categories"] = s.categories;
  j["rejects"] = s.rejects;
  return j;
}

}  // namespace texcorpus::corpus
