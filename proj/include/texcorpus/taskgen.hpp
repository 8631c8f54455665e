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

// Task datasets derived from parsed papers: object description samples
// (target passage + preceding context) and introduction paragraph samples
// (abstract + cited full-text passages).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/corpus.hpp"
#include "texcorpus/document.hpp"
#include "texcorpus/error.hpp"
#include "texcorpus/text.hpp"

namespace texcorpus::taskgen {

using classify::ObjectKind;
using corpus::PaperDocument;
using corpus::PaperObject;

inline constexpr std::size_t kMinTargetWords = 30;
inline constexpr std::size_t kMinObjectTokens = 200;
inline constexpr std::size_t kMaxObjectTokens = 500;
inline constexpr std::size_t kMinIntroTokens = 200;
inline constexpr std::size_t kMaxIntroTokens = 1000;
inline constexpr std::size_t kPassageWords = 300;

inline std::size_t count_tokens(std::string_view s) { return text::count_words(s); }

// ---------------------------------------------------------------------------
// Flattened body

struct FlatSentence {
  std::string text;
  std::size_t paragraph = 0;  // global paragraph ordinal
  std::vector<std::string> refs;
};

// Preamble paragraphs, then sections in document order.
inline std::vector<FlatSentence> flatten_body(const PaperDocument& doc) {
  std::vector<FlatSentence> out;
  std::size_t para = 0;
  parse::for_each_section(doc.body, [&](const parse::SectionNode& s) {
    for (const auto& p : s.paragraphs) {
      std::size_t base = out.size();
      for (const auto& sent : p.sentences) out.push_back({sent, para, {}});
      for (const auto& [k, id] : p.object_refs) {
        if (k < p.sentences.size()) out[base + k].refs.push_back(id);
      }
      ++para;
    }
  });
  return out;
}

inline std::vector<std::string> sentence_texts(const std::vector<FlatSentence>& flat) {
  std::vector<std::string> out;
  out.reserve(flat.size());
  for (const auto& s : flat) out.push_back(s.text);
  return out;
}

// ---------------------------------------------------------------------------
// Target span

struct Span {
  std::size_t i = 0;
  std::size_t j = 0;
  // Some sentence in the span refers to the target and another object.
  bool dual_reference = false;
};

// First sentence referring to the object, extended through its paragraph
// until a sentence that refers to other objects but not this one.
inline std::optional<Span> locate_description_target(const std::vector<FlatSentence>& flat,
                                                     const std::string& object_id) {
  auto refers = [&](const FlatSentence& s) {
    return std::find(s.refs.begin(), s.refs.end(), object_id) != s.refs.end();
  };
  auto others = [&](const FlatSentence& s) {
    return std::any_of(s.refs.begin(), s.refs.end(), [&](const std::string& r) { return r != object_id; });
  };
  std::size_t i = 0;
  while (i < flat.size() && !refers(flat[i])) ++i;
  if (i == flat.size()) return std::nullopt;
  Span span{i, i, others(flat[i])};
  for (std::size_t k = i + 1; k < flat.size() && flat[k].paragraph == flat[i].paragraph; ++k) {
    bool mine = refers(flat[k]);
    if (!mine && others(flat[k])) break;
    if (mine && others(flat[k])) span.dual_reference = true;
    span.j = k;
  }
  return span;
}

inline std::optional<Span> locate_description_target(const PaperDocument& doc, const PaperObject& object) {
  return locate_description_target(flatten_body(doc), object.id);
}

// ---------------------------------------------------------------------------
// Context selection

// nullopt n is "infinity".
inline std::vector<std::string> build_context(const std::vector<std::string>& sentences, std::size_t i,
                                              std::optional<std::size_t> n) {
  if (i > sentences.size()) throw Error(ErrorCode::kInvalidArgument, "context index past the end");
  std::size_t begin = (!n || *n >= i) ? 0 : i - *n;
  return {sentences.begin() + static_cast<std::ptrdiff_t>(begin), sentences.begin() + static_cast<std::ptrdiff_t>(i)};
}

struct RandSelector {
  std::size_t k = 10;
  std::uint64_t seed = 0;
};

// The a-th through b-th sentences before the target, 1-based.
struct DistSelector {
  std::size_t a = 11;
  std::size_t b = 20;
};

using Selector = std::variant<RandSelector, DistSelector>;

namespace detail {

// Uniform draw in [0, bound) from a 64-bit engine by rejection. Spelled out
// because std::uniform_int_distribution differs between standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = eng();
    if (v < limit) return v % bound;
  }
}

// FNV-1a, for per-sample seeds.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// k distinct indices from [0, n), ascending. mt19937_64(seed), then a
// partial Fisher-Yates shuffle: for t = 0..k-1 swap slot t with slot
// t + uniform_below(n - t).
inline std::vector<std::size_t> rand_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) {
    throw Error(ErrorCode::kContextTooSmall,
                "cannot draw " + std::to_string(k) + " sentences from " + std::to_string(n));
  }
  std::mt19937_64 eng(seed);
  std::vector<std::size_t> pool(n);
  for (std::size_t t = 0; t < n; ++t) pool[t] = t;
  for (std::size_t t = 0; t < k; ++t) {
    std::size_t pick = t + static_cast<std::size_t>(detail::uniform_below(eng, n - t));
    std::swap(pool[t], pool[pick]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Indices [i-b, i-a] clipped at 0; empty when i < a.
inline std::vector<std::size_t> dist_indices(std::size_t i, std::size_t a, std::size_t b) {
  if (a == 0 || a > b) throw Error(ErrorCode::kInvalidArgument, "Dist(a,b) needs 1 <= a <= b");
  std::vector<std::size_t> out;
  if (i < a) return out;
  std::size_t lo = i >= b ? i - b : 0;
  for (std::size_t k = lo; k <= i - a; ++k) out.push_back(k);
  return out;
}

inline std::vector<std::string> baseline_select(const std::vector<std::string>& context_all, std::size_t i,
                                                const Selector& mode) {
  if (i > context_all.size()) throw Error(ErrorCode::kInvalidArgument, "selector index past the context");
  std::vector<std::size_t> idx;
  if (const auto* r = std::get_if<RandSelector>(&mode)) {
    idx = rand_indices(i, r->k, r->seed);
  } else {
    const auto& d = std::get<DistSelector>(mode);
    idx = dist_indices(i, d.a, d.b);
  }
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t k : idx) out.push_back(context_all[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Description samples

struct DescriptionSample {
  std::string paper_id;
  std::string object_id;
  ObjectKind kind = ObjectKind::kOther;
  nlohmann::ordered_json x;  // linear table string, image path list, or text
  std::size_t x_tokens = 0;
  bool equal_columns = true;
  std::string target;
  Span span;
  std::vector<std::string> context_all;
  std::vector<std::string> context;  // window or baseline selection
};

// (paper_id, figure id or label) -> chart/bar flag. Missing means excluded.
class FigureLabels {
 public:
  void set(const std::string& paper_id, const std::string& label, bool chart) { map_[{paper_id, label}] = chart; }

  bool chart_or_bar(const std::string& paper_id, const PaperObject& fig) const {
    if (auto it = map_.find({paper_id, fig.id}); it != map_.end()) return it->second;
    if (fig.label) {
      if (auto it = map_.find({paper_id, *fig.label}); it != map_.end()) return it->second;
    }
    return false;
  }

  std::size_t size() const { return map_.size(); }

  // JSON lines {"paper_id", "figure_label", "chart_or_bar"}.
  static FigureLabels parse(std::string_view data) {
    FigureLabels out;
    std::size_t line_no = 0;
    std::istringstream in{std::string(data)};
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("paper_id") || !j["paper_id"].is_string() ||
          !j.contains("figure_label") || !j["figure_label"].is_string() || !j.contains("chart_or_bar") ||
          !j["chart_or_bar"].is_boolean()) {
        throw Error(ErrorCode::kInvalidArgument, "figure label file: bad record on line " + std::to_string(line_no));
      }
      out.set(j["paper_id"], j["figure_label"], j["chart_or_bar"].get<bool>());
    }
    return out;
  }

  static FigureLabels load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

 private:
  std::map<std::pair<std::string, std::string>, bool> map_;
};

inline std::optional<std::string> filter_description_sample(const DescriptionSample& s,
                                                            const FigureLabels* labels = nullptr,
                                                            const PaperObject* object = nullptr) {
  if (count_tokens(s.target) < kMinTargetWords) return "target_too_short";
  switch (s.kind) {
    case ObjectKind::kAlgorithm:
    case ObjectKind::kTheorem:
      if (s.x_tokens < kMinObjectTokens) return "object_too_short";
      if (s.x_tokens > kMaxObjectTokens) return "object_too_long";
      break;
    case ObjectKind::kTable:
      if (!s.equal_columns) return "unequal_columns";
      break;
    case ObjectKind::kFigure:
      if (labels == nullptr || object == nullptr || !labels->chart_or_bar(s.paper_id, *object)) {
        return "figure_not_chart";
      }
      break;
    default: break;
  }
  return std::nullopt;
}

inline nlohmann::ordered_json object_input(const PaperObject& o, std::size_t* tokens, bool* equal_columns) {
  *equal_columns = true;
  switch (o.kind) {
    case ObjectKind::kTable:
      if (!o.table) {
        *tokens = 0;
        return "";
      }
      *equal_columns = o.table->equal_columns;
      *tokens = count_tokens(o.table->linear);
      return o.table->linear;
    case ObjectKind::kFigure: {
      *tokens = o.image_paths.size();
      return o.image_paths;
    }
    default: *tokens = count_tokens(o.text); return o.text;
  }
}

struct DeriveOptions {
  std::optional<ObjectKind> kind;       // nullopt: every kind
  std::optional<std::size_t> context = 20;  // nullopt: all preceding sentences
  std::optional<Selector> selector;     // baseline selector instead of the window
  std::uint64_t seed = 0;
  const FigureLabels* figure_labels = nullptr;
};

struct DescriptionResult {
  std::vector<DescriptionSample> samples;
  std::map<std::string, std::map<std::string, std::size_t>> rejects;  // kind -> reason -> count
};

// Seed for one sample: the run seed mixed with the paper and object ids.
inline std::uint64_t sample_seed(std::uint64_t seed, const std::string& paper_id, const std::string& object_id) {
  std::uint64_t h = detail::fnv1a(paper_id, detail::fnv1a(std::to_string(seed)));
  return detail::fnv1a(object_id, detail::fnv1a("/", h));
}

inline DescriptionResult derive_description_samples(const PaperDocument& doc, const DeriveOptions& opts) {
  DescriptionResult out;
  auto flat = flatten_body(doc);
  auto sentences = sentence_texts(flat);
  for (const auto& o : doc.objects) {
    if (opts.kind && o.kind != *opts.kind) continue;
    if (o.kind == ObjectKind::kOther) continue;
    auto span = locate_description_target(flat, o.id);
    if (!span) {
      ++out.rejects[classify::kind_name(o.kind)]["unreferenced"];
      continue;
    }
    DescriptionSample s;
    s.paper_id = doc.paper_id;
    s.object_id = o.id;
    s.kind = o.kind;
    s.x = object_input(o, &s.x_tokens, &s.equal_columns);
    s.span = *span;
    for (std::size_t k = span->i; k <= span->j; ++k) {
      if (!s.target.empty()) s.target += ' ';
      s.target += sentences[k];
    }
    s.context_all = build_context(sentences, span->i, std::nullopt);
    if (auto reason = filter_description_sample(s, opts.figure_labels, &o)) {
      ++out.rejects[classify::kind_name(o.kind)][*reason];
      continue;
    }
    if (opts.selector) {
      Selector sel = *opts.selector;
      if (auto* r = std::get_if<RandSelector>(&sel)) r->seed = sample_seed(opts.seed, doc.paper_id, o.id);
      try {
        s.context = baseline_select(s.context_all, span->i, sel);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kContextTooSmall) throw;
        ++out.rejects[classify::kind_name(o.kind)]["context_too_small"];
        continue;
      }
    } else {
      s.context = build_context(sentences, span->i, opts.context);
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

inline nlohmann::ordered_json description_to_json(const DescriptionSample& s) {
  nlohmann::ordered_json j;
  j["paper_id"] = s.paper_id;
  j["object_id"] = s.object_id;
  j["kind"] = classify::kind_name(s.kind);
  j["x"] = s.x;
  j["context"] = s.context;
  j["target"] = s.target;
  j["span"] = {s.span.i, s.span.j};
  j["dual_reference"] = s.span.dual_reference;
  return j;
}

// ---------------------------------------------------------------------------
// Paragraph samples

struct Passage {
  std::string cited_id;
  std::string text;
};

struct ParagraphSample {
  std::string paper_id;
  std::string abstract;
  std::string target;
  std::vector<Passage> passages;
  double coverage = 0.0;  // share of distinct intro citations with full text
};

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline const parse::SectionNode* find_introduction(const PaperDocument& doc) {
  for (const auto& s : doc.body.children) {
    if (lowercase(text::trim(s.title)) == "introduction") return &s;
  }
  return nullptr;
}

// Body words of a paper, sentences in order, objects excluded.
inline std::vector<std::string> body_words(const PaperDocument& doc) {
  std::vector<std::string> out;
  parse::for_each_section(doc.body, [&](const parse::SectionNode& s) {
    for (const auto& p : s.paragraphs) {
      for (const auto& sent : p.sentences) {
        for (auto w : text::split_words(sent)) out.emplace_back(w);
      }
    }
  });
  return out;
}

inline std::vector<std::string> chunk_passages(const std::vector<std::string>& words,
                                               std::size_t size = kPassageWords) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < words.size(); b += size) {
    std::string p;
    for (std::size_t k = b; k < std::min(words.size(), b + size); ++k) {
      if (!p.empty()) p += ' ';
      p += words[k];
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Returns the introduction text when it qualifies as a target.
inline std::optional<std::string> introduction_target(const PaperDocument& doc) {
  const auto* intro = find_introduction(doc);
  if (intro == nullptr) return std::nullopt;
  std::string target;
  parse::for_each_section(*intro, [&](const parse::SectionNode& s) {
    for (const auto& p : s.paragraphs) {
      for (const auto& sent : p.sentences) {
        if (!target.empty()) target += ' ';
        target += sent;
      }
    }
  });
  std::size_t n = count_tokens(target);
  if (n < kMinIntroTokens || n > kMaxIntroTokens) return std::nullopt;
  return target;
}

// cited_docs maps linked ids to full-text documents.
inline std::vector<ParagraphSample> derive_paragraph_samples(const PaperDocument& doc,
                                                             const std::map<std::string, const PaperDocument*>& cited_docs) {
  auto target = introduction_target(doc);
  if (!target) return {};
  std::vector<std::string> keys;
  std::set<std::string> seen_keys;
  parse::for_each_section(*find_introduction(doc), [&](const parse::SectionNode& s) {
    for (const auto& p : s.paragraphs) {
      for (const auto& [k, key] : p.cite_marks) {
        (void)k;
        if (seen_keys.insert(key).second) keys.push_back(key);
      }
    }
  });
  std::map<std::string, std::string> linked;
  for (const auto& l : doc.links) {
    if (l.linked_id) linked.emplace(l.entry_key, *l.linked_id);
  }
  ParagraphSample s;
  s.paper_id = doc.paper_id;
  s.abstract = doc.abstract;
  s.target = *target;
  std::size_t with_text = 0;
  std::set<std::string> done;
  for (const auto& key : keys) {
    auto l = linked.find(key);
    if (l == linked.end()) continue;
    auto d = cited_docs.find(l->second);
    if (d == cited_docs.end() || d->second == nullptr) continue;
    ++with_text;
    if (!done.insert(l->second).second) continue;
    for (auto& p : chunk_passages(body_words(*d->second))) s.passages.push_back({l->second, std::move(p)});
  }
  s.coverage = keys.empty() ? 0.0 : static_cast<double>(with_text) / static_cast<double>(keys.size());
  return {s};
}

inline nlohmann::ordered_json paragraph_to_json(const ParagraphSample& s) {
  nlohmann::ordered_json j;
  j["paper_id"] = s.paper_id;
  j["abstract"] = s.abstract;
  j["passages"] = nlohmann::ordered_json::array();
  for (const auto& p : s.passages) j["passages"].push_back({{"cited_id", p.cited_id}, {"text", p.text}});
  j["target"] = s.target;
  j["coverage"] = s.coverage;
  return j;
}

// ---------------------------------------------------------------------------
// Splits

struct SplitSizes {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

// Seeded uniform subsets of n sorted samples: a full shuffle of [0, n) with
// rand_indices' generator, the first `train` go to train, and so on. Samples
// past the requested sizes get an empty name.
inline std::vector<std::string> assign_splits(std::size_t n, const SplitSizes& sizes, std::uint64_t seed) {
  std::vector<std::string> out(n);
  std::mt19937_64 eng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t t = 0; t < n; ++t) order[t] = t;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    std::size_t pick = t + static_cast<std::size_t>(detail::uniform_below(eng, n - t));
    std::swap(order[t], order[pick]);
  }
  std::size_t pos = 0;
  for (auto [name, count] : {std::pair{"train", sizes.train}, {"valid", sizes.valid}, {"test", sizes.test}}) {
    for (std::size_t c = 0; c < count && pos < n; ++c) out[order[pos++]] = name;
  }
  return out;
}

}  // namespace texcorpus::taskgen
