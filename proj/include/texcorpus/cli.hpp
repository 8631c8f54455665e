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

// Batch commands behind the texcorpus binary. Each takes a RunConfig and
// returns the process exit code: 0 ok, 1 some paper or record failed,
// 2 bad configuration or missing inputs.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "texcorpus/bibres.hpp"
#include "texcorpus/classify.hpp"
#include "texcorpus/corpus.hpp"
#include "texcorpus/document.hpp"
#include "texcorpus/error.hpp"
#include "texcorpus/ingest.hpp"
#include "texcorpus/postprocess.hpp"
#include "texcorpus/schema.hpp"
#include "texcorpus/taskgen.hpp"

namespace texcorpus::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;

struct RunConfig {
  fs::path input_root;
  fs::path output_root;
  std::optional<fs::path> db_path;
  double threshold = bibres::kDefaultThreshold;
  std::optional<std::size_t> context_n = 20;  // nullopt: "inf"
  std::string selector = "all";               // all | rand | dist
  std::size_t rand_k = 10;
  std::size_t dist_a = 11;
  std::size_t dist_b = 20;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<fs::path> alias_table_path;
  std::optional<fs::path> figure_label_path;
  std::optional<std::string> kind;  // derive: one object kind
  std::string task = "all";         // derive: desc | para | all
  std::optional<taskgen::SplitSizes> split;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

// ---------------------------------------------------------------------------
// Plumbing

// Runs fn(0..n-1) on up to `workers` threads. Callers write results into
// per-index slots, so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::trim(line).empty()) out.push_back(line);
  }
  return out;
}

class LineWriter {
 public:
  explicit LineWriter(const fs::path& p) : f_(p, std::ios::binary | std::ios::trunc), path_(p) {
    if (!f_) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  }
  void write(const std::string& line) { f_ << line << '\n'; }
  void write(const ojson& j) { write(j.dump()); }
  void close() {
    f_.close();
    if (!f_) throw Error(ErrorCode::kIo, "write failed for " + path_.string());
  }

 private:
  std::ofstream f_;
  fs::path path_;
};

inline std::string stage_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoEntry:
    case ErrorCode::kAmbiguousEntry:
    case ErrorCode::kIncludeCycle:
    case ErrorCode::kExpansionDepthExceeded:
    case ErrorCode::kIo: return "ingest";
    case ErrorCode::kUnbalancedEnvironment: return "parse";
    case ErrorCode::kTaggerUnavailable: return "classify";
    default: return "postprocess";
  }
}

inline ojson error_line(const std::string& paper_id, const std::string& stage, const std::string& code,
                        const std::string& message) {
  ojson j;
  j["paper_id"] = paper_id;
  j["stage"] = stage;
  j["code"] = code;
  j["message"] = message;
  return j;
}

// Sorted paper directories under root.
inline std::vector<fs::path> paper_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

// A corpus file given directly, or corpus.jsonl inside a directory.
inline fs::path corpus_file(const fs::path& p) { return fs::is_directory(p) ? p / "corpus.jsonl" : p; }

inline std::vector<corpus::PaperDocument> load_corpus(const fs::path& file) {
  std::vector<corpus::PaperDocument> docs;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(file)) {
    ++line_no;
    try {
      docs.push_back(corpus::parse_record(line));
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

// Where a read-side command finds its input: --in when given, else --out.
inline fs::path input_dir(const RunConfig& cfg) { return cfg.input_root.empty() ? cfg.output_root : cfg.input_root; }

inline bool ensure_output(const RunConfig& cfg) {
  if (cfg.output_root.empty()) {
    *cfg.err << "error: --out is required\n";
    return false;
  }
  std::error_code ec;
  fs::create_directories(cfg.output_root, ec);
  if (ec) {
    *cfg.err << "error: cannot create " << cfg.output_root.string() << ": " << ec.message() << "\n";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// parse

inline int cmd_parse(const RunConfig& cfg) {
  if (cfg.input_root.empty() || !fs::is_directory(cfg.input_root)) {
    *cfg.err << "error: input root " << cfg.input_root.string() << " is not a directory\n";
    return kExitConfig;
  }
  if (cfg.workers < 1) {
    *cfg.err << "error: --workers must be at least 1\n";
    return kExitConfig;
  }
  auto dirs = paper_dirs(cfg.input_root);
  if (dirs.empty()) {
    *cfg.err << "error: no paper directories under " << cfg.input_root.string() << "\n";
    return kExitConfig;
  }
  std::optional<classify::AliasTable> aliases;
  if (cfg.alias_table_path) {
    try {
      aliases = classify::AliasTable::load(cfg.alias_table_path->string());
    } catch (const Error& e) {
      *cfg.err << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  if (!ensure_output(cfg)) return kExitConfig;

  struct Result {
    std::string paper_id;
    std::optional<std::string> record;
    std::optional<ojson> reject;
    std::optional<ojson> error;
    Warnings warnings;
  };
  std::vector<Result> results(dirs.size());
  corpus::BuildOptions opts;
  if (aliases) opts.aliases = &*aliases;

  parallel_for(dirs.size(), cfg.workers, [&](std::size_t k) {
    Result& r = results[k];
    r.paper_id = dirs[k].filename().string();
    std::string stage = "ingest";
    try {
      auto bundle = ingest::load_bundle(dirs[k], &r.warnings);
      bundle.paper_id = r.paper_id;
      auto src = ingest::normalize(bundle, &r.warnings);
      stage = "parse";
      auto doc = corpus::build_document(bundle, src, corpus::read_metadata_sidecar(dirs[k]), opts, &r.warnings);
      if (auto reason = corpus::filter_paper(doc)) {
        ojson j;
        j["paper_id"] = doc.paper_id;
        j["reason"] = *reason;
        j["word_count"] = doc.word_count;
        r.reject = j;
      } else {
        r.record = corpus::emit(doc);
      }
    } catch (const Error& e) {
      r.error = error_line(r.paper_id, stage == "ingest" ? "ingest" : stage_of(e.code()), std::string(error_code_name(e.code())),
                           e.what());
    } catch (const std::exception& e) {
      r.error = error_line(r.paper_id, stage, "Internal", e.what());
    }
  });

  try {
    LineWriter corpus_out(cfg.output_root / "corpus.jsonl");
    LineWriter rejects_out(cfg.output_root / "rejects.jsonl");
    LineWriter errors_out(cfg.output_root / "errors.jsonl");
    LineWriter warnings_out(cfg.output_root / "warnings.jsonl");
    std::size_t kept = 0, rejected = 0, failed = 0;
    for (const auto& r : results) {
      for (const auto& w : r.warnings) warnings_out.write(ojson{{"paper_id", r.paper_id}, {"message", w}});
      if (r.record) {
        corpus_out.write(*r.record);
        ++kept;
      } else if (r.reject) {
        rejects_out.write(*r.reject);
        ++rejected;
      } else if (r.error) {
        errors_out.write(*r.error);
        ++failed;
      }
    }
    corpus_out.close();
    rejects_out.close();
    errors_out.close();
    warnings_out.close();
    *cfg.out << ojson{{"papers", results.size()}, {"kept", kept}, {"rejected", rejected}, {"errors", failed}}.dump()
             << "\n";
    return failed == 0 ? kExitOk : kExitFailed;
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// ---------------------------------------------------------------------------
// link

inline ojson link_summary(const std::vector<corpus::PaperDocument>& docs) {
  std::size_t entries = 0, linked = 0, marks = 0, marks_in_bib = 0;
  for (const auto& d : docs) {
    entries += d.bib.size();
    for (const auto& l : d.links) linked += l.linked_id ? 1 : 0;
    std::set<std::string> keys;
    for (const auto& e : d.bib) keys.insert(e.key);
    parse::for_each_section(d.body, [&](const parse::SectionNode& s) {
      for (const auto& p : s.paragraphs) {
        for (const auto& [idx, key] : p.cite_marks) {
          (void)idx;
          ++marks;
          marks_in_bib += keys.count(key);
        }
      }
    });
  }
  ojson j;
  j["papers"] = docs.size();
  j["cite_marks"] = marks;
  j["cite_marks_in_bib"] = marks_in_bib;
  j["citation_to_bib_rate"] = corpus::detail::optional_number(corpus::percentage(marks_in_bib, marks));
  j["bib_entries"] = entries;
  j["bib_linked"] = linked;
  j["bib_to_fulltext_rate"] = corpus::detail::optional_number(corpus::percentage(linked, entries));
  return j;
}

inline int cmd_link(const RunConfig& cfg) {
  if (!cfg.db_path) {
    *cfg.err << "error: link needs --db\n";
    return kExitConfig;
  }
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
    *cfg.err << "error: --threshold must be in (0,1)\n";
    return kExitConfig;
  }
  bibres::MetadataDb db;
  try {
    db = bibres::MetadataDb::load(cfg.db_path->string());
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!ensure_output(cfg)) return kExitConfig;
  fs::path src = corpus_file(input_dir(cfg));
  std::vector<corpus::PaperDocument> docs;
  try {
    docs = load_corpus(src);
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  parallel_for(docs.size(), cfg.workers, [&](std::size_t k) {
    auto& d = docs[k];
    d.links.clear();
    for (const auto& e : d.bib) d.links.push_back(bibres::resolve(e, db, cfg.threshold));
  });
  try {
    LineWriter w(cfg.output_root / "corpus.jsonl");
    for (const auto& d : docs) w.write(corpus::emit(d));
    w.close();
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  *cfg.out << link_summary(docs).dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats

inline std::map<std::string, std::size_t> load_reject_counts(const fs::path& dir) {
  std::map<std::string, std::size_t> out;
  fs::path p = dir / "rejects.jsonl";
  if (!fs::exists(p)) return out;
  for (const auto& line : read_lines(p)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("reason") || !j["reason"].is_string()) {
      throw Error(ErrorCode::kSerialization, "bad line in " + p.string());
    }
    ++out[j["reason"].get<std::string>()];
  }
  return out;
}

inline int cmd_stats(const RunConfig& cfg) {
  fs::path in = input_dir(cfg);
  fs::path src = corpus_file(in);
  if (!fs::exists(src)) {
    *cfg.err << "error: no corpus at " << src.string() << "\n";
    return kExitConfig;
  }
  try {
    auto docs = load_corpus(src);
    auto rejects = load_reject_counts(fs::is_directory(in) ? in : src.parent_path());
    auto stats = corpus::compute_stats(docs, rejects);
    std::string text = corpus::stats_to_json(stats).dump(2);
    *cfg.out << text << "\n";
    if (!cfg.output_root.empty()) {
      if (!ensure_output(cfg)) return kExitConfig;
      std::ofstream f(cfg.output_root / "stats.json", std::ios::binary | std::ios::trunc);
      f << text << "\n";
      if (!f) throw Error(ErrorCode::kIo, "cannot write stats.json");
    }
    return kExitOk;
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kEmptyCorpus ? kExitFailed : kExitConfig;
  }
}

// ---------------------------------------------------------------------------
// derive

inline int cmd_derive(const RunConfig& cfg) {
  if (cfg.task != "desc" && cfg.task != "para" && cfg.task != "all") {
    *cfg.err << "error: derive task must be desc, para or all\n";
    return kExitConfig;
  }
  std::vector<classify::ObjectKind> kinds;
  if (cfg.kind) {
    auto k = classify::parse_kind(*cfg.kind);
    if (!k || *k == classify::ObjectKind::kOther) {
      *cfg.err << "error: unknown kind " << *cfg.kind << "\n";
      return kExitConfig;
    }
    kinds.push_back(*k);
  } else {
    for (auto k : classify::kObjectKinds) {
      if (k != classify::ObjectKind::kOther) kinds.push_back(k);
    }
  }
  std::optional<taskgen::Selector> selector;
  if (cfg.selector == "rand") {
    selector = taskgen::RandSelector{cfg.rand_k, cfg.seed};
  } else if (cfg.selector == "dist") {
    if (cfg.dist_a == 0 || cfg.dist_a > cfg.dist_b) {
      *cfg.err << "error: --dist needs 1 <= a <= b\n";
      return kExitConfig;
    }
    selector = taskgen::DistSelector{cfg.dist_a, cfg.dist_b};
  } else if (cfg.selector != "all") {
    *cfg.err << "error: --selector must be rand, dist or all\n";
    return kExitConfig;
  }
  taskgen::FigureLabels labels;
  if (cfg.figure_label_path) {
    try {
      labels = taskgen::FigureLabels::load(cfg.figure_label_path->string());
    } catch (const Error& e) {
      *cfg.err << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  fs::path src = corpus_file(input_dir(cfg));
  std::vector<corpus::PaperDocument> docs;
  try {
    docs = load_corpus(src);
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!ensure_output(cfg)) return kExitConfig;
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });

  ojson summary;
  auto tag_splits = [&](std::vector<ojson>& records) {
    if (!cfg.split) return;
    auto names = taskgen::assign_splits(records.size(), *cfg.split, cfg.seed);
    std::vector<ojson> kept;
    for (std::size_t k = 0; k < records.size(); ++k) {
      if (names[k].empty()) continue;
      records[k]["split"] = names[k];
      kept.push_back(std::move(records[k]));
    }
    records = std::move(kept);
  };

  try {
    if (cfg.task != "para") {
      taskgen::DeriveOptions opts;
      opts.context = cfg.context_n;
      opts.selector = selector;
      opts.seed = cfg.seed;
      opts.figure_labels = &labels;
      std::vector<taskgen::DescriptionResult> per_paper(docs.size());
      parallel_for(docs.size(), cfg.workers,
                   [&](std::size_t k) { per_paper[k] = taskgen::derive_description_samples(docs[k], opts); });
      summary["desc"] = ojson::object();
      for (auto kind : kinds) {
        std::vector<ojson> records;
        std::map<std::string, std::size_t> rejects;
        for (const auto& r : per_paper) {
          for (const auto& s : r.samples) {
            if (s.kind == kind) records.push_back(taskgen::description_to_json(s));
          }
        }
        for (const auto& r : per_paper) {
          auto it = r.rejects.find(classify::kind_name(kind));
          if (it == r.rejects.end()) continue;
          for (const auto& [reason, n] : it->second) rejects[reason] += n;
        }
        tag_splits(records);
        LineWriter w(cfg.output_root / (std::string("desc.") + classify::kind_name(kind) + ".jsonl"));
        for (const auto& r : records) w.write(r);
        w.close();
        summary["desc"][classify::kind_name(kind)] = {{"samples", records.size()}, {"rejects", rejects}};
      }
    }
    if (cfg.task != "desc") {
      std::map<std::string, const corpus::PaperDocument*> by_id;
      for (const auto& d : docs) by_id[d.paper_id] = &d;
      std::vector<std::vector<taskgen::ParagraphSample>> per_paper(docs.size());
      parallel_for(docs.size(), cfg.workers,
                   [&](std::size_t k) { per_paper[k] = taskgen::derive_paragraph_samples(docs[k], by_id); });
      std::vector<ojson> records;
      for (const auto& v : per_paper) {
        for (const auto& s : v) records.push_back(taskgen::paragraph_to_json(s));
      }
      tag_splits(records);
      LineWriter w(cfg.output_root / "para.jsonl");
      for (const auto& r : records) w.write(r);
      w.close();
      summary["para"] = {{"samples", records.size()}};
    }
  } catch (const Error& e) {
    *cfg.err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  *cfg.out << summary.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

// Record-level invariants beyond the schemas. Each returns a description of
// the first violation.

inline std::optional<std::string> check_paper_record(const nlohmann::json& j) {
  std::size_t words = 0;
  std::set<std::string> ids;
  for (const auto& o : j["objects"]) {
    if (!ids.insert(o["id"].get<std::string>()).second) return "duplicate object id " + o["id"].get<std::string>();
    const auto& p = o["payload"];
    std::string kind = o["kind"];
    bool content = false;
    if (kind == "table") {
      content = !p.is_null() && !p["grid"].empty();
      if (!p.is_null()) {
        std::size_t widest = 0;
        bool equal = true;
        for (const auto& row : p["grid"]) {
          widest = std::max(widest, row.size());
          equal = equal && row.size() == p["grid"][0].size();
        }
        if (p["n_rows"].get<std::size_t>() != p["grid"].size() || p["n_cols"].get<std::size_t>() != widest) {
          return "table " + o["id"].get<std::string>() + ": n_rows/n_cols disagree with the grid";
        }
        if (p["equal_columns"].get<bool>() != equal) {
          return "table " + o["id"].get<std::string>() + ": equal_columns disagrees with the grid";
        }
      }
    } else if (kind == "figure") {
      content = p.contains("image_paths") && !p["image_paths"].empty();
    } else if (kind == "equation") {
      content = p.contains("latex") && !p["latex"].get<std::string>().empty();
    } else {
      content = p.contains("text") && !p["text"].get<std::string>().empty();
    }
    if (content != o["has_content"].get<bool>()) {
      return "object " + o["id"].get<std::string>() + ": has_content does not match its payload";
    }
  }
  std::set<std::string> dangling;
  for (const auto& d : j["dangling_refs"]) dangling.insert(d.get<std::string>());
  std::set<std::string> bib_keys;
  for (const auto& b : j["bib"]) bib_keys.insert(b["key"].get<std::string>());
  std::optional<std::string> bad;
  auto paragraph = [&](const nlohmann::json& p) {
    std::size_t n = p["sentences"].size();
    for (const auto& s : p["sentences"]) words += text::count_words(s.get<std::string>());
    for (const auto& r : p["object_refs"]) {
      if (!r[0].is_number_unsigned() || r[0].get<std::size_t>() >= n || !r[1].is_string()) {
        bad = "object_refs entry " + r.dump() + " is out of range";
      } else if (!ids.count(r[1].get<std::string>()) && !dangling.count(r[1].get<std::string>())) {
        bad = "object_refs names unknown object " + r[1].get<std::string>();
      }
    }
    for (const auto& c : p["cite_marks"]) {
      if (!c[0].is_number_unsigned() || c[0].get<std::size_t>() >= n || !c[1].is_string()) {
        bad = "cite_marks entry " + c.dump() + " is out of range";
      }
    }
  };
  std::function<void(const nlohmann::json&)> section = [&](const nlohmann::json& s) {
    for (const auto& p : s["paragraphs"]) paragraph(p);
    for (const auto& c : s["children"]) section(c);
  };
  for (const auto& p : j["preamble"]) paragraph(p);
  for (const auto& s : j["sections"]) section(s);
  if (bad) return bad;
  if (words != j["word_count"].get<std::size_t>()) {
    return "word_count " + j["word_count"].dump() + " but sentences hold " + std::to_string(words) + " words";
  }
  for (const auto& l : j["links"]) {
    if (!bib_keys.count(l["key"].get<std::string>())) return "link for unknown bib key " + l["key"].get<std::string>();
  }
  return std::nullopt;
}

inline std::optional<std::string> check_desc_record(const nlohmann::json& j) {
  std::size_t i = j["span"][0], jj = j["span"][1];
  if (i > jj) return "span start after span end";
  if (taskgen::count_tokens(j["target"].get<std::string>()) < taskgen::kMinTargetWords) return "target_too_short";
  if (j["context"].size() > i) return "context longer than the text before the target";
  std::string kind = j["kind"];
  if (kind == "algorithm" || kind == "theorem") {
    if (!j["x"].is_string()) return "x must be text for " + kind;
    std::size_t n = taskgen::count_tokens(j["x"].get<std::string>());
    if (n < taskgen::kMinObjectTokens) return "object_too_short";
    if (n > taskgen::kMaxObjectTokens) return "object_too_long";
  }
  if (kind == "table") {
    if (!j["x"].is_string()) return "x must be a linear table";
    try {
      auto grid = postprocess::parse_linear(j["x"].get<std::string>());
      for (const auto& row : grid) {
        if (row.size() != grid[0].size()) return "unequal_columns";
      }
    } catch (const Error&) {
      return "x is not a linear table";
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> check_para_record(const nlohmann::json& j) {
  std::size_t n = taskgen::count_tokens(j["target"].get<std::string>());
  if (n < taskgen::kMinIntroTokens || n > taskgen::kMaxIntroTokens) {
    return "target has " + std::to_string(n) + " tokens, outside [200,1000]";
  }
  const auto& ps = j["passages"];
  for (std::size_t k = 0; k < ps.size(); ++k) {
    std::size_t w = text::count_words(ps[k]["text"].get<std::string>());
    if (w > taskgen::kPassageWords) return "passage " + std::to_string(k) + " has more than 300 words";
    bool last_of_paper = k + 1 == ps.size() || ps[k + 1]["cited_id"] != ps[k]["cited_id"];
    if (!last_of_paper && w != taskgen::kPassageWords) {
      return "passage " + std::to_string(k) + " is short but not the last of its paper";
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> check_stats(const nlohmann::json& j) {
  for (const auto& [kind, v] : j["objects"].items()) {
    if (v["with_content"].get<std::size_t>() > v["count"].get<std::size_t>()) return kind + ": with_content > count";
  }
  if (j["bib_linked"].get<std::size_t>() > j["bib_entries"].get<std::size_t>()) return "bib_linked > bib_entries";
  return std::nullopt;
}

struct FileCheck {
  std::string file;
  std::size_t records = 0;
  std::vector<std::string> problems;
};

inline FileCheck validate_file(const fs::path& p) {
  FileCheck fc;
  fc.file = p.filename().string();
  std::string name = fc.file;
  const auto& paper = schema::shipped("paper_document");
  const auto& desc = schema::shipped("desc");
  const auto& para = schema::shipped("para");
  const auto& logs = schema::shipped("logs");
  auto report = [&](std::size_t line, const std::string& msg) {
    fc.problems.push_back(name + ":" + std::to_string(line) + ": " + msg);
  };
  if (name == "stats.json") {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    auto j = nlohmann::json::parse(ss.str(), nullptr, false);
    fc.records = 1;
    if (j.is_discarded()) {
      report(1, "not JSON");
    } else if (auto v = schema::shipped("stats").validate(j)) {
      report(1, v->path + ": " + v->message);
    } else if (auto c = check_stats(j)) {
      report(1, *c);
    }
    return fc;
  }
  std::string prev_id;
  std::size_t line_no = 0;
  std::ifstream f(p, std::ios::binary);
  for (std::string line; std::getline(f, line);) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++fc.records;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      report(line_no, "not JSON");
      continue;
    }
    std::optional<schema::Violation> v;
    std::optional<std::string> inv;
    if (name == "corpus.jsonl") {
      v = paper.validate(j);
      if (!v) {
        inv = check_paper_record(j);
        std::string id = j["paper_id"];
        if (!inv && !prev_id.empty() && id <= prev_id) inv = "paper_id " + id + " is not in sorted order";
        prev_id = id;
      }
    } else if (name.rfind("desc.", 0) == 0) {
      v = desc.validate(j);
      if (!v) {
        inv = check_desc_record(j);
        std::string want = name.substr(5, name.size() - 5 - 6);
        if (!inv && j["kind"] != want) inv = "kind " + j["kind"].get<std::string>() + " in " + name;
      }
    } else if (name == "para.jsonl") {
      v = para.validate(j);
      if (!v) inv = check_para_record(j);
    } else if (name == "rejects.jsonl") {
      v = logs.validate(j, "reject");
    } else if (name == "errors.jsonl") {
      v = logs.validate(j, "error");
    } else if (name == "warnings.jsonl") {
      v = logs.validate(j, "warning");
    }
    if (v) report(line_no, v->path + ": " + v->message);
    if (inv) report(line_no, *inv);
  }
  return fc;
}

inline bool known_output(const std::string& name) {
  return name == "corpus.jsonl" || name == "rejects.jsonl" || name == "errors.jsonl" || name == "warnings.jsonl" ||
         name == "para.jsonl" || name == "stats.json" ||
         (name.rfind("desc.", 0) == 0 && name.size() > 11 && name.substr(name.size() - 6) == ".jsonl");
}

inline int cmd_validate(const RunConfig& cfg) {
  fs::path in = input_dir(cfg);
  std::vector<fs::path> files;
  if (fs::is_regular_file(in)) {
    files.push_back(in);
  } else if (fs::is_directory(in)) {
    for (const auto& e : fs::directory_iterator(in)) {
      if (e.is_regular_file() && known_output(e.path().filename().string())) files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    *cfg.err << "error: nothing to validate at " << in.string() << "\n";
    return kExitConfig;
  }
  bool ok = true;
  for (const auto& p : files) {
    if (!known_output(p.filename().string())) {
      *cfg.err << "error: unrecognized output file " << p.filename().string() << "\n";
      return kExitConfig;
    }
    auto fc = validate_file(p);
    for (const auto& msg : fc.problems) *cfg.err << msg << "\n";
    ok = ok && fc.problems.empty();
    *cfg.out << ojson{{"file", fc.file}, {"records", fc.records}, {"problems", fc.problems.size()}}.dump() << "\n";
  }
  return ok ? kExitOk : kExitFailed;
}

}  // namespace texcorpus::cli
