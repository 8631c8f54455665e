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

// texcorpus: batch driver.
//
//   texcorpus parse    --in papers/ --out run/ [--workers N] [--aliases file]
//   texcorpus link     --out run/ --db db.jsonl [--threshold 0.15]
//   texcorpus stats    --out run/
//   texcorpus derive   [desc|para|all] --out run/ [--kind table] [--context 20|inf]
//                      [--selector all|rand|dist] [--rand-k 10] [--dist 11,20]
//                      [--seed S] [--figure-labels file] [--split 30000,5000,5000]
//   texcorpus validate --in run/

#include <CLI11/CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "texcorpus/cli.hpp"

namespace {

using texcorpus::cli::RunConfig;

std::vector<std::size_t> parse_counts(const std::string& s, std::size_t want, const char* flag) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size() || part[0] == '-') {
      throw CLI::ValidationError(flag, "expected comma-separated non-negative integers");
    }
    out.push_back(static_cast<std::size_t>(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != want) throw CLI::ValidationError(flag, "expected " + std::to_string(want) + " numbers");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured corpus and task datasets from LaTeX paper sources"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string in, out, db, aliases, labels, context = "20", dist = "11,20", split;
  app.add_option("--in", in, "Input root (paper directories, or an output directory to read)");
  app.add_option("--out", out, "Output directory");
  app.add_option("--db", db, "Metadata database (JSON lines)");
  app.add_option("--threshold", cfg.threshold, "Normalized title distance threshold")->capture_default_str();
  app.add_option("--context", context, "Context size n, or inf")->capture_default_str();
  app.add_option("--selector", cfg.selector, "Context selector")
      ->check(CLI::IsMember({"all", "rand", "dist"}))
      ->capture_default_str();
  app.add_option("--rand-k", cfg.rand_k, "Sentences drawn by the rand selector")->capture_default_str();
  app.add_option("--dist", dist, "a,b for the dist selector")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--aliases", aliases, "Environment alias table");
  app.add_option("--figure-labels", labels, "Figure chart/bar labels (JSON lines)");
  app.add_option("--kind", cfg.kind, "Object kind for derive");
  app.add_option("--split", split, "train,valid,test sample counts for derive");

  auto* parse = app.add_subcommand("parse", "Parse paper directories into corpus.jsonl");
  auto* link = app.add_subcommand("link", "Resolve bibliography entries against a metadata database");
  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  auto* derive = app.add_subcommand("derive", "Derive description and paragraph samples");
  derive->add_option("task", cfg.task, "desc, para or all")
      ->check(CLI::IsMember({"desc", "para", "all"}))
      ->capture_default_str();
  auto* validate = app.add_subcommand("validate", "Check output files against schemas and invariants");

  try {
    app.parse(argc, argv);
    if (context == "inf") {
      cfg.context_n.reset();
    } else {
      cfg.context_n = parse_counts(context, 1, "--context")[0];
    }
    auto ab = parse_counts(dist, 2, "--dist");
    cfg.dist_a = ab[0];
    cfg.dist_b = ab[1];
    if (!split.empty()) {
      auto s = parse_counts(split, 3, "--split");
      cfg.split = texcorpus::taskgen::SplitSizes{s[0], s[1], s[2]};
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return texcorpus::cli::kExitConfig;
  }

  cfg.input_root = in;
  cfg.output_root = out;
  if (!db.empty()) cfg.db_path = db;
  if (!aliases.empty()) cfg.alias_table_path = aliases;
  if (!labels.empty()) cfg.figure_label_path = labels;

  if (parse->parsed()) return texcorpus::cli::cmd_parse(cfg);
  if (link->parsed()) return texcorpus::cli::cmd_link(cfg);
  if (stats->parsed()) return texcorpus::cli::cmd_stats(cfg);
  if (derive->parsed()) return texcorpus::cli::cmd_derive(cfg);
  if (validate->parsed()) return texcorpus::cli::cmd_validate(cfg);
  return texcorpus::cli::kExitConfig;
}
