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


#include "texcorpus/parse.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace texcorpus;
using namespace texcorpus::parse;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

void check_nesting(std::string_view src, const EnvironmentBlock& b) {
  REQUIRE(b.begin < b.body_begin);
  REQUIRE(b.body_begin <= b.body_end);
  REQUIRE(b.body_end < b.end);
  REQUIRE(src.substr(b.body_begin, b.body_end - b.body_begin) == b.body);
  REQUIRE(src.substr(b.begin, 8 + b.env_name.size()) == "\\begin{" + b.env_name + "}");
  std::size_t prev_end = b.body_begin;
  for (const auto& c : b.children) {
    REQUIRE(c.begin >= prev_end);
    REQUIRE(c.end <= b.body_end);
    prev_end = c.end;
    check_nesting(src, c);
  }
}

}  // namespace

TEST_CASE("extract_blocks examples", "[parse]") {
  auto blocks = extract_blocks("\\begin{figure}\\begin{tabular}a\\end{tabular}\\end{figure}");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].env_name == "figure");
  REQUIRE(blocks[0].children.size() == 1);
  CHECK(blocks[0].children[0].env_name == "tabular");
  CHECK(blocks[0].children[0].body == "a");

  auto alg = extract_blocks("x \\begin{algorithm}...\\end{algorithm} y");
  REQUIRE(alg.size() == 1);
  CHECK(alg[0].env_name == "algorithm");

  CHECK(code_of([] { extract_blocks("\\begin{table} x"); }) == ErrorCode::kUnbalancedEnvironment);
  CHECK(code_of([] { extract_blocks("x \\end{table}"); }) == ErrorCode::kUnbalancedEnvironment);
  CHECK(code_of([] { extract_blocks("\\begin{a}\\begin{b}\\end{a}\\end{b}"); }) ==
        ErrorCode::kUnbalancedEnvironment);
}

TEST_CASE("extract_blocks captures label and caption of the block itself", "[parse]") {
  auto blocks = extract_blocks(
      "\\begin{figure*}\\begin{subfigure}\\caption{inner}\\label{fig:a}\\end{subfigure}"
      "\\caption{Outer {nested} caption.}\\label{fig:outer}\\end{figure*}");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].env_name == "figure*");
  CHECK(blocks[0].caption == "Outer {nested} caption.");
  CHECK(blocks[0].label == "fig:outer");
  CHECK(blocks[0].children[0].label == "fig:a");

  auto none = extract_blocks("\\begin{table}\\begin{tabular}{c}x\\end{tabular}\\end{table}");
  CHECK_FALSE(none[0].label.has_value());
  CHECK_FALSE(none[0].caption.has_value());
}

TEST_CASE("extract_blocks treats verbatim bodies as opaque", "[parse]") {
  auto blocks = extract_blocks("\\begin{verbatim}\\begin{table}\\end{verbatim} \\verb|\\end{x}|");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].body == "\\begin{table}");
  CHECK(blocks[0].children.empty());
}

TEST_CASE("extract_blocks ranges partition the source", "[parse][property]") {
  static const std::vector<std::string> kNames = {"figure", "table", "tabular", "equation", "lemma", "itemize"};
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    // Random balanced nesting.
    std::string src;
    std::vector<std::string> open;
    const int steps = std::uniform_int_distribution<int>(0, 30)(rng);
    for (int k = 0; k < steps; ++k) {
      int action = std::uniform_int_distribution<int>(0, 3)(rng);
      if (action == 0) {
        const std::string& n = kNames[std::uniform_int_distribution<std::size_t>(0, kNames.size() - 1)(rng)];
        src += "\\begin{" + n + "}";
        open.push_back(n);
      } else if (action == 1 && !open.empty()) {
        src += "\\end{" + open.back() + "}";
        open.pop_back();
      } else {
        src += action == 2 ? " text \\label{l" + std::to_string(k) + "} " : "\\emph{w} ";
      }
    }
    while (!open.empty()) {
      src += "\\end{" + open.back() + "}";
      open.pop_back();
    }
    INFO(src);
    auto blocks = extract_blocks(src);
    std::string rebuilt;
    std::size_t pos = 0;
    for (const auto& b : blocks) {
      check_nesting(src, b);
      REQUIRE(b.begin >= pos);
      rebuilt += src.substr(pos, b.begin - pos);
      rebuilt += src.substr(b.begin, b.end - b.begin);
      pos = b.end;
    }
    rebuilt += src.substr(pos);
    REQUIRE(rebuilt == src);
  }
}

TEST_CASE("split_sentences examples", "[parse]") {
  using V = std::vector<std::string>;
  CHECK(split_sentences("We train. We test.") == V{"We train.", "We test."});
  CHECK(split_sentences("See Smith et al. for details.") == V{"See Smith et al. for details."});
  CHECK(split_sentences("Let $a. b$ hold. Then done.") == V{"Let $a. b$ hold.", "Then done."});
  CHECK(split_sentences("As in Fig. 3 we see. Yes!") == V{"As in Fig. 3 we see.", "Yes!"});
  CHECK(split_sentences("By J. Smith. Done?  Really.") == V{"By J. Smith.", "Done?", "Really."});
  CHECK(split_sentences("So <equation> x. Y </equation> holds. Next.") ==
        V{"So <equation> x. Y </equation> holds.", "Next."});
  CHECK(split_sentences("It grew (a lot.) Then 3 fell.") == V{"It grew (a lot.)", "Then 3 fell."});
  CHECK(split_sentences("   ").empty());
}

TEST_CASE("split_sentences is lossless", "[parse][property]") {
  static const std::vector<std::string> kPieces = {"We", "the", "model", "Fig.", "et al.", ". ", "? ", "! ",
                                                   "  ", "\n", "$", "a. B", "3", "<equation>", "</equation>",
                                                   "i.e.", "X.", "\\$", ")", "\"", "Then"};
  std::mt19937_64 rng(5);
  for (int round = 0; round < 1000; ++round) {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int k = 0; k < n; ++k) {
      s += kPieces[std::uniform_int_distribution<std::size_t>(0, kPieces.size() - 1)(rng)];
      s += ' ';
    }
    auto sentences = split_sentences(s);
    for (const auto& x : sentences) REQUIRE_FALSE(text::trim(x).empty());
    INFO(s);
    REQUIRE(text::collapse_whitespace(text::join(sentences, " ")) == text::collapse_whitespace(s));
  }
}

TEST_CASE("extract_citations examples", "[parse]") {
  auto a = extract_citations("as shown \\cite{a,b}");
  CHECK(a.text == "as shown <cite>");
  REQUIRE(a.citations.size() == 2);
  CHECK(a.citations[0].offset == 9);
  CHECK(a.citations[0].key == "a");
  CHECK(a.citations[1].offset == 9);
  CHECK(a.citations[1].key == "b");

  auto b = extract_citations("\\citet{x} argues");
  REQUIRE(b.citations.size() == 1);
  CHECK(b.citations[0].offset == 0);
  CHECK(b.text == "<cite> argues");

  Warnings w;
  auto c = extract_citations("\\cite{x", &w);
  CHECK(c.citations.empty());
  CHECK(w.size() == 1);

  auto d = extract_citations("\\citep*[see][p.~3]{ k1 , k2 } and \\nocite{z}\\citeauthor{q}");
  CHECK(d.text == "<cite> and <cite>");
  REQUIRE(d.citations.size() == 3);
  CHECK(d.citations[1].key == "k2");
  CHECK(d.citations[2].offset == 11);
}

TEST_CASE("every <cite> token has records at its offset", "[parse][property]") {
  static const std::vector<std::string> kPieces = {"text ", "\\cite{a}", "\\citep{b,c}", "\\citet[x]{d}",
                                                   "\\emph{e}", "\\nocite{f}", "\\cite{", "}", " "};
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int k = 0; k < n; ++k) s += kPieces[std::uniform_int_distribution<std::size_t>(0, kPieces.size() - 1)(rng)];
    auto scan = extract_citations(s);
    std::set<std::size_t> token_offsets;
    for (std::size_t p = scan.text.find("<cite>"); p != std::string::npos; p = scan.text.find("<cite>", p + 1)) {
      token_offsets.insert(p);
    }
    std::set<std::size_t> record_offsets;
    for (const auto& c : scan.citations) record_offsets.insert(c.offset);
    INFO(s);
    REQUIRE(record_offsets == token_offsets);
  }
}

TEST_CASE("parse_sections examples", "[parse]") {
  auto t = parse_sections("\\section{A} p1 \\subsection{B} p2");
  REQUIRE(t.root.children.size() == 1);
  CHECK(t.root.children[0].title == "A");
  CHECK(t.root.children[0].level == 1);
  REQUIRE(t.root.children[0].children.size() == 1);
  CHECK(t.root.children[0].children[0].title == "B");
  CHECK(t.root.children[0].children[0].level == 2);
  CHECK(t.root.children[0].paragraphs[0].sentences[0] == "p1");

  auto none = parse_sections("Just text.\n\nMore text.");
  CHECK_FALSE(has_real_sections(none.root));
  CHECK(none.root.paragraphs.size() == 2);

  auto early = parse_sections("\\subsection{B} x \\section{C} y");
  REQUIRE(early.root.children.size() == 2);
  CHECK(early.root.children[0].level == 2);
  CHECK(early.root.children[1].level == 1);

  auto abs = parse_sections("\\begin{abstract} We study. \\end{abstract}\\section*{Intro} Hi.");
  CHECK(abs.abstract == "We study.");
  CHECK(abs.root.children[0].title == "Intro");
}

TEST_CASE("split_paragraphs honours blank lines and \\par", "[parse]") {
  using V = std::vector<std::string>;
  CHECK(split_paragraphs("a\nb\n\n  \nc\\par d") == V{"a\nb", "c", " d"});
  CHECK(split_paragraphs("x \\paragraph{H} y").size() == 2);
}

TEST_CASE("parse_sections visits sections in source order", "[parse][property]") {
  std::mt19937_64 rng(3);
  static const std::vector<std::string> kCmds = {"section", "subsection", "subsubsection"};
  for (int round = 0; round < 300; ++round) {
    std::string src = "pre\n\n";
    std::vector<std::string> titles;
    const int n = std::uniform_int_distribution<int>(0, 15)(rng);
    for (int k = 0; k < n; ++k) {
      titles.push_back("T" + std::to_string(k));
      src += "\\" + kCmds[std::uniform_int_distribution<std::size_t>(0, 2)(rng)] + "{" + titles.back() +
             "} body " + std::to_string(k) + ".\n\n";
    }
    auto tree = parse_sections(src);
    std::vector<std::string> seen;
    for_each_section(tree.root, [&](const SectionNode& s) {
      if (s.level > 0) seen.push_back(s.title);
      for (const auto& c : s.children) REQUIRE(c.level > s.level);
    });
    REQUIRE(seen == titles);
  }
}

TEST_CASE("find_numbered_mentions", "[parse]") {
  auto m = find_numbered_mentions("As Table 2 and Fig. 3 show, Lemma 4 holds; see Subtable 9.");
  REQUIRE(m.size() == 3);
  CHECK(m[0].kind_word == "table");
  CHECK(m[0].number == 2);
  CHECK(m[1].kind_word == "figure");
  CHECK(m[2].kind_word == "lemma");
  CHECK(m[2].number == 4);
}
