#!/usr/bin/env python3
# Copyright 2026 The texcorpus Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the committed test fixtures.

Every label in the outputs is known by construction: the generator builds
each artifact from structured parts and writes the parts next to it.

    python3 tests/fixtures/generate.py
"""

import json
import os
import random
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import corpus_gen  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))

FIRST = ["John", "Alice", "Bob", "Maria", "Wei", "Priya", "Omar", "Lena", "Kenji", "Sofia", "Ivan", "Chloe"]
LAST = ["Smith", "Doe", "Roe", "Garcia", "Chen", "Patel", "Haddad", "Novak", "Tanaka", "Rossi", "Petrov",
        "Martin", "Okafor", "Larsen"]
TITLE_WORDS = ["deep", "parsing", "learning", "graph", "neural", "retrieval", "scientific", "generation",
               "sparse", "attention", "robust", "tables", "citations", "corpus", "transfer", "models",
               "document", "structure", "language", "context", "latent", "reasoning", "efficient", "search"]
VENUES = ["Proc. of the Annual Meeting", "Proc. Conf. on Text Mining", "Workshop on Document Analysis",
          "Proceedings of the Joint Conference"]
JOURNALS = ["Journal of Text Studies", "Transactions on Parsing", "Computing Letters", "Data Review"]


def title_case(words):
    return " ".join(w.capitalize() if i == 0 or len(w) > 3 else w for i, w in enumerate(words))


def make_title(rng, lo=3, hi=7):
    return title_case(rng.sample(TITLE_WORDS, rng.randint(lo, hi)))


def initials(first):
    return first[0] + "."


def bib_entries(rng):
    """50 formatted bibliography strings with their field labels."""
    out = []
    for k in range(50):
        n_auth = rng.randint(1, 3)
        people = [(rng.choice(FIRST), rng.choice(LAST)) for _ in range(n_auth)]
        title = make_title(rng)
        year = str(rng.randint(1985, 2022))
        style = k % 5
        labels = {"title": title, "date": year}
        if style == 0:
            names = [initials(f) + " " + l for f, l in people]
            author = " and ".join(names)
            venue = rng.choice(VENUES)
            raw = f"{author}. {title}. In {venue}, {year}."
            labels.update(author=author, booktitle=venue)
        elif style == 1:
            names = [f + " " + l for f, l in people]
            author = ", ".join(names[:-1]) + (", and " if len(names) > 2 else " and ") + names[-1] \
                if len(names) > 1 else names[0]
            venue = rng.choice(VENUES)
            p1 = rng.randint(1, 400)
            p2 = p1 + rng.randint(5, 15)
            raw = f"{author}. {year}. {title}. In {venue}, pages {p1}--{p2}."
            labels.update(author=author, booktitle=venue, pages=f"{p1}--{p2}")
        elif style == 2:
            names = [initials(f) + " " + l for f, l in people]
            author = " and ".join(names)
            journal = rng.choice(JOURNALS)
            vol = str(rng.randint(1, 60))
            p1 = rng.randint(1, 400)
            p2 = p1 + rng.randint(5, 15)
            raw = f"{author}. ``{title}.'' {journal}, vol. {vol}, pp. {p1}-{p2}, {year}."
            labels.update(author=author, volume=vol, pages=f"{p1}-{p2}")
        elif style == 3:
            names = [initials(f) + " " + l for f, l in people]
            author = ", ".join(names)
            venue = rng.choice(VENUES)
            raw = f"{author}.\n\\newblock {{\\em {title}}}.\n\\newblock In {venue}, {year}."
            labels.update(author=author, booktitle=venue)
        else:
            # Accented surname written with a TeX accent; the label is the
            # plain-text form.
            f, l = people[0]
            accented = {"Muller": 'M\\"uller', "Sorensen": "S{\\o}rensen", "Nunez": "Nu\\~nez"}
            plain = rng.choice(sorted(accented))
            author_tex = f"{initials(f)} {accented[plain]}"
            author = f"{initials(f)} {plain}"
            journal = rng.choice(JOURNALS)
            raw = f"{author_tex}. {title}. {journal}, {year}."
            labels.update(author=author)
        out.append({"key": f"b{k:02d}", "raw": raw, "fields": labels})
    return out


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def main():
    rng = random.Random(20240917)
    write_jsonl(os.path.join(HERE, "bib_entries.jsonl"), bib_entries(rng))

    rng = random.Random(20240918)
    papers, externals, distractors = corpus_gen.generate(HERE, rng)
    expected, spans, labels, db, db_full = corpus_gen.gold(papers, externals, distractors, rng)
    with open(os.path.join(HERE, "expected.json"), "w", encoding="utf-8") as f:
        json.dump(expected, f, indent=1, sort_keys=True)
        f.write("\n")
    write_jsonl(os.path.join(HERE, "spans.jsonl"), spans)
    write_jsonl(os.path.join(HERE, "figure_labels.jsonl"), labels)
    write_jsonl(os.path.join(HERE, "db.jsonl"), db)
    write_jsonl(os.path.join(HERE, "db_full.jsonl"), db_full)
    write_jsonl(os.path.join(HERE, "sentences.jsonl"),
                [{"paper_id": p.pid, "abstract": [s.plain for s in p.abstract],
                  "sentences": [s.plain for _, s in corpus_gen.body_sentences(p)]} for p in papers])


if __name__ == "__main__":
    main()
