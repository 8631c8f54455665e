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

"""Synthetic paper corpus with gold annotations.

Each paper is planned as a list of sentences and object blocks before any
LaTeX is written. The gold files (sentence counts, word counts, object
numbering, table grids, description spans, sample counts) are computed from
that plan, never from the parser under test.

Rendering conventions the plan relies on:
  * a sentence starts with an uppercase word and ends with '.', and has no
    other sentence-final punctuation;
  * \\cite{..} renders as the single token <cite>;
  * \\emph{w} renders as "<italic> w </italic>", \\textbf{w} as "<bold> w </bold>";
  * Table~\\ref{l} renders as "Table N", \\autoref{l} as "Word N", \\eqref{l} as "(N)";
  * floats, theorems, lists and listings leave the running text, equations stay.
"""

import json
import os
import shutil

FILLER = ["model", "data", "results", "approach", "training", "signal", "corpus", "tokens", "layers",
          "baseline", "accuracy", "input", "output", "features", "weights", "scores", "domain", "errors",
          "samples", "setting", "benchmark", "encoder", "decoder", "language", "structure", "context",
          "retrieval", "queries", "documents", "parser", "graph", "nodes", "edges", "labels", "clusters",
          "improves", "reduces", "captures", "predicts", "combines", "learns", "produces", "requires",
          "supports", "shows", "remains", "stays", "uses", "builds", "keeps", "the", "a", "of", "and",
          "with", "for", "over", "under", "across", "each", "every", "many", "few", "large", "small",
          "robust", "sparse", "dense", "stable", "simple", "strong", "weak", "noisy", "clean", "long",
          "short", "overall", "jointly", "often", "rarely", "quickly", "slowly", "again", "further"]
CAPS = ["This", "Our", "We", "These", "Such", "Most", "Several", "Both", "Another", "Here", "Overall",
        "In", "For", "When", "Although", "Because", "Moreover", "However", "Finally", "Then"]
FIRST = ["John", "Alice", "Bob", "Maria", "Wei", "Priya", "Omar", "Lena", "Kenji", "Sofia", "Ivan", "Chloe",
         "Nadia", "Pedro", "Hannah", "Tariq"]
LAST = ["Smith", "Doe", "Roe", "Garcia", "Chen", "Patel", "Haddad", "Novak", "Tanaka", "Rossi", "Petrov",
        "Martin", "Okafor", "Larsen", "Moreau", "Schmidt", "Kowalski", "Ibrahim"]
TITLE_WORDS = ["deep", "parsing", "learning", "graph", "neural", "retrieval", "scientific", "generation",
               "sparse", "attention", "robust", "tables", "citations", "corpus", "transfer", "models",
               "document", "structure", "language", "context", "latent", "reasoning", "efficient", "search",
               "adaptive", "semantic", "hierarchical", "contrastive", "multilingual", "summaries"]
VENUES = ["Annual Meeting on Text Mining", "Conference on Document Analysis", "Workshop on Scholarly Data",
          "Joint Conference on Language Systems", "Symposium on Information Access"]
METHOD_NAMES = ["TabNet", "GraphSum", "CiteLM", "DocFormer", "SciGen", "ParaNet", "RefLink", "TexRank"]
CATEGORIES = ["cs.CL", "cs.LG", "cs.IR", "cs.CV"]
N_PAPERS = 20


# ---------------------------------------------------------------------------
# Small helpers


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def norm_title(t):
    return " ".join("".join(c for c in t.lower() if c.isalnum() or c == " ").split())


def title_case(words):
    return " ".join(w.capitalize() if i == 0 or len(w) > 3 else w for i, w in enumerate(words))


class Sent:
    """One planned sentence: LaTeX source, rendered text, object refs, cites."""

    def __init__(self, tex, plain, refs=(), cites=()):
        self.tex = tex
        self.plain = plain
        self.refs = list(refs)
        self.cites = list(cites)

    def words(self):
        return len(self.plain.split())


class Obj:
    def __init__(self, kind, env, label):
        self.kind = kind
        self.env = env
        self.label = label
        self.number = None
        self.id = None
        self.word = kind.capitalize()
        self.tex = ""
        self.grid = None
        self.ragged = False
        self.x_words = 0
        self.never_ref = False
        self.counter = kind


# ---------------------------------------------------------------------------
# Sentences


class Writer:
    def __init__(self, rng, method, score_macro):
        self.rng = rng
        self.method = method
        self.score_macro = score_macro

    def tokens(self, n, decorate=True):
        rng = self.rng
        tex, plain = [], []
        for _ in range(n):
            w = rng.choice(FILLER)
            r = rng.random() if decorate else 1.0
            if r < 0.03:
                tex.append(f"\\emph{{{w}}}")
                plain.append(f"<italic> {w} </italic>")
            elif r < 0.05:
                tex.append(f"\\textbf{{{w}}}")
                plain.append(f"<bold> {w} </bold>")
            elif r < 0.08:
                tex.append("$x_{i}$")
                plain.append("$x_{i}$")
            elif r < 0.10:
                tex.append("\\method{}")
                plain.append(self.method)
            elif r < 0.11:
                v = rng.randint(10, 99)
                tex.append(f"{v}\\%")
                plain.append(f"{v}%")
            elif r < 0.12 and self.score_macro:
                tex.append(f"\\score{{{w}}}")
                plain.append(f"<bold> best {w} </bold>")
            else:
                tex.append(w)
                plain.append(w)
        return tex, plain

    def sentence(self, lo=10, hi=18, lead=None, cites=()):
        rng = self.rng
        tex, plain = self.tokens(rng.randint(lo, hi))
        first = lead or rng.choice(CAPS)
        tex.insert(0, first)
        plain.insert(0, first)
        for key in cites:
            pos = rng.randint(2, len(tex))
            tilde = rng.random() < 0.5
            tex.insert(pos, ("~" if tilde else "") + f"\\cite{{{key}}}")
            plain.insert(pos, "<cite>")
        t = " ".join(tex).replace(" ~\\cite", "~\\cite") + "."
        return Sent(t, " ".join(plain) + ".", cites=cites)

    def ref_phrase(self, obj, form):
        if form == "eqref":
            return f"\\eqref{{{obj.label}}}", f"({obj.number})"
        if form == "ref":
            return f"{obj.word}~\\ref{{{obj.label}}}", f"{obj.word} {obj.number}"
        if form == "autoref":
            return f"\\autoref{{{obj.label}}}", f"{obj.word} {obj.number}"
        if form == "cref":
            return f"\\cref{{{obj.label}}}", f"{obj.word} {obj.number}"
        return f"{obj.word} {obj.number}", f"{obj.word} {obj.number}"

    def pick_form(self, obj):
        if obj.kind == "equation":
            return "eqref"
        forms = []
        if obj.label:
            forms += ["ref", "autoref", "cref"]
        if obj.number:
            forms.append("text")
        return self.rng.choice(forms)

    def ref_sentence(self, objs, lo=10, hi=16):
        """Sentence mentioning every object in objs."""
        rng = self.rng
        phrases = [self.ref_phrase(o, self.pick_form(o)) for o in objs]
        tex, plain = self.tokens(rng.randint(lo, hi))
        starts_with_ref = phrases[0][0][0] != "\\" or phrases[0][0].startswith("\\autoref") or \
            phrases[0][0].startswith("\\cref")
        if objs[0].kind != "equation" and starts_with_ref and rng.random() < 0.35:
            head_t, head_p = phrases[0]
            rest = phrases[1:]
            tex.insert(0, head_t)
            plain.insert(0, head_p)
        else:
            lead = rng.choice(["As shown in", "We refer to", "Consider", "Following", "Compared with"])
            rest = phrases
            tex.insert(0, lead)
            plain.insert(0, lead)
        for t, p in rest:
            pos = rng.randint(2, len(tex))
            tex.insert(pos, t)
            plain.insert(pos, p)
        # \cref at sentence start renders lowercase in LaTeX but not here:
        # the plan only depends on the rendering below.
        return Sent(" ".join(tex) + ".", " ".join(plain) + ".", refs=[o.id for o in objs])

    def section_ref_sentence(self, sec_label, sec_number):
        tex, plain = self.tokens(self.rng.randint(8, 14))
        s = Sent("As discussed in Section~\\ref{" + sec_label + "} " + " ".join(tex) + ".",
                 f"As discussed in Section {sec_number} " + " ".join(plain) + ".")
        return s

    def equation_sentence(self, eq):
        lead_t, lead_p = self.tokens(self.rng.randint(4, 8), decorate=False)
        tail_t, tail_p = self.tokens(self.rng.randint(4, 8), decorate=False)
        body = self.rng.choice(["f(x) = \\sum_{i} w_{i} x_{i}", "L = - \\log p(y \\mid x)",
                                "h_{t} = \\sigma(W h_{t-1} + b)", "s(q, d) = q^{\\top} d"])
        env = eq.env
        label = f"\\label{{{eq.label}}} " if eq.label else ""
        tex = ("We define " + " ".join(lead_t) + f"\n\\begin{{{env}}}\n{label}{body}\n\\end{{{env}}}\n" +
               " ".join(tail_t) + ".")
        plain = "We define " + " ".join(lead_p) + f" <equation> {body} </equation> " + " ".join(tail_p) + "."
        eq.x_words = len(body.split())
        return Sent(tex, plain)


# ---------------------------------------------------------------------------
# Objects


def make_table(rng, pid, k, variant):
    label = f"tab:{pid}-{k}" if variant != "unlabeled" else None
    env = "table*" if variant == "wide" else "table"
    o = Obj("table", env, label)
    n_cols = rng.randint(2, 4)
    n_rows = rng.randint(2, 4)
    header = ["Model"] + [rng.choice(["Acc", "F1", "BLEU", "Recall", "Prec"]) + str(c) for c in range(1, n_cols)]
    rows = [[rng.choice(METHOD_NAMES) + str(r)] + [f"{rng.randint(10, 99)}.{rng.randint(0, 9)}"
                                                    for _ in range(n_cols - 1)] for r in range(n_rows)]
    grid = [header] + rows
    colspec = "l" + "c" * (n_cols - 1)
    lines = [" & ".join(header) + " \\\\"]
    if variant == "multicolumn":
        lines = ["\\multicolumn{2}{c}{Setup} & " + " & ".join(["--"] * (n_cols - 2)) + " \\\\" if n_cols > 2
                 else "\\multicolumn{2}{c}{Setup} \\\\"] + lines
        grid = [["Setup", ""] + ["--"] * (n_cols - 2)] + grid
    if variant == "ragged":
        rows[-1] = rows[-1][:-1]
        grid = [header] + rows
        o.ragged = True
    body_rows = [" & ".join(r) + " \\\\" for r in rows]
    if variant == "nested":
        # The first data cell holds a stacked tabular; it flattens to "a b".
        first = "\\begin{tabular}{@{}c@{}}" + rows[0][0] + " \\\\ v2\\end{tabular}"
        body_rows[0] = " & ".join([first] + rows[0][1:]) + " \\\\"
        grid[1 + (1 if variant == "multicolumn" else 0)][0] = rows[0][0] + " v2"
    if variant == "booktabs" or variant == "wide":
        inner = ["\\toprule"] + lines + ["\\midrule"] + body_rows + ["\\bottomrule"]
    else:
        inner = ["\\hline"] + lines + ["\\hline"] + body_rows + ["\\hline"]
    tabular = f"\\begin{{tabular}}{{{colspec}}}\n" + "\n".join(inner) + "\n\\end{tabular}"
    if variant == "resize":
        tabular = "\\resizebox{\\linewidth}{!}{%\n" + tabular + "}"
    caption = "Scores of " + rng.choice(METHOD_NAMES) + " on the benchmark."
    parts = [f"\\begin{{{env}}}[t]", "\\centering", f"\\caption{{{caption}}}"]
    if label:
        parts.append(f"\\label{{{label}}}")
    if variant == "center":
        parts = [f"\\begin{{{env}}}[t]", f"\\caption{{{caption}}}"] + ([f"\\label{{{label}}}"] if label else [])
        parts.append("\\begin{center}\n" + tabular + "\n\\end{center}")
    else:
        parts.append(tabular)
    parts.append(f"\\end{{{env}}}")
    o.tex = "\n".join(parts)
    o.grid = grid
    return o


def make_figure(rng, pid, k, variant):
    label = f"fig:{pid}-{k}" if variant != "unlabeled" else None
    o = Obj("figure", "figure", label)
    caption = "Behaviour of " + rng.choice(METHOD_NAMES) + " across settings."
    lab = [f"\\label{{{label}}}"] if label else []
    if variant == "sub":
        subs = []
        for s in range(2):
            subs.append("\\begin{subfigure}{0.45\\linewidth}\n\\includegraphics[width=\\linewidth]"
                        f"{{figs/{pid}_{k}{'ab'[s]}.png}}\n\\caption{{Part {s + 1}.}}\n\\end{{subfigure}}")
        o.tex = "\n".join(["\\begin{figure}[t]", "\\centering"] + subs + [f"\\caption{{{caption}}}"] + lab +
                          ["\\end{figure}"])
    else:
        o.tex = "\n".join(["\\begin{figure}[t]", "\\centering",
                           f"\\includegraphics[width=0.9\\linewidth]{{figs/{pid}_{k}.pdf}}",
                           f"\\caption{{{caption}}}"] + lab + ["\\end{figure}"])
    return o


def make_algorithm(rng, writer, pid, k, long_body):
    label = f"alg:{pid}-{k}"
    o = Obj("algorithm", "algorithm", label)
    target = rng.randint(220, 420) if long_body else rng.randint(40, 120)
    states, words = [], 0
    while words < target:
        t, _ = writer.tokens(rng.randint(6, 12), decorate=False)
        if rng.random() < 0.2:
            cond, _ = writer.tokens(3, decorate=False)
            states.append("\\For{" + " ".join(cond) + "}\n  \\State " + " ".join(t) + "\n\\EndFor")
            words += 3 + len(t)
        else:
            states.append("\\State " + " ".join(t))
            words += len(t)
    o.x_words = words
    o.tex = "\n".join(["\\begin{algorithm}[t]", f"\\caption{{Training loop of {writer.method}.}}",
                       f"\\label{{{label}}}", "\\begin{algorithmic}[1]"] + states +
                      ["\\end{algorithmic}", "\\end{algorithm}"])
    return o


def make_theorem(rng, writer, pid, k, env, word, counter, long_body, labeled=True):
    label = f"thm:{pid}-{k}" if labeled else None
    o = Obj("theorem", env, label)
    o.word = word
    o.counter = counter
    target = rng.randint(210, 400) if long_body else rng.randint(25, 90)
    sents, words = [], 0
    while words < target:
        tex, plain = writer.tokens(rng.randint(8, 14), decorate=False)
        lead = rng.choice(["Let", "Then", "Assume", "Suppose", "Hence"])
        sents.append(lead + " " + " ".join(tex) + ".")
        words += 1 + len(tex)
    o.x_words = words
    lab = f"\\label{{{label}}}\n" if label else ""
    o.tex = f"\\begin{{{env}}}\n{lab}" + " ".join(sents) + f"\n\\end{{{env}}}"
    return o


def make_verbatim(rng, pid, k):
    o = Obj("verbatim", rng.choice(["verbatim", "lstlisting"]), None)
    lines = ["for doc in corpus:", "    tables = parse(doc)  # 100% of objects", "    emit(tables)",
             "\\end{itemize} stays literal here"]
    o.tex = f"\\begin{{{o.env}}}\n" + "\n".join(lines[: rng.randint(2, 4)]) + f"\n\\end{{{o.env}}}"
    o.never_ref = True
    return o


def make_text(rng, writer, pid, k):
    env = rng.choice(["itemize", "enumerate", "quote"])
    o = Obj("text", env, None)
    if env == "quote":
        t, _ = writer.tokens(rng.randint(12, 20), decorate=False)
        o.tex = "\\begin{quote}\n" + " ".join(t) + "\n\\end{quote}"
    else:
        items = []
        for _ in range(rng.randint(2, 4)):
            t, _ = writer.tokens(rng.randint(5, 9), decorate=False)
            items.append("\\item " + " ".join(t))
        o.tex = f"\\begin{{{env}}}\n" + "\n".join(items) + f"\n\\end{{{env}}}"
    o.never_ref = True
    return o


# ---------------------------------------------------------------------------
# Papers


class Paper:
    def __init__(self, idx):
        self.idx = idx
        self.pid = f"p{idx:02d}"
        self.title = ""
        self.authors = []
        self.sections = []  # (title, label, number, [items]); item = ("para", [Sent]) | ("obj", Obj)
        self.preamble_items = []
        self.objects = []
        self.bib = []
        self.has_sidecar = True
        self.categories = []
        self.multi_file = False
        self.latin1 = False
        self.bib_style = "inline"


def plan_objects(rng, writer, p, shape):
    """Objects in document order (equations excluded)."""
    objs = []
    for k in range(shape["tables"]):
        objs.append(make_table(rng, p.pid, k + 1, shape["table_variants"][k]))
    for k in range(shape["figures"]):
        objs.append(make_figure(rng, p.pid, k + 1, shape["figure_variants"][k]))
    for k in range(shape["algorithms"]):
        objs.append(make_algorithm(rng, writer, p.pid, k + 1, long_body=(k == 0 and shape["long_alg"])))
    for k, (env, word, counter, long_body, labeled) in enumerate(shape["theorems"]):
        objs.append(make_theorem(rng, writer, p.pid, k + 1, env, word, counter, long_body, labeled))
    for k in range(shape["verbatim"]):
        objs.append(make_verbatim(rng, p.pid, k + 1))
    for k in range(shape["text"]):
        objs.append(make_text(rng, writer, p.pid, k + 1))
    rng.shuffle(objs)
    return objs


def number_and_identify(p):
    """Printed numbers and ids, in document order."""
    counters, ordinals = {}, {}
    for obj in p.all_objects_in_order():
        numbered = False
        if obj.kind in ("table", "figure", "algorithm"):
            numbered = True
        elif obj.kind == "equation":
            numbered = not obj.env.endswith("*")
        elif obj.kind == "theorem":
            numbered = obj.counter is not None
        if numbered:
            key = obj.counter if obj.kind == "theorem" else obj.kind
            counters[key] = counters.get(key, 0) + 1
            obj.number = str(counters[key])
        ordinals[obj.kind] = ordinals.get(obj.kind, 0) + 1
        obj.id = obj.label or f"{obj.kind}-{ordinals[obj.kind]}"


def _all_objects_in_order(self):
    out = []
    for items in [self.preamble_items] + [s[3] for s in self.sections]:
        for kind, payload in items:
            if kind == "obj":
                out.append(payload)
            elif kind == "para":
                for s in payload:
                    if getattr(s, "equation", None) is not None:
                        out.append(s.equation)
    return out


Paper.all_objects_in_order = _all_objects_in_order


def desc_paragraph(rng, writer, target, others, eqs, sec_refs):
    """One of the span patterns; the gold span is recomputed later anyway."""
    fill = writer.sentence
    pattern = rng.choice(["end", "other", "last", "dual", "eq", "secref"])
    if pattern == "other" and others:
        o = rng.choice(others)
        return [fill(), writer.ref_sentence([target]), fill(), writer.ref_sentence([o]), fill()]
    if pattern == "last":
        return [fill(), fill(), writer.ref_sentence([target])]
    if pattern == "dual" and others:
        o = rng.choice(others)
        return [writer.ref_sentence([target]), writer.ref_sentence([target, o]), fill(), fill()]
    if pattern == "eq" and eqs:
        e = rng.choice(eqs)
        return [writer.ref_sentence([target]), fill(), writer.ref_sentence([e]), fill()]
    if pattern == "secref" and sec_refs:
        lab, num = rng.choice(sec_refs)
        return [writer.ref_sentence([target]), writer.section_ref_sentence(lab, num), fill()]
    return [writer.ref_sentence([target]), fill(), fill(), fill(14, 22)]


def build_paper(rng, idx, all_titles, shape):
    p = Paper(idx)
    method = rng.choice(METHOD_NAMES)
    writer = Writer(rng, method, shape.get("score_macro", False))
    p.method = method
    p.score_macro = shape.get("score_macro", False)
    p.title = all_titles[idx - 1]
    p.authors = [f"{rng.choice(FIRST)} {rng.choice(LAST)}" for _ in range(rng.randint(1, 3))]
    p.categories = [rng.choice(CATEGORIES)]
    p.has_sidecar = shape.get("sidecar", True)
    p.multi_file = shape.get("multi_file", False)
    p.latin1 = shape.get("latin1", False)
    p.bib_style = shape["bib_style"]
    p.abstract = [writer.sentence() for _ in range(3)]

    # Bibliography keys are planned first so sentences can cite them.
    p.bib = shape["bib"]
    intro_keys = [b["key"] for b in p.bib if b.get("intro")]
    other_keys = [b["key"] for b in p.bib if not b.get("intro")]

    objs = plan_objects(rng, writer, p, shape)
    eqs = []
    for k in range(shape["equations"]):
        env = "equation*" if (k == 1 and shape["equations"] > 2) else "equation"
        e = Obj("equation", env, f"eq:{p.pid}-{k + 1}" if env == "equation" else None)
        eqs.append(e)

    sections = shape["sections"]
    body_sections = [s for s in sections if s not in ("Introduction", "Background", "Conclusion")]
    per_section = {s: [] for s in body_sections}
    for n, o in enumerate(objs):
        per_section[body_sections[n % len(body_sections)]].append(o)
    eq_by_section = {s: [] for s in body_sections}
    for n, e in enumerate(eqs):
        eq_by_section[body_sections[n % len(body_sections)]].append(e)

    sec_labels = []
    for n, title in enumerate(sections):
        sec_labels.append((f"sec:{p.pid}-{n + 1}", str(n + 1)))

    # Skeleton: paragraphs are placeholders until numbering is known.
    placeholder_items = []
    for n, title in enumerate(sections):
        items = []
        if title in ("Introduction", "Background"):
            words_goal = shape["intro_words"]
            got = 0
            paras = []
            keys = list(intro_keys)
            while got < words_goal:
                para = []
                for _ in range(rng.randint(3, 5)):
                    cites = [keys.pop(0)] if keys and rng.random() < 0.7 else []
                    s = writer.sentence(cites=cites)
                    para.append(s)
                    got += s.words()
                    if got >= words_goal:
                        break
                paras.append(para)
            while keys:  # every intro key is cited somewhere in the intro
                s = writer.sentence(cites=[keys.pop(0)])
                paras[-1].append(s)
            items = [("para", para) for para in paras]
        elif title == "Conclusion":
            items = [("para", [writer.sentence() for _ in range(rng.randint(3, 5))]) for _ in range(2)]
            if other_keys:
                items[0][1].append(writer.sentence(cites=other_keys[:2]))
        else:
            items.append(("para", [writer.sentence() for _ in range(rng.randint(3, 5))]))
            for e in eq_by_section[title]:
                s = writer.equation_sentence(e)
                s.equation = e
                items.append(("para", [writer.sentence(), s, writer.sentence()]))
            for o in per_section[title]:
                forward = rng.random() < 0.2
                if forward and not o.never_ref:
                    items.append(("desc", o))
                    items.append(("obj", o))
                else:
                    items.append(("obj", o))
                    if not o.never_ref:
                        items.append(("desc", o))
                items.append(("para", [writer.sentence() for _ in range(rng.randint(2, 4))]))
        placeholder_items.append(items)
    p.sections = [(title, sec_labels[n][0], sec_labels[n][1], placeholder_items[n])
                  for n, title in enumerate(sections)]

    # Objects marked unreferenced stay that way.
    for o in objs:
        if rng.random() < shape.get("unref_rate", 0.1) and o.kind in ("table", "figure"):
            o.never_ref = True
    number_and_identify(p)

    # Unlabeled unnumbered objects can't be referenced at all.
    for o in objs:
        if not o.label and not o.number:
            o.never_ref = True

    refable = [o for o in objs if not o.never_ref]
    eq_refable = [e for e in eqs if e.label]
    for n, (title, lab, num, items) in enumerate(p.sections):
        filled = []
        for kind, payload in items:
            if kind == "desc":
                if payload.never_ref:
                    continue
                others = [o for o in refable if o is not payload]
                sec_refs = [(sl, sn) for sl, sn in sec_labels[: n + 1]]
                filled.append(("para", desc_paragraph(rng, writer, payload, others, eq_refable, sec_refs)))
            else:
                filled.append((kind, payload))
        p.sections[n] = (title, lab, num, filled)

    # Pad to the requested length with plain paragraphs in the last body section.
    goal = shape["min_words"]
    while body_words(p) < goal:
        t, lab, num, items = p.sections[-1] if sections[-1] != "Conclusion" or len(p.sections) < 2 \
            else p.sections[-2]
        items.append(("para", [writer.sentence(14, 22) for _ in range(rng.randint(3, 5))]))
    p.objects = p.all_objects_in_order()
    return p


def body_sentences(p):
    """Flattened body sentences with their paragraph number."""
    out = []
    para_no = 0
    groups = [p.preamble_items] + [s[3] for s in p.sections]
    for items in groups:
        for kind, payload in items:
            if kind != "para":
                continue
            for s in payload:
                out.append((para_no, s))
            para_no += 1
    return out


def body_words(p):
    return sum(s.words() for _, s in body_sentences(p))


def gold_span(sents, obj_id):
    """First referring sentence, extended to paragraph end or to the first
    sentence that refers only to other objects."""
    first = next((k for k, (_, s) in enumerate(sents) if obj_id in s.refs), None)
    if first is None:
        return None, False
    para = sents[first][0]
    j = first
    dual = len(set(sents[first][1].refs) - {obj_id}) > 0
    while j + 1 < len(sents) and sents[j + 1][0] == para:
        refs = set(sents[j + 1][1].refs)
        if refs and obj_id not in refs:
            break
        if obj_id in refs and len(refs) > 1:
            dual = True
        j += 1
    return (first, j), dual


# ---------------------------------------------------------------------------
# LaTeX emission


def paragraph_tex(para):
    return "\n".join(s.tex for s in para)


def section_tex(title, label, items, unnumbered=False):
    out = [f"\\section{'*' if unnumbered else ''}{{{title}}}\\label{{{label}}}", ""]
    for kind, payload in items:
        if kind == "para":
            out.append(paragraph_tex(payload))
        else:
            out.append(payload.tex)
        out.append("")
    return "\n".join(out)


def bib_raw(entry, style):
    authors = entry["authors_written"]
    if style == "bbl":
        a = authors.replace(". ", ".~")
        return (f"\\bibitem{{{entry['key']}}}\n{a}.\n\\newblock {entry['title_written']}.\n"
                f"\\newblock In {{\\em {entry['venue']}}}, {entry['year']}.\n")
    return f"\\bibitem{{{entry['key']}}} {authors}. {entry['title_written']}. In {entry['venue']}, {entry['year']}.\n"


def bib_record(entry):
    names = " and ".join(f"{l}, {f}" for f, l in entry["people"])
    return (f"@inproceedings{{{entry['key']},\n  title = {{{entry['title_written']}}},\n  author = {{{names}}},\n"
            f"  booktitle = {{{entry['venue']}}},\n  year = {entry['year']}\n}}\n")


def write_paper(root, p):
    d = os.path.join(root, p.pid)
    os.makedirs(d, exist_ok=True)
    pre = ["\\documentclass{article}", "\\usepackage{amsmath,amsthm,graphicx,booktabs,algpseudocode}",
           "% macros used throughout", f"\\newcommand{{\\method}}{{{p.method}}}",
           "\\newtheorem{theorem}{Theorem}", "\\newtheorem{lemma}[theorem]{Lemma}",
           "\\newtheorem{definition}{Definition}"]
    if p.score_macro:
        pre.append("\\newcommand{\\score}[2][best]{\\textbf{#1 #2}}")
    pre += [f"\\title{{{p.title}}}", "\\author{" + " \\and ".join(p.authors) + "}", "", "\\begin{document}",
            "\\maketitle", "", "\\begin{abstract}", paragraph_tex(p.abstract), "\\end{abstract}", ""]
    for kind, payload in p.preamble_items:
        pre.append(paragraph_tex(payload) if kind == "para" else payload.tex)
        pre.append("")
    files = {}
    body = []
    for n, (title, label, num, items) in enumerate(p.sections):
        text = section_tex(title, label, items)
        if p.multi_file and n > 0:
            name = f"sections/s{n}"
            files[name + ".tex"] = text
            body.append(("\\input{" if n % 2 else "\\include{") + name + "}")
            body.append("")
        else:
            body.append(text)
    tail = [""]
    used = [b for b in p.bib]
    if p.bib_style == "inline":
        tail += ["\\begin{thebibliography}{99}"] + [bib_raw(b, "inline") for b in used] + ["\\end{thebibliography}"]
    elif p.bib_style == "bbl":
        tail += ["\\bibliographystyle{plain}", "\\bibliography{refs}"]
        with open(os.path.join(d, "refs.bbl"), "w", encoding="utf-8") as f:
            f.write("\\begin{thebibliography}{10}\n\n" + "\n".join(bib_raw(b, "bbl") for b in used) +
                    "\n\\end{thebibliography}\n")
    else:
        tail += ["\\bibliographystyle{plain}", "\\bibliography{refs}"]
        with open(os.path.join(d, "refs.bib"), "w", encoding="utf-8") as f:
            f.write("@string{anon = \"Anonymous\"}\n\n" + "\n".join(bib_record(b) for b in used))
        if p.bib_style == "bib2":
            with open(os.path.join(d, "unused.bib"), "w", encoding="utf-8") as f:
                f.write("@article{stray1,\n  title = {Not Cited Here},\n  author = {Nobody, Ann},\n"
                        "  year = 1999\n}\n")
    tail += ["", "\\end{document}", ""]
    main = "\n".join(pre + body + tail)
    enc = "latin-1" if p.latin1 else "utf-8"
    with open(os.path.join(d, "main.tex"), "w", encoding=enc) as f:
        f.write(main)
    for name, text in files.items():
        os.makedirs(os.path.join(d, os.path.dirname(name)), exist_ok=True)
        with open(os.path.join(d, name), "w", encoding="utf-8") as f:
            f.write(text)
    if p.has_sidecar:
        with open(os.path.join(d, "metadata.json"), "w", encoding="utf-8") as f:
            json.dump({"title": p.title, "authors": p.authors, "categories": p.categories,
                       "date": f"2021-0{1 + p.idx % 9}-1{p.idx % 10}"}, f, indent=2)
            f.write("\n")


# ---------------------------------------------------------------------------
# Corpus


def paper_shapes(rng):
    shapes = []
    for idx in range(1, N_PAPERS + 1):
        tv = rng.sample(["booktabs", "hline", "center", "resize", "wide", "unlabeled", "multicolumn"], 3)
        fv = rng.sample(["plain", "sub", "unlabeled", "plain"], 2)
        theorems = []
        if idx % 2 == 0:
            theorems.append(("theorem", "Theorem", "theorem", idx % 4 == 0, True))
            theorems.append(("lemma", "Lemma", "theorem", idx % 3 == 0, True))
        if idx % 3 == 0:
            theorems.append(("definition", "Definition", "definition", False, True))
        if idx % 5 == 0:
            theorems.append(("proof", "Proof", None, False, False))
        shape = {
            "tables": rng.randint(1, 3),
            "table_variants": tv,
            "figures": rng.randint(1, 2),
            "figure_variants": fv,
            "algorithms": 1 if idx % 3 != 1 else 0,
            "long_alg": idx % 2 == 1,
            "theorems": theorems,
            "verbatim": 1 if idx % 4 == 0 else 0,
            "text": 1 if idx % 3 == 0 else 0,
            "equations": rng.randint(1, 3),
            "sections": ["Introduction", "Method", "Experiments", "Analysis", "Conclusion"],
            "intro_words": rng.randint(260, 700),
            "min_words": rng.randint(1500, 2600),
            "bib_style": ["inline", "bbl", "bib"][idx % 3],
            "multi_file": idx % 4 == 2,
            "sidecar": idx % 6 != 5,
            "score_macro": idx % 5 == 2,
        }
        shapes.append(shape)
    # Specific shapes.
    shapes[3]["table_variants"][0] = "ragged"      # p04: unequal columns
    shapes[7]["table_variants"][0] = "nested"      # p08: tabular inside a cell
    shapes[8]["table_variants"][0] = "multicolumn"
    shapes[4]["intro_words"] = 150                  # p05: introduction too short for a sample
    shapes[10]["sections"][0] = "Background"        # p11: no Introduction
    shapes[2]["intro_words"] = 1100                 # p03: introduction too long for a sample
    shapes[2]["min_words"] = 2400
    shapes[6].update(min_words=0, intro_words=200, sections=["Introduction", "Method", "Conclusion"],
                    tables=1, figures=1, algorithms=0, theorems=[], equations=1)  # p07: too short
    shapes[14]["bib_style"] = "bib2"                # p15: only the named .bib counts
    shapes[15]["latin1"] = True                     # p16
    return shapes


def make_bib(rng, papers_meta, idx, n_external, externals):
    """Fixture citations (linkable) and external ones (not in the database)."""
    entries = []
    others = [k for k in range(1, N_PAPERS + 1) if k != idx]
    cited = rng.sample(others, rng.randint(2, 4))
    for n, k in enumerate(cited):
        meta = papers_meta[k - 1]
        title = meta["title"]
        if rng.random() < 0.4:  # one substituted character
            pos = rng.randrange(len(title))
            while not title[pos].isalpha():
                pos = rng.randrange(len(title))
            c = "x" if title[pos].lower() != "x" else "z"
            title = title[:pos] + c + title[pos + 1:]
        people = [tuple(a.split(" ", 1)) for a in meta["authors"]]
        if rng.random() < 0.5:
            written = " and ".join(f"{f[0]}. {l}" for f, l in people)
        else:
            written = " and ".join(f"{f} {l}" for f, l in people)
        entries.append({"key": f"{people[0][1].lower()}{2015 + k}{'abcd'[n]}", "title_written": title,
                        "people": people, "authors_written": written, "venue": rng.choice(VENUES),
                        "year": 2015 + k, "target": meta["pid"], "intro": n < 2})
    for n in range(n_external):
        ext = externals.pop()
        entries.append({"key": f"ext{idx:02d}{n}", "title_written": ext["title"], "people": ext["people"],
                        "authors_written": " and ".join(f"{f} {l}" for f, l in ext["people"]),
                        "venue": rng.choice(VENUES), "year": rng.randint(1995, 2020), "target": None,
                        "intro": n == 0, "ext_id": ext["id"]})
    return entries


def unique_titles(rng, n, taken):
    out = []
    while len(out) < n:
        t = title_case(rng.sample(TITLE_WORDS, rng.randint(4, 7)))
        nt = norm_title(t)
        if all(levenshtein(nt, norm_title(o)) / max(len(nt), len(norm_title(o))) > 0.4 for o in taken + out):
            out.append(t)
    return out


def generate(root, rng):
    corpus_dir = os.path.join(root, "corpus")
    if os.path.isdir(corpus_dir):
        shutil.rmtree(corpus_dir)
    os.makedirs(corpus_dir)
    shapes = paper_shapes(rng)
    titles = unique_titles(rng, N_PAPERS, [])
    ext_titles = unique_titles(rng, 60, titles)
    distractor_titles = unique_titles(rng, 30, titles + ext_titles)
    externals = [{"id": f"ext-{k:03d}", "title": t,
                  "people": [(rng.choice(FIRST), rng.choice(LAST)) for _ in range(rng.randint(1, 3))]}
                 for k, t in enumerate(ext_titles)]
    ext_pool = list(externals)

    # Authors are drawn once per paper so citations can reuse them.
    meta = []
    author_rng = rng
    for k in range(N_PAPERS):
        meta.append({"pid": f"p{k + 1:02d}", "title": titles[k],
                     "authors": [f"{author_rng.choice(FIRST)} {author_rng.choice(LAST)}"
                                 for _ in range(author_rng.randint(1, 3))]})
    papers = []
    for idx in range(1, N_PAPERS + 1):
        shape = shapes[idx - 1]
        shape["bib"] = make_bib(rng, meta, idx, rng.randint(1, 3), ext_pool)
        p = build_paper(rng, idx, titles, shape)
        p.authors = meta[idx - 1]["authors"]
        if idx == 13:  # p13: long but without any sectioning
            all_items = []
            for _, _, _, items in p.sections:
                all_items += items
            p.preamble_items = all_items
            p.sections = []
            p.objects = p.all_objects_in_order()
        if p.latin1:
            note = "Our caf\u00e9 study ends here with a short note on naming."
            p.sections[-1][3].append(("para", [Sent(note, note)]))
        papers.append(p)
        write_paper(corpus_dir, p)

    # Broken paper for the batch error path (kept outside the corpus).
    broken = os.path.join(root, "broken", "pbad")
    os.makedirs(broken, exist_ok=True)
    with open(os.path.join(broken, "main.tex"), "w", encoding="utf-8") as f:
        f.write("\\documentclass{article}\n\\begin{document}\n\\section{Introduction}\n"
                "Text before an open list.\n\\begin{itemize}\n\\item never closed\n\\end{document}\n")

    return papers, externals, distractor_titles


def gold(papers, externals, distractor_titles, rng):
    """Gold files derived from the plans."""
    expected = {"papers": {}, "kept": [], "rejects": {}}
    spans = []
    labels = []
    kind_counts = {}
    desc_counts = {"table": 0, "figure": 0, "algorithm": 0, "theorem": 0}
    para_count = 0
    link_entries = link_linked = 0
    kept_ids = set()
    for p in papers:
        wc = body_words(p)
        reason = None
        if wc < 1000:
            reason = "too_short"
        elif wc > 12000:
            reason = "too_long"
        elif not p.sections:
            reason = "no_sections"
        if reason is None:
            kept_ids.add(p.pid)

    for p in papers:
        sents = body_sentences(p)
        wc = body_words(p)
        kept = p.pid in kept_ids
        reason = None if kept else ("too_short" if wc < 1000 else "no_sections")
        intro = None
        if p.sections and p.sections[0][0] == "Introduction":
            intro = sum(s.words() for kind, para in p.sections[0][3] if kind == "para" for s in para)
        rec = {"kept": kept, "reject": reason, "word_count": wc, "sentences": len(sents), "intro_words": intro,
               "objects": [{"id": o.id, "kind": o.kind, "number": o.number} for o in p.objects],
               "tables": {o.id: o.grid for o in p.objects if o.kind == "table"},
               "bib": {b["key"]: b["target"] for b in p.bib},
               "title": p.title}
        expected["papers"][p.pid] = rec
        if not kept:
            expected["rejects"][reason] = expected["rejects"].get(reason, 0) + 1
            continue
        expected["kept"].append(p.pid)
        for o in p.objects:
            kind_counts[o.kind] = kind_counts.get(o.kind, 0) + 1
        for o in p.objects:
            if o.kind == "figure":
                r = rng.random()
                if r < 0.7:
                    labels.append({"paper_id": p.pid, "figure_label": o.id, "chart_or_bar": r < 0.5})
        chart = {(l["paper_id"], l["figure_label"]): l["chart_or_bar"] for l in labels}
        for o in p.objects:
            span, dual = gold_span(sents, o.id)
            spans.append({"paper_id": p.pid, "object_id": o.id, "kind": o.kind,
                          "span": list(span) if span else None, "dual": dual})
            if span is None or o.kind not in desc_counts:
                continue
            words = sum(sents[k][1].words() for k in range(span[0], span[1] + 1))
            if words < 30:
                continue
            if o.kind == "table" and o.ragged:
                continue
            if o.kind == "figure" and not chart.get((p.pid, o.id), False):
                continue
            if o.kind in ("algorithm", "theorem") and not (200 <= o.x_words <= 500):
                continue
            desc_counts[o.kind] += 1
        if intro is not None and 200 <= intro <= 1000:
            para_count += 1
        link_entries += len(p.bib)
        link_linked += sum(1 for b in p.bib if b["target"] is not None)

    expected["object_counts"] = kind_counts
    expected["desc_counts_context20"] = desc_counts
    expected["para_count"] = para_count
    expected["links"] = {"entries": link_entries, "linked_db": link_linked, "linked_db_full": link_entries}

    db = [{"id": p.pid, "title": p.title, "authors": p.authors} for p in papers]
    for k, t in enumerate(distractor_titles):
        db.append({"id": f"dist-{k:03d}", "title": t,
                   "authors": [f"{rng.choice(FIRST)} {rng.choice(LAST)}"]})
    used_ext = {b["ext_id"] for p in papers for b in p.bib if b["target"] is None}
    db_full = db + [{"id": e["id"], "title": e["title"], "authors": [f"{f} {l}" for f, l in e["people"]]}
                    for e in externals if e["id"] in used_ext]
    return expected, spans, labels, db, db_full
