#!/usr/bin/env python3
"""Writes the bundled toy corpus and its vocabulary.

Sentences come from a small grammar in which every mark has a local cue:
statements and questions end on disjoint word sets, and commas always precede
a conjunction. The output is a pure function of --seed.
"""

import argparse
import pathlib
import random

SUBJECTS = ["Anna", "Erik", "läraren", "grannen", "barnen", "mormor",
            "katten", "studenterna", "doktorn", "fiskaren"]
VERBS = ["läser", "köper", "målar", "lagar", "hittar", "säljer", "tvättar",
         "bygger", "flyttar", "lånar"]
OBJECTS = ["boken", "bilen", "huset", "cykeln", "maten", "tavlan", "stolen",
           "båten", "trädgården", "fönstret", "kartan", "paraplyet"]
MIDDLE = ["i köket", "på morgonen", "med glädje", "utan hjälp", "vid sjön",
          "i staden"]
STATEMENT_END = ["idag", "ikväll", "hemma", "snart", "igen", "ibland"]
QUESTION_END = ["månne", "egentligen", "verkligen", "alls"]
QUESTION_START = ["Varför", "När", "Hur", "Var"]
CONJUNCTIONS = ["men", "eller", "fast"]


def clause(rng):
    words = [rng.choice(SUBJECTS), rng.choice(VERBS), rng.choice(OBJECTS)]
    if rng.random() < 0.5:
        words.append(rng.choice(MIDDLE))
    return " ".join(words)


def sentence(rng):
    r = rng.random()
    if r < 0.2:
        verb = rng.choice(VERBS)
        return (f"{rng.choice(QUESTION_START)} {verb} {rng.choice(SUBJECTS)} "
                f"{rng.choice(OBJECTS)} {rng.choice(QUESTION_END)}?")
    if r < 0.5:
        return (f"{clause(rng)}, {rng.choice(CONJUNCTIONS)} {clause(rng)} "
                f"{rng.choice(STATEMENT_END)}.")
    if r < 0.6:
        return f"Hon sa: {clause(rng)} {rng.choice(STATEMENT_END)}!"
    return f"{clause(rng)} {rng.choice(STATEMENT_END)}."


def capitalize(s):
    return s[0].upper() + s[1:]


def vocabulary():
    words = set()
    for group in (SUBJECTS, VERBS, OBJECTS, STATEMENT_END, QUESTION_END,
                  QUESTION_START, CONJUNCTIONS, ["hon", "sa"]):
        words.update(w.lower() for w in group)
    for m in MIDDLE:
        words.update(m.split())
    pieces = set()
    for w in words:
        # Long words are split so continuation pieces get exercised.
        if len(w) > 7:
            pieces.add(w[:5])
            pieces.add("##" + w[5:])
        else:
            pieces.add(w)
    return ["[PAD]", "[UNK]", "[CLS]", "[SEP]"] + sorted(pieces)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/toy")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--documents", type=int, default=10)
    ap.add_argument("--words-per-document", type=int, default=200)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    corpus = out / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for d in range(args.documents):
        sentences, words = [], 0
        while words < args.words_per_document:
            s = capitalize(sentence(rng))
            sentences.append(s)
            words += len(s.split())
        lines, line = [], []
        for s in sentences:
            line.append(s)
            if len(line) == 4:
                lines.append(" ".join(line))
                line = []
        if line:
            lines.append(" ".join(line))
        (corpus / f"doc{d:02d}.txt").write_text("\n".join(lines) + "\n",
                                                encoding="utf-8")
    (out / "vocab.txt").write_text("\n".join(vocabulary()) + "\n",
                                   encoding="utf-8")


if __name__ == "__main__":
    main()
