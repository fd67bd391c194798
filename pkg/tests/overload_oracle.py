"""Naive two-stage overload resolution, kept independent of the
implementation under test, plus a seeded random-model generator."""

from __future__ import annotations

import random
from pathlib import Path

from ueber.model import (
    CollectedModel,
    ElementOf,
    Function,
    Language,
    SourcedDecl,
)
from ueber.terms import Atom, Compound


def naive_chain(lang):
    out = [lang]
    while isinstance(lang, Compound):
        lang = lang.args[0]
        out.append(lang)
    return out


def oracle_overloads(m: CollectedModel, r: str, infiles, outfiles):
    funcs = [sd.decl for sd in m.decls
             if isinstance(sd.decl, Function) and sd.decl.func == r]
    elems = [(sd.decl.file, sd.decl.lang) for sd in m.decls
             if isinstance(sd.decl, ElementOf)]

    def file_langs(f):
        return [l for (g, l) in elems if g == f]

    def position_ok(f, param):
        return any(param in naive_chain(l) for l in file_langs(f))

    stage1 = []
    for d in funcs:
        if len(d.inlangs) != len(infiles) or len(d.outlangs) != len(outfiles):
            continue
        if all(position_ok(f, p) for f, p in zip(infiles, d.inlangs)) and \
                all(position_ok(f, p) for f, p in zip(outfiles, d.outlangs)):
            stage1.append(d)

    def below_or_equal(a, b):
        return b in naive_chain(a)

    survivors = []
    for c1 in stage1:
        shadowed = False
        for c2 in stage1:
            if (c2.inlangs, c2.outlangs) == (c1.inlangs, c1.outlangs):
                continue
            if all(below_or_equal(a, b) for a, b in zip(c2.inlangs, c1.inlangs)) \
                    and all(below_or_equal(a, b)
                            for a, b in zip(c2.outlangs, c1.outlangs)):
                shadowed = True
                break
        if not shadowed:
            survivors.append(c1)
    return [(d.goal, d.inlangs, d.outlangs) for d in survivors]


def random_model(rng: random.Random):
    """A model with hierarchy depth <= 3 and up to 6 same-named functions."""
    langs = [Atom("text"), Atom("term")]
    for _ in range(rng.randint(2, 8)):
        inner = rng.choice(langs)
        if len(naive_chain(inner)) >= 4:
            continue
        langs.append(Compound(rng.choice("abc"), (inner,)))

    files = [f"f{i}" for i in range(rng.randint(2, 6))]
    decls = [Language(l) for l in langs]
    for f in files:
        for l in rng.sample(langs, rng.randint(1, 2)):
            decls.append(ElementOf(f, l))

    n_in, n_out = rng.randint(1, 2), rng.randint(0, 1)
    for k in range(rng.randint(1, 6)):
        inlangs = tuple(rng.choice(langs) for _ in range(n_in))
        outlangs = tuple(rng.choice(langs) for _ in range(n_out))
        decls.append(Function("f", inlangs, outlangs, Atom(f"g{k}"), ()))

    infiles = tuple(rng.choice(files) for _ in range(n_in))
    outfiles = tuple(rng.choice(files) for _ in range(n_out))
    sds = tuple(SourcedDecl(d, "gen/.ueber", i + 1) for i, d in enumerate(decls))
    return CollectedModel(sds, Path("/nonexistent")), infiles, outfiles
