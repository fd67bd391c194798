"""Well-formedness checking: the static integrity of a declaration set.

No artifact file is opened here; only declaration-level facts are
consulted.  The interesting part is overload resolution for named
functions: candidates are matched position-wise through the language
hierarchy, then more specific signatures shadow more general ones.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ILL_FORMED,
    WARNING,
    CollectedModel,
    ElementOf,
    Equivalence,
    Function,
    Language,
    MalformedLang,
    MapsTo,
    Membership,
    Normalization,
    NotElementOf,
    Problem,
    SourcedDecl,
    lang_below_or_equal,
    towards_base,
)
from .plugin_host import MalformedGoal, PredicateSpec, parse_predicate
from .terms import Term, format_plain


@dataclass(frozen=True)
class Overload:
    """One applicable implementation of a named function for given files."""

    pred: PredicateSpec
    goal: Term
    static_args: tuple
    inlangs: tuple
    outlangs: tuple
    origin: str  # declaring file of the function, for unit resolution


def _declared_languages(m: CollectedModel) -> dict:
    by_file: dict = {}
    for sd in m.decls:
        if isinstance(sd.decl, ElementOf):
            by_file.setdefault(sd.decl.file, []).append(sd.decl.lang)
    return by_file


def _position_matches(declared: list, param: Term) -> bool:
    return any(lang_below_or_equal(d, param) for d in declared)


def overloads_for(m: CollectedModel, r: str, infiles, outfiles) -> list:
    """Two-stage overload resolution.

    Stage 1 keeps every function declaration named ``r`` whose parameter
    languages sit position-wise on the chain of some declared language
    of the corresponding file.  Stage 2 drops candidates shadowed by a
    different signature that is equal-or-below at every position.
    """
    by_file = _declared_languages(m)
    candidates = []
    for sd in m.decls:
        d = sd.decl
        if not isinstance(d, Function) or d.func != r:
            continue
        if len(d.inlangs) != len(infiles) or len(d.outlangs) != len(outfiles):
            continue
        ok = all(_position_matches(by_file.get(f, []), p)
                 for f, p in zip(infiles, d.inlangs))
        ok = ok and all(_position_matches(by_file.get(f, []), p)
                        for f, p in zip(outfiles, d.outlangs))
        if not ok:
            continue
        try:
            pred = parse_predicate(d.goal)
        except MalformedGoal:
            continue
        candidates.append(Overload(pred, d.goal, d.argfiles, d.inlangs,
                                   d.outlangs, sd.origin))

    def shadowed(c1: Overload) -> bool:
        for c2 in candidates:
            if (c2.inlangs, c2.outlangs) == (c1.inlangs, c1.outlangs):
                continue
            below = all(lang_below_or_equal(a, b)
                        for a, b in zip(c2.inlangs, c1.inlangs))
            below = below and all(lang_below_or_equal(a, b)
                                  for a, b in zip(c2.outlangs, c1.outlangs))
            if below:
                return True
        return False

    return [c for c in candidates if not shadowed(c)]


def _declared_lang_set(m: CollectedModel) -> set:
    return {sd.decl.lang for sd in m.decls if isinstance(sd.decl, Language)}


def _has_membership_on_chain(m: CollectedModel, chain: list) -> bool:
    return any(isinstance(sd.decl, Membership) and sd.decl.lang in chain
               for sd in m.decls)


def check_model(m: CollectedModel) -> list:
    """Run the per-form checks over every declaration, in order.

    Conditions within one declaration are checked sequentially and stop
    at the first failure, so each declaration reports at most one
    finding (plus warnings).
    """
    declared = _declared_lang_set(m)
    files_with_lang = {sd.decl.file for sd in m.decls
                       if isinstance(sd.decl, ElementOf)}
    problems: list = []

    def report(sd: SourcedDecl, message: str, severity: str = ILL_FORMED):
        problems.append(Problem(severity, message, sd.decl, sd.origin, sd.line))

    def chain_of(sd: SourcedDecl, lang: Term):
        try:
            return towards_base(lang)
        except MalformedLang:
            report(sd, f"Language {format_plain(lang)}: malformed.")
            return None

    for sd in m.decls:
        d = sd.decl
        if isinstance(d, Language):
            chain = chain_of(sd, d.lang)
            if chain is None:
                continue
            for lang in chain[1:]:
                if lang not in declared:
                    report(sd, f"Language {format_plain(lang)}: missing.")
                    break
        elif isinstance(d, (ElementOf, NotElementOf)):
            chain = chain_of(sd, d.lang)
            if chain is None:
                continue
            if not any(lang in declared for lang in chain):
                report(sd, f"Language {format_plain(d.lang)}: missing.")
                continue
            if not _has_membership_on_chain(m, chain):
                report(sd, f"Membership for {format_plain(d.lang)}: missing.",
                       WARNING)
        elif isinstance(d, (Membership, Equivalence, Normalization)):
            if chain_of(sd, d.lang) is None:
                continue
            if d.lang not in declared:
                report(sd, f"Language {format_plain(d.lang)}: missing.")
        elif isinstance(d, Function):
            bad = False
            for lang in list(d.inlangs) + list(d.outlangs):
                if chain_of(sd, lang) is None:
                    bad = True
                    break
                if lang not in declared:
                    report(sd, f"Language {format_plain(lang)}: missing.")
                    bad = True
                    break
            if bad:
                continue
        elif isinstance(d, MapsTo):
            if not any(isinstance(o.decl, Function) and o.decl.func == d.func
                       for o in m.decls):
                report(sd, f"Function {d.func}: missing.")
                continue
            missing_file = next((f for f in d.infiles + d.outfiles
                                 if f not in files_with_lang), None)
            if missing_file is not None:
                report(sd, f"File {missing_file}: elementOf: missing.")
                continue
            if not overloads_for(m, d.func, d.infiles, d.outfiles):
                report(sd, f"Overload {d.func}:({format_plain(list(d.infiles))})"
                           f" → ({format_plain(list(d.outfiles))}): missing.")
    return problems
