"""Repository verification: evaluating declarations against artifacts.

elementOf and notElementOf run every applicable membership test on the
(normalized) artifact; mapsTo applies every applicable function
overload and compares actual outputs with stored baselines under the
declared equivalence.  Check mode never writes; override rewrites
disagreeing baselines; create materializes missing ones.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Optional

from .checker import Overload, overloads_for
from .config import MODE_CHECK, MODE_CREATE, MODE_OVERRIDE, VerifyConfig
from .content import Content, read_content
from .model import (
    UNVERIFIED,
    WARNING,
    CollectedModel,
    ElementOf,
    Equivalence,
    MalformedLang,
    MapsTo,
    Membership,
    Normalization,
    NotElementOf,
    Problem,
    SourcedDecl,
    is_term_lang,
    towards_base,
)
from .plugin_host import (
    Failure,
    HostError,
    InvocationRequest,
    MalformedGoal,
    is_enabled,
    parse_predicate,
    register_native,
)
from . import plugin_host
from .terms import Float, Int, Term, TermSyntaxError, format_plain, write_unit


class _Stop(Exception):
    """Internal: abort verification of one declaration with a message."""

    def __init__(self, message: str, severity: str = UNVERIFIED):
        super().__init__(message)
        self.message = message
        self.severity = severity


def _declared_lang(m: CollectedModel, f: str, default: Optional[Term] = None):
    langs = m.declared_languages(f)
    return langs[0] if langs else default


def _failure_text(exc: Exception) -> str:
    parts = [str(exc), getattr(exc, "detail", "")]
    return " ".join(p for p in parts if p)


def _origin_dir(m: CollectedModel, origin: str) -> Path:
    return (Path(m.root) / origin).parent


def _abs_args(m: CollectedModel, argfiles) -> tuple:
    return tuple(str((Path(m.root) / a).resolve()) for a in argfiles)


def _chain(lang: Term) -> list:
    try:
        return towards_base(lang)
    except MalformedLang as exc:
        raise _Stop(f"Language {format_plain(lang)}: malformed.") from None


def _read_input(m: CollectedModel, f: str, lang: Optional[Term]) -> Content:
    path = Path(m.root) / f
    if not path.is_file():
        raise _Stop(f"File {f}: no such file.")
    try:
        return read_content(path, lang)
    except OSError:
        raise _Stop(f"File {f}: no such file.") from None
    except TermSyntaxError as exc:
        raise _Stop(f"File {f}: unreadable as {format_plain(lang)}: {exc}") from None


def _try_read(m: CollectedModel, f: str, lang: Optional[Term]) -> Optional[Content]:
    path = Path(m.root) / f
    if not path.is_file():
        return None
    try:
        return Content.from_bytes(path.read_bytes(), lang)
    except OSError:
        return None


# --- normalization and equivalence --------------------------------------------


def _normalize(m: CollectedModel, cfg: VerifyConfig, f: str, lang: Optional[Term],
               c: Content) -> Content:
    """Apply every declared normalization on the language chain, in
    declaration order; raises _Stop on invocation failure."""
    if lang is None:
        return c
    chain = _chain(lang)
    out = c
    for sd in m.decls:
        d = sd.decl
        if not isinstance(d, Normalization) or d.lang not in chain:
            continue
        try:
            pred = parse_predicate(d.goal)
        except MalformedGoal as exc:
            raise _Stop(f"Normalization for {format_plain(d.lang)}: {exc}") from None
        if not is_enabled(cfg, pred):
            continue
        req = InvocationRequest(pred, _abs_args(m, d.argfiles), (lang,), (lang,),
                                (out,), 1, _origin_dir(m, sd.origin))
        try:
            out = plugin_host.invoke(cfg, req)[0].with_lang(lang)
        except (Failure, HostError) as exc:
            raise _Stop(f"Normalization {format_plain(d.goal)} on {f}: "
                        f"failed. {_failure_text(exc)}") from None
    return out


def _equivalence_decl(m: CollectedModel, cfg: VerifyConfig, chain: list):
    """Most specific enabled equivalence declaration, if any."""
    for lang in chain:
        for sd in m.decls:
            d = sd.decl
            if isinstance(d, Equivalence) and d.lang == lang:
                try:
                    pred = parse_predicate(d.goal)
                except MalformedGoal:
                    continue
                if is_enabled(cfg, pred):
                    return sd, pred
    return None


def _equivalent(m: CollectedModel, cfg: VerifyConfig, f: str, lang: Optional[Term],
                expected: Content, actual: Content):
    """Returns (verdict, problems); verdict None means the declared
    equivalence itself could not be invoked."""
    if lang is not None:
        chain = _chain(lang)
        found = _equivalence_decl(m, cfg, chain)
        if found is not None:
            sd, pred = found
            d = sd.decl
            req = InvocationRequest(pred, _abs_args(m, d.argfiles), (lang, lang),
                                    (), (expected, actual), 0,
                                    _origin_dir(m, sd.origin))
            try:
                plugin_host.invoke(cfg, req)
                return True, []
            except Failure:
                return False, []
            except HostError as exc:
                return None, [f"Equivalence {format_plain(d.goal)} on {f}: "
                              f"failed. {exc}"]
        if is_term_lang(lang):
            try:
                return expected.term() == actual.term(), []
            except TermSyntaxError:
                return False, []
    try:
        e = _normalize(m, cfg, f, lang, expected)
        a = _normalize(m, cfg, f, lang, actual)
    except _Stop as stop:
        return None, [stop.message]
    return e.data == a.data, []


# --- per-declaration verification ------------------------------------------------


def _memberships_on_chain(m: CollectedModel, chain: list) -> list:
    return [sd for sd in m.decls
            if isinstance(sd.decl, Membership) and sd.decl.lang in chain]


def _verify_element(m: CollectedModel, cfg: VerifyConfig, sd: SourcedDecl,
                    negated: bool) -> list:
    d = sd.decl
    f, lang = d.file, d.lang

    def problem(message, severity=UNVERIFIED):
        return Problem(severity, message, d, sd.origin, sd.line)

    try:
        chain = _chain(lang)
        content = _read_input(m, f, lang)
        content = _normalize(m, cfg, f, lang, content)
    except _Stop as stop:
        return [problem(stop.message, stop.severity)]

    tests = _memberships_on_chain(m, chain)
    problems = []
    ran = 0
    failed = 0
    for msd in tests:
        md = msd.decl
        try:
            pred = parse_predicate(md.goal)
        except MalformedGoal as exc:
            problems.append(problem(f"Membership goal for "
                                    f"{format_plain(md.lang)}: {exc}"))
            continue
        if not is_enabled(cfg, pred):
            continue
        req = InvocationRequest(pred, _abs_args(m, md.argfiles), (lang,), (),
                                (content,), 0, _origin_dir(m, msd.origin))
        try:
            plugin_host.invoke(cfg, req)
            ran += 1
        except Failure as exc:
            ran += 1
            failed += 1
            if not negated:
                problems.append(problem(
                    f"File {f} element of language {format_plain(md.lang)} "
                    f"according to {format_plain(md.goal)}: failed. "
                    f"{_failure_text(exc)}"))
        except HostError as exc:
            problems.append(problem(f"Membership {format_plain(md.goal)} "
                                    f"on {f}: failed. {exc}"))
    if ran == 0:
        problems.append(problem(f"File {f}: no active membership test for "
                                f"{format_plain(lang)}.", WARNING))
    elif negated and failed == 0:
        problems.append(problem(
            f"File {f} unexpectedly element of {format_plain(lang)}."))
    return problems


def _write_baseline(m: CollectedModel, f: str, lang: Optional[Term],
                    actual: Content) -> Optional[str]:
    """Write the canonical serialization; returns an error message or None."""
    path = Path(m.root) / f
    if lang is not None and is_term_lang(lang):
        try:
            data = write_unit(actual.term()).encode("utf-8")
        except TermSyntaxError as exc:
            return f"Baseline {f}: actual output unreadable as term: {exc}"
    else:
        data = actual.data
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        return f"Baseline {f}: cannot write: {exc}"
    return None


def _apply_overload(m: CollectedModel, cfg: VerifyConfig, sd: SourcedDecl,
                    o: Overload) -> list:
    d = sd.decl
    r, infiles, outfiles = d.func, d.infiles, d.outfiles

    def problem(message, severity=UNVERIFIED):
        return Problem(severity, message, d, sd.origin, sd.line)

    inlangs = tuple(_declared_lang(m, f, p) for f, p in zip(infiles, o.inlangs))
    outlangs = tuple(_declared_lang(m, f, p) for f, p in zip(outfiles, o.outlangs))

    try:
        inputs = []
        for f, lang in zip(infiles, inlangs):
            c = _read_input(m, f, lang)
            inputs.append(_normalize(m, cfg, f, lang, c))
    except _Stop as stop:
        return [problem(stop.message, stop.severity)]

    expected = [_try_read(m, f, lang) for f, lang in zip(outfiles, outlangs)]

    req = InvocationRequest(o.pred, _abs_args(m, o.static_args), inlangs,
                            outlangs, tuple(inputs), len(outfiles),
                            _origin_dir(m, o.origin))
    head = (f"Overload {r}#{format_plain(o.goal)}"
            f"({format_plain(list(infiles))})->({format_plain(list(outfiles))})")
    try:
        outputs = plugin_host.invoke(cfg, req)
    except Failure as exc:
        return [problem(f"{head}: failed. {_failure_text(exc)}")]
    except HostError as exc:
        return [problem(f"{head}: failed. {exc}")]

    problems = []
    for f, lang, baseline, actual in zip(outfiles, outlangs, expected, outputs):
        if baseline is not None:
            verdict, eq_problems = _equivalent(m, cfg, f, lang, baseline, actual)
            problems.extend(problem(msg) for msg in eq_problems)
            if verdict is None or verdict:
                continue
            if cfg.mode == MODE_OVERRIDE:
                err = _write_baseline(m, f, lang, actual)
                if err:
                    problems.append(problem(err))
            else:
                problems.append(problem(f"Disagreeing baseline {f}."))
        else:
            if cfg.mode == MODE_CREATE:
                err = _write_baseline(m, f, lang, actual)
                if err:
                    problems.append(problem(err))
            else:
                problems.append(problem(f"Missing baseline {f}."))
    return problems


def _verify_maps_to(m: CollectedModel, cfg: VerifyConfig, sd: SourcedDecl) -> list:
    d = sd.decl
    overloads = overloads_for(m, d.func, d.infiles, d.outfiles)
    if not overloads:
        return [Problem(UNVERIFIED,
                        f"Overload {d.func}:({format_plain(list(d.infiles))})"
                        f" → ({format_plain(list(d.outfiles))}): missing.",
                        d, sd.origin, sd.line)]
    problems = []
    for o in overloads:
        problems.extend(_apply_overload(m, cfg, sd, o))
    return problems


def _verify_decl(m: CollectedModel, cfg: VerifyConfig, sd: SourcedDecl) -> list:
    d = sd.decl
    if isinstance(d, ElementOf):
        return _verify_element(m, cfg, sd, negated=False)
    if isinstance(d, NotElementOf):
        return _verify_element(m, cfg, sd, negated=True)
    if isinstance(d, MapsTo):
        return _verify_maps_to(m, cfg, sd)
    return []


def verify_model(m: CollectedModel, cfg: VerifyConfig,
                 select: Optional[Callable[[SourcedDecl], bool]] = None,
                 skip: frozenset = frozenset()) -> list:
    """Verify every elementOf/notElementOf/mapsTo declaration.

    Check mode runs strictly in declaration order.  The side-effecting
    modes run mapsTo applications first so that created artifacts exist
    by the time the membership checks read them; reported problems are
    sorted back into declaration order either way.
    """
    indexed = [(i, sd) for i, sd in enumerate(m.decls)
               if isinstance(sd.decl, (ElementOf, NotElementOf, MapsTo))
               and sd.decl not in skip
               and (select is None or select(sd))]
    if cfg.mode == MODE_CHECK:
        order = indexed
    else:
        order = ([x for x in indexed if isinstance(x[1].decl, MapsTo)]
                 + [x for x in indexed if not isinstance(x[1].decl, MapsTo)])
    results = []
    for i, sd in order:
        results.extend((i, p) for p in _verify_decl(m, cfg, sd))
    results.sort(key=lambda pair: pair[0])
    return [p for _, p in results]


# --- single-declaration entry points ---------------------------------------------


def _locate(m: CollectedModel, decl) -> SourcedDecl:
    for sd in m.decls:
        if sd.decl == decl:
            return sd
    return SourcedDecl(decl, "<request>", 0)


def verify_element_of(m: CollectedModel, cfg: VerifyConfig, f: str, lang: Term,
                      negated: bool = False) -> list:
    decl = NotElementOf(f, lang) if negated else ElementOf(f, lang)
    return _verify_element(m, cfg, _locate(m, decl), negated)


def verify_maps_to(m: CollectedModel, cfg: VerifyConfig, r: str,
                   infiles, outfiles) -> list:
    decl = MapsTo(r, tuple(infiles), tuple(outfiles))
    return _verify_maps_to(m, cfg, _locate(m, decl))


def apply_overload(m: CollectedModel, cfg: VerifyConfig, r: str, infiles,
                   outfiles, o: Overload) -> list:
    decl = MapsTo(r, tuple(infiles), tuple(outfiles))
    return _apply_overload(m, cfg, _locate(m, decl), o)


def normalize(m: CollectedModel, f: str, lang: Term, c: Content,
              cfg: Optional[VerifyConfig] = None) -> Content:
    cfg = cfg if cfg is not None else VerifyConfig(root=m.root)
    return _normalize(m, cfg, f, lang, c)


def equivalent(m: CollectedModel, f: str, lang: Term, expected: Content,
               actual: Content, cfg: Optional[VerifyConfig] = None) -> bool:
    cfg = cfg if cfg is not None else VerifyConfig(root=m.root)
    verdict, problems = _equivalent(m, cfg, f, lang, expected, actual)
    if verdict is None:
        raise Failure(problems[0] if problems else "equivalence not decidable")
    return verdict


# --- built-in equivalences and normalizations -------------------------------------


def _numeric(c: Content) -> float:
    t = c.term()
    if not isinstance(t, (Int, Float)):
        raise Failure("not a numeric term")
    return t.value


def _eq_byte(expected: Content, actual: Content):
    if expected.data != actual.data:
        raise Failure("byte contents differ")
    return []


def _eq_term(expected: Content, actual: Content):
    try:
        same = expected.term() == actual.term()
    except TermSyntaxError as exc:
        raise Failure(f"unreadable term: {exc}") from None
    if not same:
        raise Failure("terms differ structurally")
    return []


def _eq_numeric(*args):
    if len(args) == 3:
        tol_term, expected, actual = args
        if not isinstance(tol_term, (Int, Float)):
            raise Failure("tolerance must be numeric")
        tol = tol_term.value
    elif len(args) == 2:
        expected, actual = args
        tol = 1e-9
    else:
        raise Failure("numericTolerance expects (tol?, expected, actual)")
    try:
        diff = abs(_numeric(expected) - _numeric(actual))
    except TermSyntaxError as exc:
        raise Failure(f"unreadable numeric term: {exc}") from None
    if diff > tol:
        raise Failure(f"values differ by {diff}")
    return []


def _eq_json(expected: Content, actual: Content):
    try:
        if json.loads(expected.text()) != json.loads(actual.text()):
            raise Failure("JSON values differ")
    except (ValueError, UnicodeDecodeError) as exc:
        raise Failure(f"invalid JSON: {exc}") from None
    return []


def canonical_json(text: str) -> str:
    return json.dumps(json.loads(text), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


def _norm_identity(c: Content):
    return [c]


def _norm_json(c: Content):
    try:
        return [Content.from_text(canonical_json(c.text()))]
    except (ValueError, UnicodeDecodeError) as exc:
        raise Failure(f"invalid JSON: {exc}") from None


def _norm_trim(c: Content):
    lines = c.text().split("\n")
    return [Content.from_text("\n".join(line.rstrip(" \t") for line in lines))]


for _name, _fn in {
    "byteEqual": _eq_byte,
    "termEqual": _eq_term,
    "numericTolerance": _eq_numeric,
    "jsonEqual": _eq_json,
    "identity": _norm_identity,
    "jsonCanonical": _norm_json,
    "trimTrailingWs": _norm_trim,
}.items():
    register_native(_name, _fn, replace=True)
