"""Declaration model, language hierarchy, and repository collection.

A repository is described by ``.ueber`` files scattered through the
tree.  Collection parses every one of them, expands macros, desugars
relation forms into function forms, resolves all file paths to
root-relative canonical paths, and yields one deterministic, immutable
model for the checking and verification phases.
"""

from __future__ import annotations

import os
import posixpath
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

from .terms import (
    Atom,
    Compound,
    Term,
    TermList,
    TermSyntaxError,
    read_units,
    write_term,
)

ILL_FORMED = "ILL_FORMED"
UNVERIFIED = "UNVERIFIED"
WARNING = "WARNING"


class MalformedLang(Exception):
    pass


class UnknownDeclForm(Exception):
    def __init__(self, term: Term):
        super().__init__(f"not a declaration form: {write_term(term)}")
        self.term = term


class UnknownMacro(Exception):
    def __init__(self, goal: Term):
        super().__init__(f"no macro expander for: {write_term(goal)}")
        self.goal = goal


class ExpansionDepthExceeded(Exception):
    pass


class MacroExpansionError(Exception):
    pass


# --- declaration forms -------------------------------------------------------


@dataclass(frozen=True)
class Language:
    lang: Term


@dataclass(frozen=True)
class ElementOf:
    file: str
    lang: Term


@dataclass(frozen=True)
class NotElementOf:
    file: str
    lang: Term


@dataclass(frozen=True)
class Membership:
    lang: Term
    goal: Term
    argfiles: tuple


@dataclass(frozen=True)
class Relation:
    rela: str
    langs: tuple
    goal: Term
    argfiles: tuple


@dataclass(frozen=True)
class RelatesTo:
    rela: str
    files: tuple


@dataclass(frozen=True)
class Function:
    func: str
    inlangs: tuple
    outlangs: tuple
    goal: Term
    argfiles: tuple


@dataclass(frozen=True)
class MapsTo:
    func: str
    infiles: tuple
    outfiles: tuple


@dataclass(frozen=True)
class Equivalence:
    lang: Term
    goal: Term
    argfiles: tuple


@dataclass(frozen=True)
class Normalization:
    lang: Term
    goal: Term
    argfiles: tuple


@dataclass(frozen=True)
class Macro:
    goal: Term


Decl = Union[
    Language,
    ElementOf,
    NotElementOf,
    Membership,
    Relation,
    RelatesTo,
    Function,
    MapsTo,
    Equivalence,
    Normalization,
    Macro,
]


@dataclass(frozen=True)
class SourcedDecl:
    decl: Decl
    origin: str  # root-relative path of the declaring .ueber file
    line: int


@dataclass(frozen=True)
class Problem:
    severity: str
    message: str
    subject: Optional[Decl]
    origin: str
    line: int


@dataclass(frozen=True)
class CollectedModel:
    decls: tuple
    root: Path
    problems: tuple = ()

    def declared_languages(self, f: str) -> list:
        """All languages f is declared an element of, in model order."""
        return [sd.decl.lang for sd in self.decls
                if isinstance(sd.decl, ElementOf) and sd.decl.file == f]


# --- language hierarchy ------------------------------------------------------


def towards_base(lang: Term) -> list:
    """Chain from a language to its base representation type.

    ``bnl(tree(term))`` yields ``[bnl(tree(term)), tree(term), term]``;
    an atom yields just itself.
    """
    chain = []
    cur = lang
    seen = 0
    while True:
        chain.append(cur)
        if isinstance(cur, Atom):
            return chain
        if not isinstance(cur, Compound) or len(cur.args) != 1:
            raise MalformedLang(f"not a language name: {write_term(lang)}")
        cur = cur.args[0]
        seen += 1
        if seen > 64:
            raise MalformedLang(f"language nesting too deep: {write_term(lang)}")


def lang_below_or_equal(a: Term, b: Term) -> bool:
    """True when b lies on a's chain toward the base (a is a subset of b)."""
    try:
        return b in towards_base(a)
    except MalformedLang:
        return False


def base_of(lang: Term) -> Atom:
    return towards_base(lang)[-1]


def is_term_lang(lang: Term) -> bool:
    try:
        return base_of(lang) == Atom("term")
    except MalformedLang:
        return False


# --- term <-> declaration mapping --------------------------------------------


def _want_atom(t: Term, what: str) -> str:
    if not isinstance(t, Atom):
        raise UnknownDeclForm(t)
    return t.name


def _want_list(t: Term) -> tuple:
    if not isinstance(t, TermList):
        raise UnknownDeclForm(t)
    return t.items


def _want_atoms(t: Term) -> tuple:
    return tuple(_want_atom(i, "name") for i in _want_list(t))


def decl_from_term(term: Term) -> Decl:
    """Map a parsed term onto a declaration form (paths unresolved)."""
    if isinstance(term, Compound):
        f, args = term.functor, term.args
        if f == "language" and len(args) == 1:
            return Language(args[0])
        if f == "elementOf" and len(args) == 2:
            return ElementOf(_want_atom(args[0], "file"), args[1])
        if f == "notElementOf" and len(args) == 2:
            return NotElementOf(_want_atom(args[0], "file"), args[1])
        if f == "membership" and len(args) == 3:
            return Membership(args[0], args[1], _want_atoms(args[2]))
        if f == "relation" and len(args) == 4:
            return Relation(_want_atom(args[0], "rela"), _want_list(args[1]),
                            args[2], _want_atoms(args[3]))
        if f == "relatesTo" and len(args) == 2:
            return RelatesTo(_want_atom(args[0], "rela"), _want_atoms(args[1]))
        if f == "function" and len(args) == 5:
            return Function(_want_atom(args[0], "func"), _want_list(args[1]),
                            _want_list(args[2]), args[3], _want_atoms(args[4]))
        if f == "mapsTo" and len(args) == 3:
            return MapsTo(_want_atom(args[0], "func"), _want_atoms(args[1]),
                          _want_atoms(args[2]))
        if f == "equivalence" and len(args) == 3:
            return Equivalence(args[0], args[1], _want_atoms(args[2]))
        if f == "normalization" and len(args) == 3:
            return Normalization(args[0], args[1], _want_atoms(args[2]))
        if f == "macro" and len(args) == 1:
            return Macro(args[0])
    raise UnknownDeclForm(term)


def decl_to_term(decl: Decl) -> Term:
    """Inverse of decl_from_term, used for report rendering."""
    a = Atom
    fl = lambda xs: TermList(tuple(Atom(x) for x in xs))
    tl = lambda xs: TermList(tuple(xs))
    if isinstance(decl, Language):
        return Compound("language", (decl.lang,))
    if isinstance(decl, ElementOf):
        return Compound("elementOf", (a(decl.file), decl.lang))
    if isinstance(decl, NotElementOf):
        return Compound("notElementOf", (a(decl.file), decl.lang))
    if isinstance(decl, Membership):
        return Compound("membership", (decl.lang, decl.goal, fl(decl.argfiles)))
    if isinstance(decl, Relation):
        return Compound("relation", (a(decl.rela), tl(decl.langs), decl.goal,
                                     fl(decl.argfiles)))
    if isinstance(decl, RelatesTo):
        return Compound("relatesTo", (a(decl.rela), fl(decl.files)))
    if isinstance(decl, Function):
        return Compound("function", (a(decl.func), tl(decl.inlangs),
                                     tl(decl.outlangs), decl.goal,
                                     fl(decl.argfiles)))
    if isinstance(decl, MapsTo):
        return Compound("mapsTo", (a(decl.func), fl(decl.infiles),
                                   fl(decl.outfiles)))
    if isinstance(decl, Equivalence):
        return Compound("equivalence", (decl.lang, decl.goal, fl(decl.argfiles)))
    if isinstance(decl, Normalization):
        return Compound("normalization", (decl.lang, decl.goal, fl(decl.argfiles)))
    if isinstance(decl, Macro):
        return Compound("macro", (decl.goal,))
    raise TypeError(f"not a declaration: {decl!r}")


# --- path resolution ----------------------------------------------------------


class PathEscapesRoot(Exception):
    pass


def _resolve_path(raw: str, origin_dir: str) -> str:
    """Resolve a declared path against the declaring directory.

    Returns a root-relative POSIX path; the distinguished path ``.``
    denotes the declaring directory itself.
    """
    if posixpath.isabs(raw):
        return posixpath.normpath(raw)
    joined = posixpath.normpath(posixpath.join(origin_dir, raw))
    if joined == "..":
        raise PathEscapesRoot(raw)
    if joined.startswith("../"):
        raise PathEscapesRoot(raw)
    return joined


def _resolve_decl_paths(decl: Decl, origin_dir: str) -> Decl:
    r = lambda p: _resolve_path(p, origin_dir)
    rs = lambda ps: tuple(r(p) for p in ps)
    if isinstance(decl, ElementOf):
        return ElementOf(r(decl.file), decl.lang)
    if isinstance(decl, NotElementOf):
        return NotElementOf(r(decl.file), decl.lang)
    if isinstance(decl, Membership):
        return Membership(decl.lang, decl.goal, rs(decl.argfiles))
    if isinstance(decl, Relation):
        return Relation(decl.rela, decl.langs, decl.goal, rs(decl.argfiles))
    if isinstance(decl, RelatesTo):
        return RelatesTo(decl.rela, rs(decl.files))
    if isinstance(decl, Function):
        return Function(decl.func, decl.inlangs, decl.outlangs, decl.goal,
                        rs(decl.argfiles))
    if isinstance(decl, MapsTo):
        return MapsTo(decl.func, rs(decl.infiles), rs(decl.outfiles))
    if isinstance(decl, Equivalence):
        return Equivalence(decl.lang, decl.goal, rs(decl.argfiles))
    if isinstance(decl, Normalization):
        return Normalization(decl.lang, decl.goal, rs(decl.argfiles))
    return decl


def desugar(decl: Decl) -> Decl:
    """Relations are functions without outputs."""
    if isinstance(decl, Relation):
        return Function(decl.rela, decl.langs, (), decl.goal, decl.argfiles)
    if isinstance(decl, RelatesTo):
        return MapsTo(decl.rela, decl.files, ())
    return decl


# --- macro expansion ----------------------------------------------------------

MAX_EXPANSION_DEPTH = 16

_MACROS: dict = {}


def register_macro(name: str, arity: int,
                   fn: Callable[[tuple], list]) -> None:
    """Extension point: register an expander producing declaration terms."""
    _MACROS[(name, arity)] = fn


def _split_ext(filename: str) -> tuple[str, str]:
    base, dot, ext = filename.rpartition(".")
    if not dot or not base or "/" in ext:
        raise MacroExpansionError(f"cannot take a language from {filename!r}")
    return base, ext


def _m_fxy(args):
    fun, fx, lx, fy, ly = args
    return [
        Compound("elementOf", (fx, lx)),
        Compound("elementOf", (fy, ly)),
        Compound("mapsTo", (fun, TermList((fx,)), TermList((fy,)))),
    ]


def _m_parse_file(args):
    (textf,) = args
    base, ext = _split_ext(_want_atom(textf, "file"))
    textl = Compound(ext, (Atom("text"),))
    terml = Compound(ext, (Atom("term"),))
    termf = Atom(base + ".term")
    return [Compound("macro", (Compound("fxy", (Atom("parse"), textf, textl,
                                                termf, terml)),))]


def _m_parseable(args):
    (textf,) = args
    _, ext = _split_ext(_want_atom(textf, "file"))
    return [Compound("elementOf", (textf, Compound(ext, (Atom("text"),))))]


def _m_unparseable(args):
    (textf,) = args
    _, ext = _split_ext(_want_atom(textf, "file"))
    return [
        Compound("elementOf", (textf, Atom("text"))),
        Compound("notElementOf", (textf, Compound(ext, (Atom("text"),)))),
    ]


def _m_well_formed(args):
    (textf,) = args
    base, ext = _split_ext(_want_atom(textf, "file"))
    terml = Compound(ext, (Atom("term"),))
    termf = Atom(base + ".term")
    return [
        Compound("macro", (Compound("parseFile", (textf,)),)),
        Compound("elementOf", (termf, Compound("ok", (terml,)))),
    ]


def _m_ill_formed(args):
    (textf,) = args
    base, ext = _split_ext(_want_atom(textf, "file"))
    terml = Compound(ext, (Atom("term"),))
    termf = Atom(base + ".term")
    return [
        Compound("macro", (Compound("parseFile", (textf,)),)),
        Compound("notElementOf", (termf, Compound("ok", (terml,)))),
    ]


def _m_basic_syntax(args):
    (l,) = args
    name = _want_atom(l, "language")
    textl = Compound(name, (Atom("text"),))
    tokensl = Compound(name, (Compound("tokens", (Atom("term"),)),))
    treel = Compound(name, (Compound("bcl", (Atom("term"),)),))
    terml = Compound(name, (Atom("term"),))
    scanner = Atom(name + "Scanner")
    fxy = lambda *a: Compound("macro", (Compound("fxy", a),))
    files = lambda *fs: TermList(tuple(Atom(f) for f in fs))
    langs = lambda *ls: TermList(tuple(ls))
    return [
        Compound("language", (textl,)),
        Compound("language", (tokensl,)),
        Compound("language", (treel,)),
        Compound("language", (terml,)),
        fxy(Atom("parse"), Atom("cs.bgl"), Compound("bgl", (Atom("text"),)),
            Atom("cs.term"), Compound("bgl", (Atom("term"),))),
        fxy(Atom("parse"), Atom("as.bsl"), Compound("bsl", (Atom("text"),)),
            Atom("as.term"), Compound("bsl", (Atom("term"),))),
        fxy(Atom("project"), Atom("cs.term"), Compound("bgl", (Atom("term"),)),
            Atom("as.term"), Compound("bsl", (Atom("term"),))),
        Compound("membership", (textl, Compound("bglAcceptor", (scanner,)),
                                files("cs.term"))),
        Compound("membership", (tokensl, Atom("bglAcceptor"), files("cs.term"))),
        Compound("membership", (treel, Atom("cstOk"), files("cs.term"))),
        Compound("membership", (terml, Atom("bslTerm"), files("as.term"))),
        Compound("function", (Atom("scan"), langs(textl), langs(tokensl),
                              scanner, files())),
        Compound("function", (Atom("parse"), langs(tokensl), langs(terml),
                              Atom("bglParser"), files("cs.term"))),
        Compound("function", (Atom("parse"), langs(textl), langs(terml),
                              Compound("bglParser", (scanner,)),
                              files("cs.term"))),
        Compound("function", (Atom("cstToAst"), langs(treel), langs(terml),
                              Atom("cstToAst"), files())),
        Compound("function", (Atom("astToCst"), langs(terml), langs(treel),
                              Atom("astToCst"), files("cs.term"))),
        Compound("function", (Atom("unparse"), langs(treel), langs(tokensl),
                              Atom("bglTreeToTokens"), files())),
        Compound("function", (Atom("unparse"), langs(treel), langs(textl),
                              Atom("bglTreeToText"), files())),
    ]


register_macro("fxy", 5, _m_fxy)
register_macro("parseFile", 1, _m_parse_file)
register_macro("parseable", 1, _m_parseable)
register_macro("unparseable", 1, _m_unparseable)
register_macro("well_formed", 1, _m_well_formed)
register_macro("ill_formed", 1, _m_ill_formed)
register_macro("basicSyntax", 1, _m_basic_syntax)


def _expand_terms(goal: Term, depth: int) -> list:
    if depth > MAX_EXPANSION_DEPTH:
        raise ExpansionDepthExceeded(write_term(goal))
    if isinstance(goal, Atom):
        key = (goal.name, 0)
        gargs: tuple = ()
    elif isinstance(goal, Compound):
        key = (goal.functor, len(goal.args))
        gargs = goal.args
    else:
        raise UnknownMacro(goal)
    fn = _MACROS.get(key)
    if fn is None:
        raise UnknownMacro(goal)
    out = []
    for term in fn(gargs):
        if isinstance(term, Compound) and term.functor == "macro" and len(term.args) == 1:
            out.extend(_expand_terms(term.args[0], depth + 1))
        else:
            out.append(term)
    return out


def expand_macro(goal: Term, origin: str) -> list:
    """Expand a macro goal into declarations, paths resolved for origin.

    Expansion is purely syntactic: the result depends only on the goal
    and on the declaring file's directory.
    """
    origin_dir = posixpath.dirname(origin)
    decls = []
    for term in _expand_terms(goal, 1):
        decl = desugar(decl_from_term(term))
        decls.append(_resolve_decl_paths(decl, origin_dir))
    return decls


# --- parsing and collection ---------------------------------------------------


def parse_ueber_file(path, root=None, strict: bool = True):
    """Parse one ``.ueber`` file into sourced declarations.

    With ``strict`` (the default) any unknown declaration form raises;
    collection uses the lenient mode, which returns problems alongside
    the declarations that did parse.
    """
    path = Path(path)
    root = Path(root) if root is not None else path.parent
    origin = _rel_posix(path, root)
    origin_dir = posixpath.dirname(origin)
    decls: list[SourcedDecl] = []
    problems: list[Problem] = []
    src = path.read_text(encoding="utf-8")
    for term, line in read_units(src):
        try:
            decl = decl_from_term(term)
            if isinstance(decl, Macro):
                expanded = expand_macro(decl.goal, origin)
                decls.extend(SourcedDecl(d, origin, line) for d in expanded)
            else:
                decl = desugar(_resolve_decl_paths(decl, origin_dir))
                decls.append(SourcedDecl(decl, origin, line))
        except (UnknownDeclForm, UnknownMacro, ExpansionDepthExceeded,
                MacroExpansionError, PathEscapesRoot) as exc:
            if strict:
                raise
            problems.append(Problem(ILL_FORMED, str(exc), None, origin, line))
    if strict:
        return decls
    return decls, problems


def _rel_posix(path: Path, root: Path) -> str:
    try:
        return path.resolve().relative_to(root.resolve()).as_posix()
    except ValueError:
        return path.as_posix()


def find_ueber_files(root: Path) -> list[Path]:
    found = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        dirnames.sort()
        if ".ueber" in filenames:
            p = Path(dirpath) / ".ueber"
            if not p.is_symlink():
                found.append(p)
    found.sort(key=lambda p: _rel_posix(p, root))
    return found


def collect(root) -> CollectedModel:
    """Gather every ``.ueber`` declaration under root.

    Files are visited in lexicographic path order; macro expansions are
    spliced in place of the macro declaration; relation forms are
    desugared; duplicates (after expansion) are dropped, first wins.
    Per-file parse errors become ILL_FORMED problems rather than aborts.
    """
    root = Path(root)
    decls: list[SourcedDecl] = []
    problems: list[Problem] = []
    for path in find_ueber_files(root):
        origin = _rel_posix(path, root)
        try:
            file_decls, file_problems = parse_ueber_file(path, root, strict=False)
        except TermSyntaxError as exc:
            problems.append(Problem(ILL_FORMED, str(exc), None, origin,
                                    getattr(exc, "line", 0)))
            continue
        except OSError as exc:
            problems.append(Problem(ILL_FORMED, f"unreadable: {exc}", None,
                                    origin, 0))
            continue
        decls.extend(file_decls)
        problems.extend(file_problems)
    seen = set()
    unique = []
    for sd in decls:
        if sd.decl in seen:
            continue
        seen.add(sd.decl)
        unique.append(sd)
    return CollectedModel(tuple(unique), root, tuple(problems))
