"""Reader, printer, and in-memory model for ground symbolic terms.

Terms are the universal currency of the toolkit: language names,
declarations, grammars, token lists, formulas, and tree-shaped artifacts
are all ground terms.  The concrete syntax is a small Prolog-like
notation: atoms, integers, decimals, compounds, bracket lists, ``%``
line comments, and a fixed arithmetic operator table (no variables).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterator, Union


class TermSyntaxError(Exception):
    """Malformed term input; carries position and what was expected."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Float:
    value: float


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("compound arity must be >= 1 (use Atom for arity 0)")


@dataclass(frozen=True)
class TermList:
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


Term = Union[Atom, Int, Float, Compound, TermList]

# Fixed operator table: (symbol, precedence, fixity).  Lower precedence
# binds tighter; fixities follow the usual Prolog meanings (infix-left =
# yfx, infix-right = xfy, prefix = fy).
OPERATOR_TABLE = (
    ("+", 500, "infix-left"),
    ("-", 500, "infix-left"),
    ("^", 200, "infix-right"),
    ("-", 200, "prefix"),
)

_INFIX = {s: (p, f) for s, p, f in OPERATOR_TABLE if f.startswith("infix")}
_PREFIX = {s: p for s, p, f in OPERATOR_TABLE if f == "prefix"}
_OP_CHARS = set("".join(s for s, _, _ in OPERATOR_TABLE))
_MAX_PRIO = max(p for _, p, _ in OPERATOR_TABLE)

_UNQUOTED_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*")


# --- tokenizer -------------------------------------------------------------

# Token kinds: atom, int, float, punct (one of "()[],."), op (+ - ^), end.
@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    glued: bool  # True when this token directly follows the previous one


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(src)
    prev_end = -1

    def emit(kind: str, text: str, l: int, c: int, start: int):
        toks.append(_Tok(kind, text, l, c, start == prev_end))

    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1
            continue
        if ch == "%":
            while i < n and src[i] != "\n":
                i += 1
            continue
        start, l, c = i, line, col
        if ch == "'":
            buf = []
            i += 1
            col += 1
            while True:
                if i >= n:
                    raise TermSyntaxError("unterminated quoted atom", l, c)
                if src[i] == "'":
                    if i + 1 < n and src[i + 1] == "'":
                        buf.append("'")
                        i += 2
                        col += 2
                        continue
                    i += 1
                    col += 1
                    break
                if src[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                buf.append(src[i])
                i += 1
            emit("atom", "".join(buf), l, c, start)
            prev_end = i
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j + 1 < n and src[j] == "." and src[j + 1].isdigit():
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
                emit("float", src[i:j], l, c, start)
            else:
                emit("int", src[i:j], l, c, start)
            col += j - i
            i = j
            prev_end = i
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            if not _UNQUOTED_ATOM.fullmatch(word):
                raise TermSyntaxError(f"invalid unquoted atom {word!r}", l, c)
            emit("atom", word, l, c, start)
            col += j - i
            i = j
            prev_end = i
            continue
        if ch in "()[],.":
            emit("punct", ch, l, c, start)
            i += 1
            col += 1
            prev_end = i
            continue
        if ch in _OP_CHARS:
            emit("op", ch, l, c, start)
            i += 1
            col += 1
            prev_end = i
            continue
        raise TermSyntaxError(f"unexpected character {ch!r}", l, c)
    toks.append(_Tok("end", "", line, col, False))
    return toks


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, expected: str) -> TermSyntaxError:
        t = self.peek()
        got = repr(t.text) if t.kind != "end" else "end of input"
        return TermSyntaxError(f"expected {expected}, got {got}", t.line, t.col)

    def expect(self, text: str):
        t = self.peek()
        if (t.kind in ("punct", "op")) and t.text == text:
            return self.next()
        raise self.error(repr(text))

    def parse_expr(self, maxp: int) -> Term:
        left = self.parse_primary(maxp)
        while True:
            t = self.peek()
            if t.kind != "op" or t.text not in _INFIX:
                break
            prio, fixity = _INFIX[t.text]
            if prio > maxp:
                break
            self.next()
            right = self.parse_expr(prio - 1 if fixity == "infix-left" else prio)
            left = Compound(t.text, (left, right))
            # infix-left at prio p may keep absorbing ops of prio p; the
            # loop condition already allows that.
        return left

    def parse_primary(self, maxp: int) -> Term:
        t = self.peek()
        if t.kind == "op" and t.text in _PREFIX:
            prio = _PREFIX[t.text]
            if prio > maxp:
                raise self.error("a term (prefix operator binds too loosely here)")
            self.next()
            nxt = self.peek()
            if nxt.kind == "int":
                self.next()
                return Int(-int(nxt.text))
            if nxt.kind == "float":
                self.next()
                return Float(-float(nxt.text))
            return Compound(t.text, (self.parse_expr(prio),))
        if t.kind == "int":
            self.next()
            return Int(int(t.text))
        if t.kind == "float":
            self.next()
            return Float(float(t.text))
        if t.kind == "atom":
            self.next()
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.text == "(" and nxt.glued:
                self.next()
                args = [self.parse_expr(_MAX_PRIO)]
                while self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    args.append(self.parse_expr(_MAX_PRIO))
                self.expect(")")
                return Compound(t.text, tuple(args))
            return Atom(t.text)
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self.parse_expr(_MAX_PRIO)
            self.expect(")")
            return inner
        if t.kind == "punct" and t.text == "[":
            self.next()
            items: list[Term] = []
            if not (self.peek().kind == "punct" and self.peek().text == "]"):
                items.append(self.parse_expr(_MAX_PRIO))
                while self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    items.append(self.parse_expr(_MAX_PRIO))
            self.expect("]")
            return TermList(tuple(items))
        raise self.error("a term")

    def at_end(self) -> bool:
        return self.peek().kind == "end"


def read_term(src: str) -> Term:
    """Parse a single term, optionally followed by ``.`` and whitespace."""
    p = _Parser(_tokenize(src))
    term = p.parse_expr(_MAX_PRIO)
    if p.peek().kind == "punct" and p.peek().text == ".":
        p.next()
    if not p.at_end():
        raise p.error("end of input")
    return term


def read_units(src: str) -> list[tuple[Term, int]]:
    """Parse a file body into (term, start-line) units.

    Accepts either a single period-terminated list (whose items become
    the units) or a sequence of period-terminated terms.
    """
    p = _Parser(_tokenize(src))
    units: list[tuple[Term, int]] = []
    while not p.at_end():
        start = p.peek().line
        term = p.parse_expr(_MAX_PRIO)
        p.expect(".")
        units.append((term, start))
    if len(units) == 1 and isinstance(units[0][0], TermList):
        # List form: recover per-item lines with a dedicated pass.
        return _list_form_units(src)
    return units


def _list_form_units(src: str) -> list[tuple[Term, int]]:
    p = _Parser(_tokenize(src))
    p.expect("[")
    units: list[tuple[Term, int]] = []
    if not (p.peek().kind == "punct" and p.peek().text == "]"):
        while True:
            line = p.peek().line
            units.append((p.parse_expr(_MAX_PRIO), line))
            if p.peek().kind == "punct" and p.peek().text == ",":
                p.next()
                continue
            break
    p.expect("]")
    p.expect(".")
    return units


def read_term_file(path) -> list[Term]:
    """Read a file of terms; list form and sequence form both accepted."""
    src = Path(path).read_text(encoding="utf-8")
    return [t for t, _ in read_units(src)]


# --- printer ---------------------------------------------------------------


def _atom_text(name: str) -> str:
    if _UNQUOTED_ATOM.fullmatch(name):
        return name
    return "'" + name.replace("'", "''") + "'"


def _float_text(value: float) -> str:
    r = repr(value)
    if "e" in r or "E" in r:
        r = format(Decimal(r), "f")
    if "." not in r:
        r += ".0"
    return r


def _prio(t: Term) -> int:
    if isinstance(t, Compound):
        if len(t.args) == 2 and t.functor in _INFIX:
            return _INFIX[t.functor][0]
        if len(t.args) == 1 and t.functor in _PREFIX:
            return _PREFIX[t.functor]
    if isinstance(t, Int) and t.value < 0:
        return _PREFIX["-"]
    if isinstance(t, Float) and t.value < 0:
        return _PREFIX["-"]
    return 0


def _write(t: Term, maxp: int, out: list):
    if isinstance(t, Atom):
        out.append(_atom_text(t.name))
        return
    if isinstance(t, (Int, Float)):
        text = str(t.value) if isinstance(t, Int) else _float_text(t.value)
        if _prio(t) > maxp:
            out.append("(" + text + ")")
        else:
            out.append(text)
        return
    if isinstance(t, TermList):
        out.append("[")
        for i, item in enumerate(t.items):
            if i:
                out.append(",")
            _write(item, _MAX_PRIO, out)
        out.append("]")
        return
    if isinstance(t, Compound):
        if len(t.args) == 2 and t.functor in _INFIX:
            prio, fixity = _INFIX[t.functor]
            wrap = prio > maxp
            if wrap:
                out.append("(")
            lmax = prio if fixity == "infix-left" else prio - 1
            rmax = prio - 1 if fixity == "infix-left" else prio
            _write(t.args[0], lmax, out)
            out.append(t.functor)
            _write(t.args[1], rmax, out)
            if wrap:
                out.append(")")
            return
        if len(t.args) == 1 and t.functor in _PREFIX:
            prio = _PREFIX[t.functor]
            arg = t.args[0]
            sub: list = []
            _write(arg, prio, sub)
            text = "".join(sub)
            if text[:1].isdigit():
                # Parenthesize the argument so the reader does not fold
                # the sign into a leading numeric literal.
                sub = []
                _write(arg, _MAX_PRIO, sub)
                body = t.functor + "(" + "".join(sub) + ")"
            else:
                body = t.functor + text
            if prio > maxp:
                out.append("(" + body + ")")
            else:
                out.append(body)
            return
        out.append(_atom_text(t.functor))
        out.append("(")
        for i, arg in enumerate(t.args):
            if i:
                out.append(",")
            _write(arg, _MAX_PRIO, out)
        out.append(")")
        return
    raise TypeError(f"not a term: {t!r}")


def write_term(t: Term) -> str:
    """Canonical printed form; ``read_term(write_term(t)) == t``."""
    out: list = []
    _write(t, _MAX_PRIO, out)
    return "".join(out)


def write_unit(t: Term) -> str:
    """Canonical file unit: printed term, terminating period, newline."""
    return write_term(t) + ".\n"


# --- plain rendering for report messages -----------------------------------


def format_plain(value) -> str:
    """Write-style rendering (no atom quoting) for message interpolation.

    Accepts Terms, strings, and lists of either; lists print as
    ``[a,b]`` like Prolog's ``~w``.
    """
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(format_plain(v) for v in value) + "]"
    if isinstance(value, Atom):
        return value.name
    if isinstance(value, Int):
        return str(value.value)
    if isinstance(value, Float):
        return _float_text(value.value)
    if isinstance(value, TermList):
        return "[" + ",".join(format_plain(v) for v in value.items) + "]"
    if isinstance(value, Compound):
        if len(value.args) == 2 and value.functor in _INFIX:
            return format_plain(value.args[0]) + value.functor + format_plain(value.args[1])
        if len(value.args) == 1 and value.functor in _PREFIX:
            return value.functor + format_plain(value.args[0])
        return value.functor + "(" + ",".join(format_plain(a) for a in value.args) + ")"
    return str(value)


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Compound):
        for a in t.args:
            yield from iter_subterms(a)
    elif isinstance(t, TermList):
        for a in t.items:
            yield from iter_subterms(a)
