"""Sample language-processing built-ins.

Implements grammar interpretation over grammar-as-data (accept, parse,
explode/implode/unparse on labeled parse trees), algebraic-signature
conformance for tree-shaped terms, and the binary-number demo pipeline:
scanning, symbolic conversion to power-of-two formulas, formula
solving, and direct positional evaluation.  Everything here is pure;
the bottom of the module registers the native predicate surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .content import Content
from .model import is_term_lang
from .plugin_host import Failure, get_native, register_native
from .terms import Atom, Compound, Float, Int, Term, TermList, TermSyntaxError


class LeftRecursion(Exception):
    pass


class MalformedFormula(Exception):
    pass


# --- grammars ------------------------------------------------------------------


@dataclass(frozen=True)
class Terminal:
    text: str


@dataclass(frozen=True)
class Nonterminal:
    name: str


GSymbol = Union[Terminal, Nonterminal]


@dataclass(frozen=True)
class Rule:
    label: str
    lhs: str
    rhs: tuple


@dataclass(frozen=True)
class Grammar:
    rules: tuple

    @property
    def start(self) -> str:
        return self.rules[0].lhs

    def rules_for(self, nt: str) -> list:
        return [r for r in self.rules if r.lhs == nt]

    def rule_by_label(self, label: str) -> Optional[Rule]:
        for r in self.rules:
            if r.label == label:
                return r
        return None


def validate_grammar(g: Grammar) -> Grammar:
    if not g.rules:
        raise ValueError("grammar has no rules")
    labels = [r.label for r in g.rules]
    if len(set(labels)) != len(labels):
        raise ValueError("rule labels must be unique")
    defined = {r.lhs for r in g.rules}
    for r in g.rules:
        for s in r.rhs:
            if isinstance(s, Nonterminal) and s.name not in defined:
                raise ValueError(f"undefined nonterminal {s.name!r}")
    _check_left_recursion(g)
    return g


def _nullable_set(g: Grammar) -> set:
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.lhs in nullable:
                continue
            if all(isinstance(s, Nonterminal) and s.name in nullable for s in r.rhs):
                nullable.add(r.lhs)
                changed = True
    return nullable


def _check_left_recursion(g: Grammar) -> None:
    nullable = _nullable_set(g)
    # edges: lhs -> nonterminals reachable in leftmost position (through
    # nullable prefixes)
    edges: dict = {}
    for r in g.rules:
        for s in r.rhs:
            if isinstance(s, Terminal):
                break
            edges.setdefault(r.lhs, set()).add(s.name)
            if s.name not in nullable:
                break

    state: dict = {}

    def visit(nt: str, trail: list):
        if state.get(nt) == "done":
            return
        if state.get(nt) == "visiting":
            cycle = trail[trail.index(nt):] + [nt]
            raise LeftRecursion(" -> ".join(cycle))
        state[nt] = "visiting"
        for nxt in edges.get(nt, ()):
            visit(nxt, trail + [nt])
        state[nt] = "done"

    for nt in {r.lhs for r in g.rules}:
        visit(nt, [])


def grammar_from_term(t: Term) -> Grammar:
    """Decode a grammar artifact: a list of rule(Label, Lhs, [t('x')|n(name)…])."""
    if not isinstance(t, TermList):
        raise Failure("grammar artifact must be a list of rules")
    rules = []
    for item in t.items:
        if not (isinstance(item, Compound) and item.functor == "rule"
                and len(item.args) == 3):
            raise Failure("grammar rule must be rule(Label,Lhs,[...])")
        label, lhs, rhs = item.args
        if not (isinstance(label, Atom) and isinstance(lhs, Atom)
                and isinstance(rhs, TermList)):
            raise Failure("malformed grammar rule")
        syms = []
        for s in rhs.items:
            if isinstance(s, Compound) and s.functor == "t" and len(s.args) == 1 \
                    and isinstance(s.args[0], Atom):
                syms.append(Terminal(s.args[0].name))
            elif isinstance(s, Compound) and s.functor == "n" and len(s.args) == 1 \
                    and isinstance(s.args[0], Atom):
                syms.append(Nonterminal(s.args[0].name))
            else:
                raise Failure("grammar symbols must be t('x') or n(name)")
        rules.append(Rule(label.name, lhs.name, tuple(syms)))
    try:
        return validate_grammar(Grammar(tuple(rules)))
    except ValueError as exc:
        raise Failure(f"ill-formed grammar: {exc}") from None
    except LeftRecursion as exc:
        raise Failure(f"left-recursive grammar: {exc}") from None


def grammar_to_term(g: Grammar) -> Term:
    items = []
    for r in g.rules:
        syms = [Compound("t", (Atom(s.text),)) if isinstance(s, Terminal)
                else Compound("n", (Atom(s.name),)) for s in r.rhs]
        items.append(Compound("rule", (Atom(r.label), Atom(r.lhs),
                                       TermList(tuple(syms)))))
    return TermList(tuple(items))


# --- parse trees -----------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    token: str


@dataclass(frozen=True)
class Node:
    label: str
    lhs: str
    children: tuple


Cst = Union[Leaf, Node]


def cst_to_term(c: Cst) -> Term:
    if isinstance(c, Leaf):
        return Compound("leaf", (Atom(c.token),))
    return Compound("node", (Atom(c.label), Atom(c.lhs),
                             TermList(tuple(cst_to_term(x) for x in c.children))))


def cst_from_term(t: Term) -> Cst:
    if isinstance(t, Compound) and t.functor == "leaf" and len(t.args) == 1 \
            and isinstance(t.args[0], Atom):
        return Leaf(t.args[0].name)
    if isinstance(t, Compound) and t.functor == "node" and len(t.args) == 3:
        label, lhs, children = t.args
        if isinstance(label, Atom) and isinstance(lhs, Atom) \
                and isinstance(children, TermList):
            return Node(label.name, lhs.name,
                        tuple(cst_from_term(c) for c in children.items))
    raise Failure("not a parse tree term")


def cst_ok(g: Grammar, c: Cst) -> bool:
    """Check that every node matches its rule's right-hand-side shape."""
    if isinstance(c, Leaf):
        return True
    rule = g.rule_by_label(c.label)
    if rule is None or rule.lhs != c.lhs or len(rule.rhs) != len(c.children):
        return False
    for sym, child in zip(rule.rhs, c.children):
        if isinstance(sym, Terminal):
            if not (isinstance(child, Leaf) and child.token == sym.text):
                return False
        else:
            if not (isinstance(child, Node) and child.lhs == sym.name
                    and cst_ok(g, child)):
                return False
    return True


# --- top-down interpretation ------------------------------------------------------


def _derivations(g: Grammar, nt: str, toks: Sequence[str], pos: int) -> Iterator:
    for rule in g.rules_for(nt):
        yield from _match(g, rule, rule.rhs, toks, pos, ())


def _match(g: Grammar, rule: Rule, syms: tuple, toks: Sequence[str], pos: int,
           acc: tuple) -> Iterator:
    if not syms:
        yield Node(rule.label, rule.lhs, acc), pos
        return
    head, rest = syms[0], syms[1:]
    if isinstance(head, Terminal):
        if pos < len(toks) and toks[pos] == head.text:
            yield from _match(g, rule, rest, toks, pos + 1, acc + (Leaf(head.text),))
    else:
        for node, p in _derivations(g, head.name, toks, pos):
            yield from _match(g, rule, rest, toks, p, acc + (node,))


def bgl_parse(g: Grammar, toks: Sequence[str]) -> Cst:
    """First full derivation in rule-declaration order."""
    validate_grammar(g)
    for node, p in _derivations(g, g.start, toks, 0):
        if p == len(toks):
            return node
    raise Failure("token sequence not derivable")


def bgl_accept(g: Grammar, toks: Sequence[str]) -> bool:
    try:
        bgl_parse(g, toks)
        return True
    except Failure:
        return False


def cst_implode(c: Cst) -> Term:
    """Labeled tree to abstract term: nullary labels become atoms."""
    if isinstance(c, Leaf):
        raise Failure("cannot implode a bare leaf")
    sub = tuple(cst_implode(x) for x in c.children if isinstance(x, Node))
    return Compound(c.label, sub) if sub else Atom(c.label)


def cst_explode(g: Grammar, t: Term, nt: Optional[str] = None) -> Cst:
    """Inverse of implode against the grammar's labeled rules."""
    if isinstance(t, Atom):
        label, args = t.name, ()
    elif isinstance(t, Compound):
        label, args = t.functor, t.args
    else:
        raise Failure("term does not match any rule label")
    rule = g.rule_by_label(label)
    if rule is None:
        raise Failure(f"no rule labeled {label!r}")
    if nt is not None and rule.lhs != nt:
        raise Failure(f"rule {label!r} derives {rule.lhs!r}, expected {nt!r}")
    nts = [s for s in rule.rhs if isinstance(s, Nonterminal)]
    if len(nts) != len(args):
        raise Failure(f"rule {label!r} expects {len(nts)} subtrees, got {len(args)}")
    children = []
    it = iter(args)
    for sym in rule.rhs:
        if isinstance(sym, Terminal):
            children.append(Leaf(sym.text))
        else:
            children.append(cst_explode(g, next(it), sym.name))
    return Node(rule.label, rule.lhs, tuple(children))


def cst_unparse(c: Cst) -> list:
    if isinstance(c, Leaf):
        return [c.token]
    out: list = []
    for child in c.children:
        out.extend(cst_unparse(child))
    return out


# --- signatures ---------------------------------------------------------------


@dataclass(frozen=True)
class SigSymbol:
    name: str
    argsorts: tuple
    result: str


@dataclass(frozen=True)
class Signature:
    symbols: tuple

    def lookup(self, name: str, arity: int) -> Optional[SigSymbol]:
        for s in self.symbols:
            if s.name == name and len(s.argsorts) == arity:
                return s
        return None


def validate_signature(sig: Signature) -> Signature:
    seen = set()
    for s in sig.symbols:
        key = (s.name, len(s.argsorts))
        if key in seen:
            raise ValueError(f"duplicate symbol {s.name}/{len(s.argsorts)}")
        seen.add(key)
    return sig


def signature_from_term(t: Term) -> Signature:
    """Decode a signature artifact: a list of symbol(Name,[Sorts…],Result)."""
    if not isinstance(t, TermList):
        raise Failure("signature artifact must be a list of symbols")
    symbols = []
    for item in t.items:
        if not (isinstance(item, Compound) and item.functor == "symbol"
                and len(item.args) == 3):
            raise Failure("signature entry must be symbol(Name,[...],Result)")
        name, sorts, result = item.args
        if not (isinstance(name, Atom) and isinstance(sorts, TermList)
                and isinstance(result, Atom)
                and all(isinstance(s, Atom) for s in sorts.items)):
            raise Failure("malformed signature entry")
        symbols.append(SigSymbol(name.name,
                                 tuple(s.name for s in sorts.items),
                                 result.name))
    try:
        return validate_signature(Signature(tuple(symbols)))
    except ValueError as exc:
        raise Failure(f"ill-formed signature: {exc}") from None


def signature_to_term(sig: Signature) -> Term:
    items = [Compound("symbol", (Atom(s.name),
                                 TermList(tuple(Atom(a) for a in s.argsorts)),
                                 Atom(s.result)))
             for s in sig.symbols]
    return TermList(tuple(items))


def bsl_conforms(sig: Signature, t: Term) -> bool:
    """Terms built solely from declared symbols at declared arities with
    matching argument sorts, rooted at any declared result sort."""

    def check(term: Term, expected: Optional[str]) -> bool:
        if isinstance(term, Atom):
            name, args = term.name, ()
        elif isinstance(term, Compound):
            name, args = term.functor, term.args
        else:
            return False
        sym = sig.lookup(name, len(args))
        if sym is None:
            return False
        if expected is not None and sym.result != expected:
            return False
        return all(check(a, s) for a, s in zip(args, sym.argsorts))

    return check(t, None)


def project_signature(g: Grammar) -> Signature:
    """Grammar to signature: one symbol per rule, sorts from the
    nonterminals on the right-hand side, result from the left."""
    symbols = [SigSymbol(r.label,
                         tuple(s.name for s in r.rhs if isinstance(s, Nonterminal)),
                         r.lhs)
               for r in g.rules]
    return validate_signature(Signature(tuple(symbols)))


# --- grammar and signature source notations ---------------------------------------

_BGL_RULE = re.compile(
    r"\[\s*([a-z]\w*)\s*\]\s*([a-z]\w*)\s*:\s*((?:(?:'[^']*'|[a-z]\w*)\s*)*);")
_BGL_SYM = re.compile(r"'([^']*)'|([a-z]\w*)")
_BSL_DECL = re.compile(
    r"symbol\s+([a-z]\w*)\s*:\s*([^;→]*?)→\s*([a-z]\w*)\s*;")


def _strip_comments(text: str) -> str:
    return re.sub(r"%[^\n]*", "", text)


def parse_bgl_source(text: str) -> Grammar:
    """Hand-written reader for the bracketed-label grammar notation."""
    body = _strip_comments(text)
    rules = []
    covered = []
    for m in _BGL_RULE.finditer(body):
        covered.append((m.start(), m.end()))
        label, lhs, rhs_text = m.group(1), m.group(2), m.group(3)
        syms: list = []
        for t, n in _BGL_SYM.findall(rhs_text):
            syms.append(Terminal(t) if t or not n else Nonterminal(n))
        rules.append(Rule(label, lhs, tuple(syms)))
    _require_full_coverage(body, covered, "grammar")
    try:
        return validate_grammar(Grammar(tuple(rules)))
    except (ValueError, LeftRecursion) as exc:
        raise Failure(f"ill-formed grammar source: {exc}") from None


def parse_bsl_source(text: str) -> Signature:
    """Hand-written reader for the signature notation (× and → separated)."""
    body = _strip_comments(text)
    symbols = []
    covered = []
    for m in _BSL_DECL.finditer(body):
        covered.append((m.start(), m.end()))
        name, sorts_text, result = m.group(1), m.group(2), m.group(3)
        sorts = tuple(s.strip() for s in sorts_text.split("×") if s.strip())
        for s in sorts:
            if not re.fullmatch(r"[a-z]\w*", s):
                raise Failure(f"bad sort name {s!r}")
        symbols.append(SigSymbol(name, sorts, result))
    _require_full_coverage(body, covered, "signature")
    try:
        return validate_signature(Signature(tuple(symbols)))
    except ValueError as exc:
        raise Failure(f"ill-formed signature source: {exc}") from None


def _require_full_coverage(body: str, covered: list, what: str) -> None:
    pos = 0
    for start, end in covered:
        if body[pos:start].strip():
            raise Failure(f"unrecognized {what} source near: "
                          f"{body[pos:start].strip()[:40]!r}")
        pos = end
    if body[pos:].strip():
        raise Failure(f"unrecognized {what} source near: {body[pos:].strip()[:40]!r}")
    if not covered:
        raise Failure(f"empty {what} source")


# --- the binary-number pipeline ----------------------------------------------------

_BNL_ALPHABET = {"0", "1", "."}
_WS = {" ", "\t", "\n", "\r"}


def bnl_scan(text: str) -> list:
    """One token per non-whitespace character of the 0/1/. alphabet."""
    toks = []
    for ch in text:
        if ch in _WS:
            continue
        if ch not in _BNL_ALPHABET:
            raise Failure(f"cannot scan character {ch!r}")
        toks.append(ch)
    return toks


def tokens_to_term(toks: Sequence[str]) -> Term:
    return TermList(tuple(Atom(t) for t in toks))


def term_to_tokens(t: Term) -> list:
    if not isinstance(t, TermList) or not all(isinstance(i, Atom) for i in t.items):
        raise Failure("token artifact must be a list of atoms")
    return [i.name for i in t.items]


def _split_bits(toks: Sequence[str]) -> tuple[list, Optional[list]]:
    if any(t not in _BNL_ALPHABET for t in toks):
        raise Failure("not a binary-number token sequence")
    if "." in toks:
        dot = toks.index(".")
        ints, frac = list(toks[:dot]), list(toks[dot + 1:])
        if "." in frac:
            raise Failure("more than one point")
    else:
        ints, frac = list(toks), None
    if not ints or (frac is not None and not frac):
        raise Failure("digits required on both sides of the point")
    return ints, frac


def _plus(a: Term, b: Term) -> Term:
    return Compound("+", (a, b))


def _minus(a: Term, b: Term) -> Term:
    return Compound("-", (a, b))


def bnl_convert(toks: Sequence[str]) -> Term:
    """Symbolic conversion to a power-of-two formula.

    Lengths appear as nested 1+1+… sums and positions as unevaluated
    Len-1 differences, exactly as the attribute rules synthesize them;
    a zero bit contributes the literal 0, a one bit 2^Pos, and the
    fractional part starts at position -1.
    """
    ints, frac = _split_bits(toks)

    def length_term(k: int) -> Term:
        t: Term = Int(1)
        for _ in range(k - 1):
            t = _plus(t, Int(1))
        return t

    def bits_value(bits: list, first_pos: Term) -> Term:
        positions = [first_pos]
        for _ in range(len(bits) - 1):
            positions.append(_minus(positions[-1], Int(1)))
        vals = [Compound("^", (Int(2), p)) if b == "1" else Int(0)
                for b, p in zip(bits, positions)]
        acc = vals[-1]
        for v in reversed(vals[:-1]):
            acc = _plus(v, acc)
        return acc

    int_val = bits_value(ints, _minus(length_term(len(ints)), Int(1)))
    frac_val: Term = Int(0) if frac is None else bits_value(frac, Int(-1))
    return _plus(int_val, frac_val)


def formula_solve(f: Term):
    """Arithmetic evaluation of a formula term; ints stay exact."""
    if isinstance(f, Int):
        return f.value
    if isinstance(f, Float):
        return f.value
    if isinstance(f, Compound):
        if f.functor == "+" and len(f.args) == 2:
            return formula_solve(f.args[0]) + formula_solve(f.args[1])
        if f.functor == "-" and len(f.args) == 2:
            return formula_solve(f.args[0]) - formula_solve(f.args[1])
        if f.functor == "-" and len(f.args) == 1:
            return -formula_solve(f.args[0])
        if f.functor == "^" and len(f.args) == 2:
            return formula_solve(f.args[0]) ** formula_solve(f.args[1])
    raise MalformedFormula(f"cannot evaluate: {f!r}")


def number_term(value) -> Term:
    return Int(value) if isinstance(value, int) else Float(value)


def _eval_bits(ints: list, frac: Optional[list]):
    total = 0
    n = len(ints)
    for i, b in enumerate(ints):
        if b == "1":
            total += 2 ** (n - 1 - i)
    if frac:
        for j, b in enumerate(frac):
            if b == "1":
                total += 2.0 ** -(j + 1)
    return total


def _ast_bits(t: Term) -> list:
    """Bit list out of the many/single tree."""
    if isinstance(t, Compound) and t.functor == "single" and len(t.args) == 1:
        return [_ast_bit(t.args[0])]
    if isinstance(t, Compound) and t.functor == "many" and len(t.args) == 2:
        return [_ast_bit(t.args[0])] + _ast_bits(t.args[1])
    raise Failure("not a bit-sequence tree")


def _ast_bit(t: Term) -> str:
    if t == Atom("zero"):
        return "0"
    if t == Atom("one"):
        return "1"
    raise Failure("not a bit tree")


def bnl_evaluate_tokens(toks: Sequence[str]):
    """Positional-weight evaluation, independent of the converter."""
    ints, frac = _split_bits(toks)
    return _eval_bits(ints, frac)


def bnl_evaluate_ast(t: Term):
    if not (isinstance(t, Compound) and t.functor == "number" and len(t.args) == 2):
        raise Failure("not a binary-number tree")
    ints = _ast_bits(t.args[0])
    rest = t.args[1]
    if rest == Atom("integer"):
        frac = None
    elif isinstance(rest, Compound) and rest.functor == "rational" and len(rest.args) == 1:
        frac = _ast_bits(rest.args[0])
    else:
        raise Failure("not a binary-number tree")
    return _eval_bits(ints, frac)


# --- native predicate surface --------------------------------------------------


def _tokens_of_input(c: Content) -> list:
    """Accept text or an already-tokenized artifact."""
    if c.lang is not None and is_term_lang(c.lang):
        return term_to_tokens(c.term())
    return bnl_scan(c.text())


def _grammar_of(c: Content) -> Grammar:
    try:
        return grammar_from_term(c.term())
    except TermSyntaxError as exc:
        raise Failure(f"grammar artifact unreadable: {exc}") from None


def _signature_of(c: Content) -> Signature:
    try:
        return signature_from_term(c.term())
    except TermSyntaxError as exc:
        raise Failure(f"signature artifact unreadable: {exc}") from None


def _nat_bnl_scanner(text_content: Content):
    toks = bnl_scan(text_content.text())
    return [Content.from_term(tokens_to_term(toks))]


def _scan_via(scanner: Atom, c: Content) -> list:
    out = get_native(scanner.name)(c)
    return term_to_tokens(out[0].term())


def _acceptor_args(args):
    """(scanner, grammar, text) or (grammar, tokens)."""
    if len(args) == 3:
        scanner, grammar_c, input_c = args
        if not isinstance(scanner, Atom):
            raise Failure("scanner must be named by an atom")
        return _grammar_of(grammar_c), _scan_via(scanner, input_c)
    if len(args) == 2:
        grammar_c, input_c = args
        return _grammar_of(grammar_c), _tokens_of_input(input_c)
    raise Failure("acceptor expects (scanner, grammar, input) or (grammar, input)")


def _nat_bgl_acceptor(*args):
    g, toks = _acceptor_args(args)
    if not bgl_accept(g, toks):
        raise Failure("token sequence not derivable")
    return []


def _nat_bgl_parser(*args):
    g, toks = _acceptor_args(args)
    cst = bgl_parse(g, toks)
    return [Content.from_term(cst_implode(cst))]


def _nat_cst_to_ast(tree_c: Content):
    return [Content.from_term(cst_implode(cst_from_term(tree_c.term())))]


def _nat_ast_to_cst(grammar_c: Content, term_c: Content):
    g = _grammar_of(grammar_c)
    return [Content.from_term(cst_to_term(cst_explode(g, term_c.term())))]


def _nat_tree_to_tokens(tree_c: Content):
    toks = cst_unparse(cst_from_term(tree_c.term()))
    return [Content.from_term(tokens_to_term(toks))]


def _nat_tree_to_text(tree_c: Content):
    toks = cst_unparse(cst_from_term(tree_c.term()))
    return [Content.from_text("".join(toks))]


def _nat_cst_ok(grammar_c: Content, tree_c: Content):
    g = _grammar_of(grammar_c)
    if not cst_ok(g, cst_from_term(tree_c.term())):
        raise Failure("tree does not follow the grammar's rule shapes")
    return []


def _nat_bsl_term(sig_c: Content, term_c: Content):
    sig = _signature_of(sig_c)
    if not bsl_conforms(sig, term_c.term()):
        raise Failure("term does not conform to the signature")
    return []


def _nat_bsl_conformance(term_c: Content, sig_c: Content):
    sig = _signature_of(sig_c)
    if not bsl_conforms(sig, term_c.term()):
        raise Failure("term does not conform to the signature")
    return []


def _nat_bgl_reader(text_c: Content):
    return [Content.from_term(grammar_to_term(parse_bgl_source(text_c.text())))]


def _nat_bsl_reader(text_c: Content):
    return [Content.from_term(signature_to_term(parse_bsl_source(text_c.text())))]


def _nat_bgl_to_bsl(grammar_c: Content):
    g = _grammar_of(grammar_c)
    return [Content.from_term(signature_to_term(project_signature(g)))]


def _nat_bgl_text_ok(text_c: Content):
    parse_bgl_source(text_c.text())
    return []


def _nat_bsl_text_ok(text_c: Content):
    parse_bsl_source(text_c.text())
    return []


def _nat_grammar_ok(term_c: Content):
    _grammar_of(term_c)
    return []


def _nat_signature_ok(term_c: Content):
    _signature_of(term_c)
    return []


def _nat_utf8_text(c: Content):
    try:
        c.data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise Failure(f"not UTF-8 text: {exc}") from None
    return []


def _nat_number_term(c: Content):
    if not isinstance(c.term(), (Int, Float)):
        raise Failure("artifact is not a single numeric term")
    return []


def _nat_formula_ok(c: Content):
    try:
        formula_solve(c.term())
    except MalformedFormula as exc:
        raise Failure(str(exc)) from None
    return []


def _nat_convert(tokens_c: Content):
    return [Content.from_term(bnl_convert(_tokens_of_input(tokens_c)))]


def _nat_solve(formula_c: Content):
    try:
        value = formula_solve(formula_c.term())
    except MalformedFormula as exc:
        raise Failure(str(exc)) from None
    return [Content.from_term(number_term(value))]


def bnl_evaluate(c: Content):
    """Evaluate text, token-list, or tree content to a number."""
    if c.lang is not None and is_term_lang(c.lang):
        t = c.term()
        if isinstance(t, TermList):
            return bnl_evaluate_tokens(term_to_tokens(t))
        return bnl_evaluate_ast(t)
    return bnl_evaluate_tokens(bnl_scan(c.text()))


def _nat_evaluate(c: Content):
    return [Content.from_term(number_term(bnl_evaluate(c)))]


_BUILTINS = {
    "bnlScanner": _nat_bnl_scanner,
    "bglAcceptor": _nat_bgl_acceptor,
    "bglTopDownAcceptor": _nat_bgl_acceptor,
    "bglParser": _nat_bgl_parser,
    "bglTopDownParser": _nat_bgl_parser,
    "cstToAst": _nat_cst_to_ast,
    "astToCst": _nat_ast_to_cst,
    "bglTreeToTokens": _nat_tree_to_tokens,
    "bglTreeToText": _nat_tree_to_text,
    "cstOk": _nat_cst_ok,
    "bslTerm": _nat_bsl_term,
    "bslConformance": _nat_bsl_conformance,
    "bglReader": _nat_bgl_reader,
    "bslReader": _nat_bsl_reader,
    "bglToBsl": _nat_bgl_to_bsl,
    "bglTextOk": _nat_bgl_text_ok,
    "bslTextOk": _nat_bsl_text_ok,
    "grammarOk": _nat_grammar_ok,
    "signatureOk": _nat_signature_ok,
    "utf8Text": _nat_utf8_text,
    "numberTerm": _nat_number_term,
    "formulaOk": _nat_formula_ok,
    "bnlTokensToFormula": _nat_convert,
    "formulaSolve": _nat_solve,
    "bnlEvaluator": _nat_evaluate,
}

for _name, _fn in _BUILTINS.items():
    register_native(_name, _fn, replace=True)
