"""Text grammar, parser and printer for formulas, expansion proofs and LK proofs.

Formulas::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "~" atom | ("all" | "ex") ident unary | "(" formula ")" | atom

Expansion trees::

    etree := literal | "(" etree ("&" | "|") etree ")"
           | "(" "ex" ident formula ("+[" term "]" etree)+ ")"
           | "(" "all" ident formula "+[" ident "]" etree ")"

An expansion proof is a list of ``cut <etree> <etree>`` and ``tree <etree>``
lines.  LK proofs are s-expressions ``(rule [arg] [sequent] premise*)``.

A bare identifier denotes a variable when it is used as a binder or as an
eigenvariable anywhere in the parsed object, and a constant otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expansion import (
    AndN,
    Cut,
    ExistsN,
    ExpansionProof,
    ForallN,
    Leaf,
    OrN,
    make_cut,
    show_proof,
    show_tree,
)
from .logic import And, App, Atom, Exists, Forall, NegAtom, Or, Var

KEYWORDS = frozenset({"all", "ex", "cut", "tree"})
LK_RULES = ("init", "forall", "exists", "and", "or", "cut")


@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(f"parse error at byte {span.byte_start}: expected {expected}, found {found}")


_TOKEN = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)|(?P<ident>[^\W\d_]\w*)|(?P<plus>\+\[)|(?P<punct>[(),~&|\[\]])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "punct" or "eof"
    text: str
    span: SourceSpan

    def describe(self):
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def tokenize(text: str) -> list:
    offsets = []
    total = 0
    for ch in text:
        offsets.append(total)
        total += len(ch.encode("utf-8"))
    offsets.append(total)
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            span = SourceSpan(offsets[pos], offsets[pos + 1])
            raise ParseError(span, "a token", repr(text[pos]))
        if m.lastgroup != "ws":
            kind = "ident" if m.lastgroup == "ident" else "punct"
            out.append(Token(kind, m.group(), SourceSpan(offsets[m.start()], offsets[m.end()])))
        pos = m.end()
    out.append(Token("eof", "", SourceSpan(total, total)))
    return out


class _Parser:
    def __init__(self, text: str, variables=frozenset()):
        self.tokens = tokenize(text)
        self.pos = 0
        self.variables = variables
        self.bound = set()  # names used as binders or eigenvariables

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def fail(self, expected):
        raise ParseError(self.tok.span, expected, self.tok.describe())

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.pos += 1
        return t

    def ident(self, what="identifier") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(what)
        self.pos += 1
        return t.text

    def binder(self) -> str:
        name = self.ident("variable")
        self.bound.add(name)
        return name

    def end(self):
        if self.tok.kind != "eof":
            self.fail("end of input")

    # -- terms and formulas
    def term(self):
        name = self.ident("term")
        if self.at("("):
            return App(name, self._args())
        return Var(name) if name in self.variables else App(name, ())

    def _args(self):
        self.expect("(")
        args = [self.term()]
        while self.at(","):
            self.pos += 1
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def atom(self):
        start = self.tok.span
        name = self.ident("atom")
        args = self._args() if self.at("(") else ()
        try:
            return Atom(name, args)
        except ValueError as exc:
            raise ParseError(start, "well-formed atom", str(exc)) from None

    def literal(self):
        if self.at("~"):
            self.pos += 1
            a = self.atom()
            if a.pred == "true":
                return Atom("false")
            if a.pred == "false":
                return Atom("true")
            return NegAtom(a.pred, a.args)
        return self.atom()

    def formula(self):
        f = self.conj()
        while self.at("|"):
            self.pos += 1
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.at("&"):
            self.pos += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.at("~"):
            if self.peek().kind != "ident":
                self.pos += 1
                self.fail("atom (negation applies to atoms only)")
            return self.literal()
        if self.tok.text in ("all", "ex") and self.tok.kind == "ident":
            start = self.tok.span
            q = Forall if self.tok.text == "all" else Exists
            self.pos += 1
            var = self.binder()
            body = self.unary()
            try:
                return q(var, body)
            except ValueError as exc:
                raise ParseError(start, "non-vacuous quantifier", str(exc)) from None
        if self.at("("):
            self.pos += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    # -- expansion trees
    def etree(self):
        if not self.at("("):
            if self.tok.kind != "ident" and not self.at("~"):
                self.fail("expansion tree")
            return Leaf(self.literal())
        self.pos += 1
        if self.tok.kind == "ident" and self.tok.text in ("all", "ex"):
            is_all = self.tok.text == "all"
            start = self.tok.span
            self.pos += 1
            var = self.binder()
            matrix = self.formula()
            try:
                (Forall if is_all else Exists)(var, matrix)
            except ValueError as exc:
                raise ParseError(start, "non-vacuous quantifier", str(exc)) from None
            if is_all:
                self.expect("+[")
                eigen = self.binder()
                self.expect("]")
                child = self.etree()
                self.expect(")")
                return ForallN(var, matrix, eigen, child)
            expansions = []
            while self.at("+["):
                self.pos += 1
                t = self.term()
                self.expect("]")
                expansions.append((t, self.etree()))
            if not expansions:
                self.fail("'+['")
            self.expect(")")
            return ExistsN(var, matrix, tuple(expansions))
        left = self.etree()
        if self.at("&"):
            node = AndN
        elif self.at("|"):
            node = OrN
        else:
            self.fail("'&' or '|'")
        self.pos += 1
        right = self.etree()
        self.expect(")")
        return node(left, right)

    def proof(self):
        cuts, trees = [], []
        while self.tok.kind != "eof":
            if self.at("cut"):
                self.pos += 1
                e1 = self.etree()
                e2 = self.etree()
                cuts.append(make_cut(e1, e2))
            elif self.at("tree"):
                self.pos += 1
                trees.append(self.etree())
            else:
                self.fail("'cut' or 'tree'")
        return ExpansionProof(tuple(cuts), tuple(trees))

    # -- LK proofs
    def sequent(self):
        self.expect("[")
        out = []
        if not self.at("]"):
            out.append(self.formula())
            while self.at(","):
                self.pos += 1
                out.append(self.formula())
        self.expect("]")
        return tuple(out)

    def lk(self):
        from .lk import LKProof

        self.expect("(")
        t = self.tok
        if t.kind != "ident" or t.text not in LK_RULES:
            self.fail("LK rule name (" + ", ".join(LK_RULES) + ")")
        rule = t.text
        self.pos += 1
        arg = None
        if rule == "init":
            arg = self.literal()
        elif rule == "forall":
            arg = self.binder()
        elif rule == "exists":
            arg = self.term()
        elif rule == "cut":
            arg = self.formula()
        conclusion = self.sequent()
        premises = []
        while self.at("("):
            premises.append(self.lk())
        self.expect(")")
        return LKProof(rule, conclusion, tuple(premises), arg)


def _parse(text, entry):
    first = _Parser(text)
    result = entry(first)
    first.end()
    if not first.bound:
        return result
    second = _Parser(text, frozenset(first.bound))
    result = entry(second)
    second.end()
    return result


def parse_term(text: str):
    return _parse(text, _Parser.term)


def parse_formula(text: str):
    return _parse(text, _Parser.formula)


def parse_sequent(text: str) -> tuple:
    """A comma-separated list of formulas (brackets optional)."""
    stripped = text.strip()
    if not stripped.startswith("["):
        text = "[" + text + "]"
    return _parse(text, _Parser.sequent)


def parse_tree(text: str):
    return _parse(text, _Parser.etree)


def parse_expansion_proof(text: str) -> ExpansionProof:
    return _parse(text, _Parser.proof)


def parse_lk_proof(text: str):
    return _parse(text, _Parser.lk)


def print_formula(f) -> str:
    return str(f)


def print_tree(e) -> str:
    return show_tree(e)


def print_expansion_proof(p: ExpansionProof) -> str:
    return show_proof(p)


def print_sequent(seq) -> str:
    return "[" + ", ".join(map(str, seq)) + "]"


def print_lk_proof(pi, indent: int = 0) -> str:
    """Indented s-expression; one inference per line."""
    lines = []
    stack = [(pi, indent)]
    while stack:
        node, depth = stack.pop()
        if node is None:
            lines[-1] += ")"
            continue
        head = [node.rule]
        if node.arg is not None:
            head.append(str(node.arg))
        head.append(print_sequent(node.conclusion))
        lines.append("  " * depth + "(" + " ".join(head))
        stack.append((None, depth))
        for prem in reversed(node.premises):
            stack.append((prem, depth + 1))
    return "\n".join(lines) + "\n"


__all__ = [
    "Cut",
    "ParseError",
    "SourceSpan",
    "parse_expansion_proof",
    "parse_formula",
    "parse_lk_proof",
    "parse_sequent",
    "parse_term",
    "parse_tree",
    "print_expansion_proof",
    "print_formula",
    "print_lk_proof",
    "print_sequent",
    "print_tree",
]
