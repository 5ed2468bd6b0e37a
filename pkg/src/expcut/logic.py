"""First-order terms and formulas in negation normal form.

Variables and constants live in one namespace: ``Var("a")`` and the
constant ``App("a", ())`` compare equal.  Whether a bare symbol is a
variable is decided by its role (binder, eigenvariable, substitution
domain), so substitution acts on every nullary symbol whose name is in the
domain, and only ``free_variables`` distinguishes the two kinds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Union

RESERVED_ATOMS = ("true", "false")


class CaptureError(ValueError):
    """A substituted term would be captured by a quantifier."""


# ---------------------------------------------------------------- terms


@dataclass(frozen=True, eq=False)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty variable name")

    def __eq__(self, other):
        if isinstance(other, Var):
            return self.name == other.name
        if isinstance(other, App):
            return not other.args and other.fn == self.name
        return NotImplemented

    def __hash__(self):
        return hash(("sym", self.name))

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False)
class App:
    fn: str
    args: tuple = ()

    def __post_init__(self):
        if not self.fn:
            raise ValueError("empty function symbol")
        object.__setattr__(self, "args", tuple(self.args))

    def __eq__(self, other):
        if isinstance(other, App):
            return self.fn == other.fn and self.args == other.args
        if isinstance(other, Var):
            return not self.args and self.fn == other.name
        return NotImplemented

    def __hash__(self):
        if not self.args:
            return hash(("sym", self.fn))
        return hash((self.fn, self.args))

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(map(str, self.args))})"

    def __repr__(self):
        return f"App({self.fn!r}, {self.args!r})"


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def term_names(t: Term) -> frozenset:
    """Names of all nullary symbols (variables and constants) in ``t``."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    if not t.args:
        return frozenset((t.fn,))
    return frozenset().union(*(term_names(a) for a in t.args))


def term_variables(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    return frozenset().union(*(term_variables(a) for a in t.args))


def subst_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return sigma.get(t.fn, t)
    return App(t.fn, tuple(subst_term(a, sigma) for a in t.args))


def term_size(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def subterms(t: Term):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


# ------------------------------------------------------------- formulas


class Formula:
    """Base class of NNF formulas.  Subclasses are frozen dataclasses."""

    __slots__ = ()

    def __str__(self):
        return _show(self, top=True)

    def __invert__(self):
        return dual(self)

    @cached_property
    def free_names(self) -> frozenset:
        """Free nullary symbol names (variables and constants)."""
        return _free(self, names=True)

    @cached_property
    def free_vars(self) -> frozenset:
        return _free(self, names=False)


def _check_pred(pred):
    if not pred:
        raise ValueError("empty predicate symbol")


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()

    def __post_init__(self):
        _check_pred(self.pred)
        object.__setattr__(self, "args", tuple(self.args))
        if self.pred in RESERVED_ATOMS and self.args:
            raise ValueError(f"reserved atom {self.pred!r} takes no arguments")


@dataclass(frozen=True)
class NegAtom(Formula):
    pred: str
    args: tuple = ()

    def __post_init__(self):
        _check_pred(self.pred)
        object.__setattr__(self, "args", tuple(self.args))
        if self.pred in RESERVED_ATOMS:
            raise ValueError(
                f"negated reserved atom {self.pred!r}; use {_flip_reserved(self.pred)!r}"
            )


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        if self.var not in self.body.free_names:
            raise ValueError(f"vacuous quantifier on {self.var!r}")


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        if self.var not in self.body.free_names:
            raise ValueError(f"vacuous quantifier on {self.var!r}")


Literal = Union[Atom, NegAtom]
TRUE = Atom("true")
FALSE = Atom("false")


def _flip_reserved(pred):
    return "false" if pred == "true" else "true"


def is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, NegAtom))


def is_positive(f: Formula) -> bool:
    """Top connective is a disjunction, an existential or a positive atom."""
    return isinstance(f, (Or, Exists, Atom))


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Atom, NegAtom)):
        return True
    if isinstance(f, (And, Or)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def negate_literal(f: Literal) -> Literal:
    if isinstance(f, Atom):
        if f.pred in RESERVED_ATOMS:
            return Atom(_flip_reserved(f.pred))
        return NegAtom(f.pred, f.args)
    return Atom(f.pred, f.args)


def dual(f: Formula) -> Formula:
    """De Morgan dual; ``true`` and ``false`` swap."""
    if isinstance(f, (Atom, NegAtom)):
        return negate_literal(f)
    if isinstance(f, And):
        return Or(dual(f.left), dual(f.right))
    if isinstance(f, Or):
        return And(dual(f.left), dual(f.right))
    if isinstance(f, Exists):
        return Forall(f.var, dual(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, dual(f.body))
    raise TypeError(f"not a formula: {f!r}")


def _free(f, names):
    pick = term_names if names else term_variables
    if isinstance(f, (Atom, NegAtom)):
        return frozenset().union(*(pick(a) for a in f.args))
    if isinstance(f, (And, Or)):
        return (f.left.free_names if names else f.left.free_vars) | (
            f.right.free_names if names else f.right.free_vars
        )
    body = f.body.free_names if names else f.body.free_vars
    return body - {f.var}


def free_variables(x) -> frozenset:
    """Names of the free variables of a term or formula (constants excluded)."""
    if isinstance(x, Formula):
        return x.free_vars
    return term_variables(x)


def occurs(name: str, x) -> bool:
    """Whether the symbol ``name`` occurs free in a term or formula."""
    if isinstance(x, Formula):
        return name in x.free_names
    return name in term_names(x)


def substitute(x, sigma: Mapping[str, Term]):
    """Simultaneous capture-checked substitution of free symbols.

    Raises CaptureError instead of renaming bound variables.
    """
    if not sigma:
        return x
    if not isinstance(x, Formula):
        return subst_term(x, sigma)
    return _subst(x, dict(sigma))


def _subst(f, sigma):
    live = {k: v for k, v in sigma.items() if k in f.free_names}
    if not live:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, live) for a in f.args))
    if isinstance(f, NegAtom):
        return NegAtom(f.pred, tuple(subst_term(a, live) for a in f.args))
    if isinstance(f, (And, Or)):
        return type(f)(_subst(f.left, live), _subst(f.right, live))
    live.pop(f.var, None)
    for name, t in live.items():
        if f.var in term_names(t) and name in f.body.free_names:
            raise CaptureError(
                f"substituting {t} for {name} is captured by the binder {f.var}"
            )
    return type(f)(f.var, _subst(f.body, live))


def complexity(f: Formula) -> int:
    """Number of binary connectives and quantifiers."""
    if isinstance(f, (Atom, NegAtom)):
        return 0
    if isinstance(f, (And, Or)):
        return 1 + complexity(f.left) + complexity(f.right)
    return 1 + complexity(f.body)


def depth(f: Formula) -> int:
    if isinstance(f, (Atom, NegAtom)):
        return 0
    if isinstance(f, (And, Or)):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


def alpha_canonical(f: Formula) -> Formula:
    """Rename bound variables to ``%0, %1, ...`` in preorder.

    The ``%`` prefix cannot appear in parsed names, so the result never
    clashes with a free symbol.
    """
    counter = itertools.count()

    def walk(g):
        if isinstance(g, (Atom, NegAtom)):
            return g
        if isinstance(g, (And, Or)):
            left = walk(g.left)
            return type(g)(left, walk(g.right))
        fresh = f"%{next(counter)}"
        body = _subst(g.body, {g.var: Var(fresh)})
        return type(g)(fresh, walk(body))

    return walk(f)


def alpha_equal(f: Formula, g: Formula) -> bool:
    return f == g or alpha_canonical(f) == alpha_canonical(g)


def atoms(f: Formula):
    """Atoms of ``f`` in order of first occurrence, as positive ``Atom``."""
    seen = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Atom, NegAtom)):
            a = Atom(g.pred, g.args)
            seen.setdefault(a, None)
        elif isinstance(g, (And, Or)):
            stack.append(g.right)
            stack.append(g.left)
        else:
            stack.append(g.body)
    return list(seen)


def subformulas(f: Formula):
    yield f
    if isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.body)


# ------------------------------------------------------------- printing


def _atom_text(pred, args):
    if not args:
        return pred
    return f"{pred}({', '.join(map(str, args))})"


def _show(f, top=False):
    if isinstance(f, Atom):
        return _atom_text(f.pred, f.args)
    if isinstance(f, NegAtom):
        return "~" + _atom_text(f.pred, f.args)
    if isinstance(f, And):
        return f"({_show(f.left)} & {_show(f.right)})"
    if isinstance(f, Or):
        return f"({_show(f.left)} | {_show(f.right)})"
    q = "ex" if isinstance(f, Exists) else "all"
    return f"{q} {f.var} {_show(f.body)}"
