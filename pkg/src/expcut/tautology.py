"""Validity of quantifier-free sequents.

A sequent is read disjunctively.  It is valid iff the conjunction of the
duals of its members is unsatisfiable; satisfiability is decided by DPLL
over a polarity-aware (Plaisted-Greenbaum) clause encoding, which keeps the
clause set linear in the size of the sequent.
"""

from __future__ import annotations

from collections import Counter

from .logic import And, Atom, Formula, NegAtom, Or, RESERVED_ATOMS, dual, is_quantifier_free

DEFAULT_ATOM_LIMIT = 64


class ResourceLimit(RuntimeError):
    """Too many distinct atoms for the configured bound."""


def sequent_atoms(sequent) -> list:
    seen = {}
    for f in sequent:
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, (Atom, NegAtom)):
                seen.setdefault(Atom(g.pred, g.args), None)
            elif isinstance(g, (And, Or)):
                stack.append(g.right)
                stack.append(g.left)
            else:
                raise ValueError(f"not quantifier-free: {g}")
    return list(seen)


def evaluate(f: Formula, valuation) -> bool:
    """Truth value of a quantifier-free formula; missing atoms read as false."""
    if isinstance(f, Atom):
        if f.pred == "true":
            return True
        if f.pred == "false":
            return False
        return bool(valuation.get(f, False))
    if isinstance(f, NegAtom):
        return not valuation.get(Atom(f.pred, f.args), False)
    if isinstance(f, And):
        return evaluate(f.left, valuation) and evaluate(f.right, valuation)
    if isinstance(f, Or):
        return evaluate(f.left, valuation) or evaluate(f.right, valuation)
    raise ValueError(f"not quantifier-free: {f}")


class _Encoder:
    def __init__(self):
        self.ids = {}
        self.nvars = 0
        self.clauses = []

    def atom_var(self, a: Atom) -> int:
        v = self.ids.get(a)
        if v is None:
            self.nvars += 1
            v = self.ids[a] = self.nvars
            if a.pred == "true":
                self.clauses.append([v])
            elif a.pred == "false":
                self.clauses.append([-v])
        return v

    def lit(self, f: Formula) -> int:
        """A literal implying ``f`` (positive-polarity encoding)."""
        if isinstance(f, Atom):
            return self.atom_var(f)
        if isinstance(f, NegAtom):
            return -self.atom_var(Atom(f.pred, f.args))
        left, right = self.lit(f.left), self.lit(f.right)
        self.nvars += 1
        g = self.nvars
        if isinstance(f, And):
            self.clauses.append([-g, left])
            self.clauses.append([-g, right])
        else:
            self.clauses.append([-g, left, right])
        return g


def _dpll(clauses, nvars):
    """Return a satisfying assignment {var: bool} or None."""
    assignment = {}
    trail = []

    def value(lit):
        v = assignment.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def assign(lit):
        assignment[abs(lit)] = lit > 0
        trail.append(abs(lit))

    def propagate():
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                n_unassigned = 0
                satisfied = False
                for lit in clause:
                    val = value(lit)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        n_unassigned += 1
                        unassigned = lit
                if satisfied:
                    continue
                if n_unassigned == 0:
                    return False
                if n_unassigned == 1:
                    assign(unassigned)
                    changed = True
        return True

    def choose():
        counts = Counter()
        for clause in clauses:
            if any(value(lit) is True for lit in clause):
                continue
            for lit in clause:
                if value(lit) is None:
                    counts[lit] += 1
        if not counts:
            return None
        return counts.most_common(1)[0][0]

    stack = []  # (trail length, literal tried, tried both)
    while True:
        if propagate():
            lit = choose()
            if lit is None:
                return dict(assignment)
            stack.append((len(trail), lit, False))
            assign(lit)
            continue
        while stack:
            mark, lit, flipped = stack.pop()
            for v in trail[mark:]:
                del assignment[v]
            del trail[mark:]
            if not flipped:
                stack.append((mark, -lit, True))
                assign(-lit)
                break
        else:
            return None


def is_tautology(sequent, max_atoms: int = DEFAULT_ATOM_LIMIT):
    """Decide validity of a quantifier-free sequent.

    Returns ``(True, None)`` or ``(False, countermodel)`` where the
    countermodel maps every atom of the sequent to a boolean and falsifies
    each member.
    """
    sequent = list(sequent)
    for f in sequent:
        if not is_quantifier_free(f):
            raise ValueError(f"not quantifier-free: {f}")
    atom_list = sequent_atoms(sequent)
    proper = [a for a in atom_list if a.pred not in RESERVED_ATOMS]
    if len(proper) > max_atoms:
        raise ResourceLimit(f"{len(proper)} distinct atoms exceed the bound {max_atoms}")
    enc = _Encoder()
    for a in atom_list:
        enc.atom_var(a)
    for f in sequent:
        enc.clauses.append([enc.lit(dual(f))])
    model = _dpll(enc.clauses, enc.nvars)
    if model is None:
        return True, None
    valuation = {a: model.get(enc.ids[a], False) for a in proper}
    return False, valuation
