"""Sequent calculus LK: proof objects, checking, and translations to and from
expansion proofs.

Sequents are read as multisets by ``expand`` and as sets by
``sequentialize``; ``check_lk`` supports both readings.  Besides the usual
initial sequents ``Γ, A, ~A`` the checker accepts ``Γ, true`` (rule
``init`` with distinguished atom ``true``), so that proofs over the reserved
atoms can be sequentialized.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .expansion import (
    AndN,
    Cut,
    ExistsN,
    ExpansionProof,
    ForallN,
    FreshNames,
    Leaf,
    OrN,
    DependencyGraph,
    apply_substitution_tree,
    canon,
    check_proof,
    coerce_weakening,
    make_cut,
    shallow_sequent,
    show_proof,
)
from .logic import (
    TRUE,
    And,
    Atom,
    CaptureError,
    Exists,
    Forall,
    Formula,
    NegAtom,
    Or,
    Var,
    dual,
    is_positive,
    occurs,
    substitute,
    term_names,
)

RULES = ("init", "forall", "exists", "and", "or", "cut")


class NotRegular(ValueError):
    """The LK proof handed to ``expand`` is not a regular LK proof."""


class InvalidInput(ValueError):
    """The expansion proof handed to ``sequentialize`` is not correct."""


class Stuck(RuntimeError):
    """No minimal node found although the input was checked acyclic."""


@dataclass(frozen=True)
class LKProof:
    rule: str
    conclusion: tuple
    premises: tuple = ()
    arg: object = None  # atom (init), eigenvariable (forall), term (exists), cut formula (cut)

    def __post_init__(self):
        object.__setattr__(self, "conclusion", tuple(self.conclusion))
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.rule not in RULES:
            raise ValueError(f"unknown LK rule {self.rule!r}")

    def __str__(self):
        from .syntax import print_lk_proof

        return print_lk_proof(self)

    def nodes(self):
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.premises))

    @property
    def size(self):
        return sum(1 for _ in self.nodes())

    @property
    def height(self):
        best = 0
        stack = [(self, 1)]
        while stack:
            n, d = stack.pop()
            best = max(best, d)
            stack.extend((p, d + 1) for p in n.premises)
        return best

    @property
    def cut_count(self):
        return sum(1 for n in self.nodes() if n.rule == "cut")

    @property
    def is_cut_free(self):
        return self.cut_count == 0


def eigenvariables(pi: LKProof) -> list:
    return [n.arg for n in pi.nodes() if n.rule == "forall"]


# ----------------------------------------------------------------- checking


@dataclass
class LKReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def lines(self):
        if self.ok:
            return ["lk: ok"]
        return ["lk: FAILED"] + [f"  {v}" for v in self.violations]


def _keys(seq):
    return Counter(canon(f) for f in seq)


def _matches(premise, base, extra, semantics, principal=None):
    """Whether ``premise`` is ``base`` plus ``extra``.

    Under set semantics the premise may additionally keep ``principal``.
    """
    if semantics == "multiset":
        return _keys(premise) == _keys(base) + _keys(extra)
    want = set(_keys(base)) | set(_keys(extra))
    got = set(_keys(premise))
    if got == want:
        return True
    return principal is not None and got == want | {canon(principal)}


def _remove_at(seq, i):
    return seq[:i] + seq[i + 1 :]


def _check_node(n: LKProof, semantics: str):
    """None if the inference is correct, else a message."""
    conc = n.conclusion
    prem = n.premises
    arity = {"init": 0, "forall": 1, "exists": 1, "and": 2, "or": 1, "cut": 2}[n.rule]
    if len(prem) != arity:
        return f"{n.rule} needs {arity} premises, has {len(prem)}"
    keys = {canon(f) for f in conc}
    if n.rule == "init":
        a = n.arg
        if not isinstance(a, (Atom, NegAtom)):
            return f"init needs an atom, got {a}"
        if isinstance(a, Atom) and a.pred in ("true", "false"):
            return None if canon(TRUE) in keys else "init on true needs true in the sequent"
        if canon(a) in keys and canon(dual(a)) in keys:
            return None
        return f"initial sequent does not contain {a} and {dual(a)}"
    if n.rule == "cut":
        a = n.arg
        if not isinstance(a, Formula):
            return "cut needs a cut formula"
        if _matches(prem[0].conclusion, conc, [a], semantics) and _matches(
            prem[1].conclusion, conc, [dual(a)], semantics
        ):
            return None
        return f"cut on {a}: premises do not match"
    for i, f in enumerate(conc):
        rest = _remove_at(conc, i)
        if n.rule == "or" and isinstance(f, Or):
            if _matches(prem[0].conclusion, rest, [f.left, f.right], semantics, f):
                return None
        elif n.rule == "and" and isinstance(f, And):
            if _matches(prem[0].conclusion, rest, [f.left], semantics, f) and _matches(
                prem[1].conclusion, rest, [f.right], semantics, f
            ):
                return None
        elif n.rule == "forall" and isinstance(f, Forall):
            if not isinstance(n.arg, str):
                return "forall needs an eigenvariable"
            try:
                inst = substitute(f.body, {f.var: Var(n.arg)})
            except CaptureError:
                continue
            if _matches(prem[0].conclusion, rest, [inst], semantics, f):
                if any(occurs(n.arg, g) for g in conc):
                    return f"eigenvariable {n.arg} occurs in the conclusion"
                return None
        elif n.rule == "exists" and isinstance(f, Exists):
            if n.arg is None or isinstance(n.arg, (str, Formula)):
                return "exists needs a witness term"
            try:
                inst = substitute(f.body, {f.var: n.arg})
            except CaptureError:
                continue
            if _matches(prem[0].conclusion, conc, [inst], semantics):
                return None
    return f"{n.rule}: no principal formula matches the premises"


def check_lk(pi: LKProof, require_regular: bool = False, semantics: str = "multiset") -> LKReport:
    if semantics not in ("multiset", "set"):
        raise ValueError(f"unknown sequent semantics {semantics!r}")
    report = LKReport()
    for n in pi.nodes():
        msg = _check_node(n, semantics)
        if msg:
            report.violations.append(f"{msg} at [{', '.join(map(str, n.conclusion))}]")
    if require_regular:
        seen = set()
        for a in eigenvariables(pi):
            if a in seen:
                report.violations.append(f"eigenvariable {a} used by two forall inferences")
            seen.add(a)
            if any(occurs(a, f) for f in pi.conclusion):
                report.violations.append(f"eigenvariable {a} is free in the end-sequent")
    return report


def weaken(pi: LKProof, formulas) -> LKProof:
    """Add ``formulas`` to every sequent of ``pi`` (skipping ones present)."""
    formulas = list(formulas)
    if not formulas:
        return pi
    out = {}
    stack = [(pi, False)]
    while stack:
        n, done = stack.pop()
        if not done:
            stack.append((n, True))
            stack.extend((p, False) for p in n.premises)
            continue
        if id(n) in out:
            continue
        keys = {canon(f) for f in n.conclusion}
        extra = tuple(f for f in formulas if canon(f) not in keys)
        out[id(n)] = LKProof(n.rule, n.conclusion + extra, tuple(out[id(p)] for p in n.premises), n.arg)
    return out[id(pi)]


# --------------------------------------------------------- LK -> expansion


def _lk_names(pi: LKProof) -> set:
    from .expansion import _formula_names

    names = set()
    for n in pi.nodes():
        for f in n.conclusion:
            names |= _formula_names(f)
        if n.rule == "forall":
            names.add(n.arg)
        elif n.rule == "exists":
            names |= term_names(n.arg)
    return names


def _assign(premise, roles):
    """Match each role formula to a distinct premise index (alpha-equality)."""
    pkeys = [canon(f) for f in premise]
    used = set()
    out = []
    for r in roles:
        k = canon(r)
        for i, pk in enumerate(pkeys):
            if i not in used and pk == k:
                used.add(i)
                out.append(i)
                break
        else:
            raise NotRegular(f"premise [{', '.join(map(str, premise))}] lacks {r}")
    return out


def _principal(n: LKProof):
    """Index of the principal formula in the conclusion (not for init/cut)."""
    for i, f in enumerate(n.conclusion):
        rest = _remove_at(n.conclusion, i)
        if n.rule == "or" and isinstance(f, Or):
            if _matches(n.premises[0].conclusion, rest, [f.left, f.right], "multiset"):
                return i
        elif n.rule == "and" and isinstance(f, And):
            if _matches(n.premises[0].conclusion, rest, [f.left], "multiset") and _matches(
                n.premises[1].conclusion, rest, [f.right], "multiset"
            ):
                return i
        elif n.rule == "forall" and isinstance(f, Forall):
            inst = substitute(f.body, {f.var: Var(n.arg)})
            if _matches(n.premises[0].conclusion, rest, [inst], "multiset"):
                return i
        elif n.rule == "exists" and isinstance(f, Exists):
            inst = substitute(f.body, {f.var: n.arg})
            if _matches(n.premises[0].conclusion, n.conclusion, [inst], "multiset"):
                return i
    raise NotRegular(f"no principal formula for {n.rule} at [{', '.join(map(str, n.conclusion))}]")


def _eigen_renaming(t1, t2, rho1, rho2, generated):
    """Collect renamings that make ``t1`` and ``t2`` agree on eigenvariables
    along their spine of connectives and universal nodes.

    A name made up for a weakened formula yields to the other side's name;
    otherwise the second side is renamed.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, ForallN) and isinstance(b, ForallN):
            if a.eigen != b.eigen:
                if a.eigen in generated and b.eigen not in generated:
                    rho1.setdefault(a.eigen, Var(b.eigen))
                else:
                    rho2.setdefault(b.eigen, Var(a.eigen))
            stack.append((a.child, b.child))
        elif isinstance(a, (AndN, OrN)) and type(a) is type(b):
            stack.append((a.left, b.left))
            stack.append((a.right, b.right))


def _is_weakening(t, generated) -> bool:
    """Whether ``t`` is the stand-in tree of a weakened formula."""
    stack = [t]
    while stack:
        e = stack.pop()
        if isinstance(e, ExistsN):
            if len(e.expansions) != 1 or e.expansions[0][0] != Var(e.var):
                return False
            stack.append(e.expansions[0][1])
        elif isinstance(e, ForallN):
            if e.eigen not in generated:
                return False
            stack.append(e.child)
        elif isinstance(e, (AndN, OrN)):
            stack.extend((e.left, e.right))
    return True


def _join_expansions(var, pairs, generated):
    """Concatenate without repeats; stand-in instances of a weakened
    existential are dropped as soon as a real instance is present."""
    out = []
    for x in pairs:
        if x not in out:
            out.append(x)
    real = [x for x in out if not (x[0] == Var(var) and _is_weakening(x[1], generated))]
    return tuple(real) if real else tuple(out[:1])


def merge_trees(t1, t2, generated=frozenset()):
    """Contract two trees with the same shallow formula and aligned eigenvariables."""
    if isinstance(t1, Leaf):
        return t1
    if isinstance(t1, (AndN, OrN)):
        return type(t1)(merge_trees(t1.left, t2.left, generated), merge_trees(t1.right, t2.right, generated))
    if isinstance(t1, ForallN):
        return ForallN(t1.var, t1.matrix, t1.eigen, merge_trees(t1.child, t2.child, generated))
    return ExistsN(t1.var, t1.matrix, _join_expansions(t1.var, t1.expansions + t2.expansions, generated))


def _rename_side(cuts, trees, rho):
    if not rho:
        return list(cuts), list(trees)
    cuts = [
        Cut(apply_substitution_tree(c.positive, rho), apply_substitution_tree(c.negative, rho))
        for c in cuts
    ]
    return cuts, [apply_substitution_tree(t, rho) for t in trees]


def _contract(side1, idx1, side2, idx2, generated):
    """Contract the context shared by the two premises of a binary inference.

    ``side`` is ``(cuts, trees)`` of a premise and ``idx`` lists the tree
    positions of the context, in corresponding order.  Returns the combined
    cuts, the merged context and both (renamed) tree lists.
    """
    rho1, rho2 = {}, {}
    for i, j in zip(idx1, idx2):
        _eigen_renaming(side1[1][i], side2[1][j], rho1, rho2, generated)
    cuts1, trees1 = _rename_side(*side1, rho1)
    cuts2, trees2 = _rename_side(*side2, rho2)
    ctx = [merge_trees(trees1[i], trees2[j], generated) for i, j in zip(idx1, idx2)]
    return cuts1 + cuts2, ctx, trees1, trees2


def expand(pi: LKProof, fresh: Optional[FreshNames] = None, check: bool = True) -> ExpansionProof:
    """The expansion proof read off a regular LK proof (multiset reading).

    Trees of the result line up with the end-sequent of ``pi``.
    """
    if check:
        report = check_lk(pi, require_regular=True, semantics="multiset")
        if not report.ok:
            raise NotRegular("; ".join(report.violations))
    fresh = fresh or FreshNames(_lk_names(pi))
    values = []  # (cuts list, trees list aligned with the node's conclusion)
    stack = [(pi, False)]
    while stack:
        n, done = stack.pop()
        if not done:
            stack.append((n, True))
            for p in reversed(n.premises):
                stack.append((p, False))
            continue
        k = len(n.premises)
        args = values[len(values) - k :] if k else []
        del values[len(values) - k :]
        values.append(_expand_node(n, args, fresh))
    cuts, trees = values.pop()
    return ExpansionProof(tuple(cuts), tuple(trees))


def _expand_node(n, args, fresh):
    conc = n.conclusion
    if n.rule == "init":
        return [], [coerce_weakening(f, fresh) for f in conc]
    if n.rule == "cut":
        a = n.arg
        idx1 = _assign(n.premises[0].conclusion, [a] + list(conc))
        idx2 = _assign(n.premises[1].conclusion, [dual(a)] + list(conc))
        cuts, ctx, t1, t2 = _contract(args[0], idx1[1:], args[1], idx2[1:], fresh.generated)
        return [make_cut(t1[idx1[0]], t2[idx2[0]])] + cuts, ctx
    i = _principal(n)
    f = conc[i]
    rest = _remove_at(conc, i)
    if n.rule == "and":
        idx1 = _assign(n.premises[0].conclusion, [f.left] + list(rest))
        idx2 = _assign(n.premises[1].conclusion, [f.right] + list(rest))
        cuts, ctx, t1, t2 = _contract(args[0], idx1[1:], args[1], idx2[1:], fresh.generated)
        node = AndN(t1[idx1[0]], t2[idx2[0]])
        return cuts, ctx[:i] + [node] + ctx[i:]
    (cuts, trees), = args
    prem = n.premises[0].conclusion
    if n.rule == "or":
        idx = _assign(prem, [f.left, f.right] + list(rest))
        node = OrN(trees[idx[0]], trees[idx[1]])
        ctx = [trees[j] for j in idx[2:]]
    elif n.rule == "forall":
        inst = substitute(f.body, {f.var: Var(n.arg)})
        idx = _assign(prem, [inst] + list(rest))
        node = ForallN(f.var, f.body, n.arg, trees[idx[0]])
        ctx = [trees[j] for j in idx[1:]]
    else:
        inst = substitute(f.body, {f.var: n.arg})
        idx = _assign(prem, [f, inst] + list(rest))
        old = trees[idx[0]]
        node = ExistsN(f.var, f.body, _join_expansions(f.var, old.expansions + ((n.arg, trees[idx[1]]),), fresh.generated))
        ctx = [trees[j] for j in idx[2:]]
    return list(cuts), ctx[:i] + [node] + ctx[i:]


# --------------------------------------------------------- expansion -> LK


def _sequent_of(line: ExpansionProof) -> tuple:
    seen = set()
    out = []
    for f in shallow_sequent(line):
        k = canon(f)
        if k not in seen:
            seen.add(k)
            out.append(f)
    return tuple(out)


@dataclass
class _Plan:
    rule: str
    arg: object
    conclusion: tuple
    sublines: list
    weakenings: list  # formulas to add to each sub-result


def _candidate_key(graph: DependencyGraph, node, line):
    if node.is_cut:
        text = "cut " + str(line.cuts[node.index].formula)
    else:
        text = graph.label(node) + " " + str(line.trees[node.index].sh)
    return (text, node.sort_key())


def _plan(line: ExpansionProof) -> _Plan:
    conc = _sequent_of(line)
    trees = list(line.trees)
    for j, t in enumerate(trees):
        if isinstance(t, OrN):
            new = trees[:j] + [t.left, t.right] + trees[j + 1 :]
            return _Plan("or", None, conc, [ExpansionProof(line.cuts, tuple(new))], [[]])
    for j, t in enumerate(trees):
        if isinstance(t, AndN):
            rest = trees[:j] + trees[j + 1 :]
            subs = [
                ExpansionProof(line.cuts, tuple(rest[:j] + [t.left] + rest[j:])),
                ExpansionProof(line.cuts, tuple(rest[:j] + [t.right] + rest[j:])),
            ]
            return _Plan("and", None, conc, subs, [[], []])
    if not line.cuts and all(isinstance(t, Leaf) for t in trees):
        keys = {canon(f) for f in conc}
        if canon(TRUE) in keys:
            return _Plan("init", TRUE, conc, [], [])
        for f in conc:
            if isinstance(f, Atom) and canon(dual(f)) in keys:
                return _Plan("init", f, conc, [], [])
        raise InvalidInput(f"literal sequent [{', '.join(map(str, conc))}] is not an axiom")
    graph = DependencyGraph(line)
    cands = [
        v
        for v in graph.minimal()
        if v.is_cut or (v.kind == "tree" and len(v.steps) == 1)
    ]
    if not cands:
        raise Stuck("no minimal cut or top-level expansion")
    v = min(cands, key=lambda v: _candidate_key(graph, v, line))
    if v.is_cut:
        key = canon(line.cuts[v.index].formula)
        group = [c for c in line.cuts if canon(c.formula) == key]
        others = tuple(c for c in line.cuts if canon(c.formula) != key)
        left = ExpansionProof(others, tuple(trees) + tuple(c.positive for c in group))
        right = ExpansionProof(others, tuple(c.negative for c in group) + tuple(trees))
        return _Plan("cut", line.cuts[v.index].formula, conc, [left, right], [[], []])
    root = trees[v.index]
    if isinstance(root, ForallN):
        alpha = root.eigen
        new = [t.child if isinstance(t, ForallN) and t.eigen == alpha else t for t in trees]
        return _Plan("forall", alpha, conc, [ExpansionProof(line.cuts, tuple(new))], [[]])
    t = root.expansions[v.steps[0]][0]
    key = canon(root.sh)
    kept, extracted = [], []
    residual = False
    for tree in trees:
        if isinstance(tree, ExistsN) and canon(tree.sh) == key:
            stay = tuple((s, e) for s, e in tree.expansions if s != t)
            extracted.extend(e for s, e in tree.expansions if s == t)
            if stay:
                residual = True
                kept.append(ExistsN(tree.var, tree.matrix, stay))
            continue
        kept.append(tree)
    sub = ExpansionProof(line.cuts, tuple(kept + extracted))
    weak = [] if residual else [root.sh]
    return _Plan("exists", t, conc, [sub], [weak])


def sequentialize(
    p: ExpansionProof, check: bool = True, debug: bool = False, trace: Optional[list] = None
) -> LKProof:
    """An LK proof (set reading) of the shallow sequent of ``p``.

    With ``debug`` every intermediate line is re-checked as an expansion
    proof.  ``trace`` (a list) receives ``(rule, printed line)`` for every
    line visited.
    """
    if check:
        report = check_proof(p)
        if not report.ok:
            raise InvalidInput("; ".join(report.lines()))
    results = []
    stack = [("plan", p)]
    while stack:
        op, item = stack.pop()
        if op == "plan":
            if debug:
                rep = check_proof(item)
                if not rep.ok:
                    raise Stuck("intermediate line is not an expansion proof: " + "; ".join(rep.lines()))
            plan = _plan(item)
            if trace is not None:
                trace.append((plan.rule, show_proof(item)))
            stack.append(("build", plan))
            for sub in reversed(plan.sublines):
                stack.append(("plan", sub))
            continue
        plan = item
        k = len(plan.sublines)
        prems = results[len(results) - k :] if k else []
        del results[len(results) - k :]
        prems = [weaken(q, w) for q, w in zip(prems, plan.weakenings)]
        results.append(LKProof(plan.rule, plan.conclusion, tuple(prems), plan.arg))
    return results.pop()


def end_sequent_set(pi: LKProof) -> set:
    return {canon(f) for f in pi.conclusion}


def end_sequent_multiset(pi: LKProof) -> Counter:
    return _keys(pi.conclusion)
