"""Cut reduction on expansion proofs and a weakly normalizing driver.

Cuts are grouped into classes by their (alpha-canonical) cut formula and a
class is always reduced as a whole.  The default strategy picks a maximal
class: highest rank, and no member below another cut of that rank in the
dependency order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .expansion import (
    Cut,
    DependencyGraph,
    ExistsN,
    ExpansionProof,
    ForallN,
    FreshNames,
    NodePath,
    OrN,
    AndN,
    apply_substitution_proof,
    apply_substitution_tree,
    canon,
    check_proof,
    expansion_occurrences,
    make_cut,
    proof_names,
    show_proof,
    show_tree,
)
from .logic import Exists, Formula, Or, Var, complexity, is_literal


class PreconditionViolated(ValueError):
    """A reduction step was applied to a proof outside its domain."""


class NoMaximalClass(RuntimeError):
    """No maximal cut class; only possible for cyclic dependency relations."""


class MaxStepsExceeded(RuntimeError):
    """Normalization did not finish within the step budget."""


class VerificationFailed(RuntimeError):
    """A reduction step produced something that is not an expansion proof."""


# ------------------------------------------------------------ cut classes


def rank(c: Cut) -> int:
    return complexity(c.formula)


@dataclass(frozen=True)
class CutClass:
    formula: Formula  # alpha-canonical cut formula (positive side)
    members: tuple  # cut indices, ascending
    rank: int

    @property
    def kind(self) -> str:
        if isinstance(self.formula, Exists):
            return "quantifier"
        if isinstance(self.formula, Or):
            return "propositional"
        return "atomic"

    def __str__(self):
        return f"{self.formula}  (rank {self.rank}, {len(self.members)} cut(s))"


def cut_classes(p: ExpansionProof) -> list:
    groups = {}
    for i, c in enumerate(p.cuts):
        groups.setdefault(canon(c.formula), []).append(i)
    out = [CutClass(f, tuple(m), complexity(f)) for f, m in groups.items()]
    out.sort(key=lambda c: str(c.formula))
    return out


def find_class(p: ExpansionProof, formula: Formula) -> Optional[CutClass]:
    key = canon(formula)
    for c in cut_classes(p):
        if c.formula == key:
            return c
    return None


def find_maximal_class(p: ExpansionProof, graph: Optional[DependencyGraph] = None) -> CutClass:
    classes = cut_classes(p)
    if not classes:
        raise NoMaximalClass("proof has no cuts")
    r = max(c.rank for c in classes)
    top = [c for c in classes if c.rank == r]
    # a lone class is maximal; an atomic cut has no occurrences, hence no
    # outgoing edges, so it lies below nothing
    if len(top) == 1 or r == 0:
        return top[0]
    graph = graph or DependencyGraph(p)
    for cls in top:
        others = {NodePath("cut", i) for o in top if o is not cls for i in o.members}
        below = set()
        for i in cls.members:
            below |= graph.descendants(NodePath("cut", i))
        if not below & others:
            return cls
    raise NoMaximalClass("every class of maximal rank lies below another")


@dataclass(frozen=True, order=True)
class Measure:
    r: int
    k: int

    def as_list(self):
        return [self.r, self.k]


def measure(p: ExpansionProof) -> Measure:
    classes = cut_classes(p)
    if not classes:
        raise ValueError("a cut-free proof has no measure")
    r = max(c.rank for c in classes)
    return Measure(r, sum(1 for c in classes if c.rank == r))


# --------------------------------------------------------------- steps


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "quantifier", "propositional" or "atomic"
    class_formula: str
    terms: tuple = ()
    eigenvariables: tuple = ()
    renamed: tuple = ()
    before: str = ""
    after: str = ""

    def to_dict(self):
        return {
            "kind": self.kind,
            "classFormula": self.class_formula,
            "terms": list(self.terms),
            "eigenvariables": list(self.eigenvariables),
            "renamed": list(self.renamed),
            "before": self.before,
            "after": self.after,
        }


def _context(p: ExpansionProof, members) -> ExpansionProof:
    ms = set(members)
    return ExpansionProof(tuple(c for i, c in enumerate(p.cuts) if i not in ms), p.trees)


def _members(p: ExpansionProof, cls: Union[CutClass, Formula]):
    if isinstance(cls, CutClass):
        return cls, list(cls.members)
    found = find_class(p, cls)
    if found is None:
        raise PreconditionViolated(f"no cut on {cls}")
    return found, list(found.members)


def renamed_eigenvariables(p: ExpansionProof, members, graph: Optional[DependencyGraph] = None) -> list:
    """Eigenvariables of the context and of the universal sides of the class
    that lie above some universal root of the class in the dependency order."""
    graph = graph or DependencyGraph(p)
    ms = set(members)
    found = set()
    for i in ms:
        root = NodePath("cut", i, 1, (0,))
        for d in graph.descendants(root):
            occ = graph.by_path.get(d)
            if occ is None or occ.quantifier != "forall":
                continue
            path = occ.path
            in_context = not (path.kind == "cut" and path.index in ms)
            in_negative = path.kind == "cut" and path.index in ms and path.side == 1
            if in_context or in_negative:
                found.add(occ.label)
    return sorted(found)


def reduce_quantifier(
    p: ExpansionProof,
    cls: Union[CutClass, Formula],
    fresh: Optional[FreshNames] = None,
    info: Optional[dict] = None,
) -> ExpansionProof:
    """Replace all cuts of an existential class by cuts on the instances."""
    cls, members = _members(p, cls)
    fresh = fresh or FreshNames(proof_names(p))
    pairs, alphas, negs = [], [], []
    for i in members:
        c = p.cuts[i]
        if not (isinstance(c.positive, ExistsN) and isinstance(c.negative, ForallN)):
            raise PreconditionViolated(f"cut {i} is not an existential/universal pair")
        pairs.extend(c.positive.expansions)
        alphas.append(c.negative.eigen)
        negs.append(c.negative.child)
    context = _context(p, members)
    alpha_set = set(alphas)
    for occ in expansion_occurrences(context):
        if occ.quantifier == "forall" and occ.label in alpha_set:
            raise PreconditionViolated(f"eigenvariable {occ.label} of the class also occurs at {occ.path}")
    graph = DependencyGraph(p)
    renamed = renamed_eigenvariables(p, members, graph)
    new_cuts = []
    copies = []
    for t, e in pairs:
        eta = {b: Var(fresh.fresh(b)) for b in renamed}
        sigma = {a: t for a in alphas}
        for f in negs:
            g = apply_substitution_tree(apply_substitution_tree(f, eta), sigma)
            new_cuts.append(make_cut(e, g))
        copies.append(apply_substitution_proof(apply_substitution_proof(context, eta), sigma))
    cuts = new_cuts + list(context.cuts)
    trees = list(context.trees)
    for q in copies:
        cuts.extend(q.cuts)
        trees.extend(q.trees)
    if info is not None:
        info.update(terms=tuple(str(t) for t, _ in pairs), eigenvariables=tuple(alphas), renamed=tuple(renamed))
    return ExpansionProof(tuple(cuts), tuple(trees))


def reduce_propositional(p: ExpansionProof, cls: Union[CutClass, Formula]) -> ExpansionProof:
    """Split every cut of a disjunctive class into two cuts on the parts."""
    cls, members = _members(p, cls)
    ms = set(members)
    cuts = []
    for i, c in enumerate(p.cuts):
        if i not in ms:
            cuts.append(c)
            continue
        if not (isinstance(c.positive, OrN) and isinstance(c.negative, AndN)):
            raise PreconditionViolated(f"cut {i} is not a disjunction/conjunction pair")
        cuts.append(make_cut(c.positive.left, c.negative.left))
        cuts.append(make_cut(c.positive.right, c.negative.right))
    return ExpansionProof(tuple(cuts), p.trees)


def reduce_atomic(p: ExpansionProof, index: int) -> ExpansionProof:
    """Remove an atomic cut."""
    if not 0 <= index < len(p.cuts):
        raise PreconditionViolated(f"no cut with index {index}")
    c = p.cuts[index]
    if not is_literal(c.positive.sh):
        raise PreconditionViolated(f"cut {index} on {c.formula} is not atomic")
    return ExpansionProof(p.cuts[:index] + p.cuts[index + 1 :], p.trees)


# -------------------------------------------------------------- driver


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    final: Optional[ExpansionProof] = None
    measures: list = field(default_factory=list)

    @property
    def step_count(self):
        return len(self.steps)

    def to_dict(self):
        return {
            "steps": [s.to_dict() for s in self.steps],
            "finalProof": show_proof(self.final) if self.final is not None else None,
            "measures": [m.as_list() for m in self.measures],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, **kw)


def dedup(p: ExpansionProof) -> ExpansionProof:
    """Drop cuts and trees that print identically to an earlier one."""
    seen, cuts = set(), []
    for c in p.cuts:
        k = str(c)
        if k not in seen:
            seen.add(k)
            cuts.append(c)
    seen, trees = set(), []
    for t in p.trees:
        k = show_tree(t)
        if k not in seen:
            seen.add(k)
            trees.append(t)
    return ExpansionProof(tuple(cuts), tuple(trees))


Strategy = Union[str, Callable]


def maximal(p: ExpansionProof, classes: list) -> CutClass:
    return find_maximal_class(p)


def prefer(*formulas) -> Callable:
    """Strategy reducing the given cut formulas first (in order), then maximal."""
    keys = [canon(f) for f in formulas]

    def choose(p, classes):
        for k in keys:
            for c in classes:
                if c.formula == k:
                    return c
        return find_maximal_class(p)

    return choose


def _select(strategy, p, classes) -> CutClass:
    if strategy == "maximal" or strategy is None:
        return find_maximal_class(p)
    if callable(strategy):
        got = strategy(p, classes)
        if isinstance(got, int):
            return classes[got]
        if isinstance(got, Formula):
            found = find_class(p, got)
            if found is None:
                raise PreconditionViolated(f"strategy chose a formula without cuts: {got}")
            return found
        return got
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize(
    p: ExpansionProof,
    strategy: Strategy = "maximal",
    verify_each_step: bool = False,
    dedup_each_step: bool = False,
    max_steps: int = 10000,
    fresh: Optional[FreshNames] = None,
    snapshots: bool = True,
    on_step: Optional[Callable] = None,
):
    """Reduce cuts until none is left.  Returns ``(proof, trace)``.

    One macro step reduces one class; an atomic class is removed one cut at
    a time, each removal recorded as its own step.  ``measures`` holds the
    measure before every macro step.  ``on_step(step, before, after)`` is
    called after every step.
    """
    fresh = fresh or FreshNames(proof_names(p))
    trace = ReductionTrace()
    count = 0

    def record(kind, cls, before, after, info=None):
        info = info or {}
        trace.steps.append(
            ReductionStep(
                kind,
                str(cls.formula),
                info.get("terms", ()),
                info.get("eigenvariables", ()),
                info.get("renamed", ()),
                show_proof(before) if snapshots else "",
                show_proof(after) if snapshots else "",
            )
        )
        if on_step is not None:
            on_step(trace.steps[-1], before, after)
        if verify_each_step:
            report = check_proof(after)
            if not report.ok:
                raise VerificationFailed(f"after {kind} step on {cls.formula}: " + "; ".join(report.lines()))

    while p.cuts:
        classes = cut_classes(p)
        trace.measures.append(measure(p))
        cls = _select(strategy, p, classes)
        if cls.kind == "atomic":
            removed = 0
            for i in cls.members:
                if count >= max_steps:
                    raise MaxStepsExceeded(f"gave up after {count} steps")
                before = p
                p = reduce_atomic(p, i - removed)
                removed += 1
                count += 1
                record("atomic", cls, before, p)
        else:
            if count >= max_steps:
                raise MaxStepsExceeded(f"gave up after {count} steps")
            before = p
            info = {}
            if cls.kind == "quantifier":
                p = reduce_quantifier(p, cls, fresh, info)
            else:
                p = reduce_propositional(p, cls)
            count += 1
            record(cls.kind, cls, before, p, info)
        if dedup_each_step:
            p = dedup(p)
    trace.final = p
    return p, trace
