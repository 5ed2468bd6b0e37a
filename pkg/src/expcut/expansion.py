"""Expansion trees with cuts, and the correctness criterion for expansion proofs."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Union

import networkx as nx

from .logic import (
    And,
    Atom,
    CaptureError,
    Exists,
    Forall,
    Formula,
    NegAtom,
    Or,
    Term,
    Var,
    alpha_canonical,
    dual,
    is_literal,
    is_positive,
    occurs,
    subst_term,
    substitute,
    term_names,
)
from .tautology import DEFAULT_ATOM_LIMIT, ResourceLimit, is_tautology


class ShapeError(ValueError):
    """An expansion tree or cut violates its structural invariant."""


class NotPermitted(ValueError):
    """A substitution maps an eigenvariable to a non-variable term."""


@lru_cache(maxsize=65536)
def canon(f: Formula) -> Formula:
    return alpha_canonical(f)


def same_formula(f: Formula, g: Formula) -> bool:
    return f == g or canon(f) == canon(g)


# ------------------------------------------------------------------ trees


class ExpansionTree:
    __slots__ = ()

    def __str__(self):
        return show_tree(self)


@dataclass(frozen=True)
class Leaf(ExpansionTree):
    literal: Formula

    def __post_init__(self):
        if not is_literal(self.literal):
            raise ShapeError(f"leaf is not a literal: {self.literal}")

    @property
    def sh(self):
        return self.literal


@dataclass(frozen=True)
class AndN(ExpansionTree):
    left: ExpansionTree
    right: ExpansionTree

    @cached_property
    def sh(self):
        return And(self.left.sh, self.right.sh)


@dataclass(frozen=True)
class OrN(ExpansionTree):
    left: ExpansionTree
    right: ExpansionTree

    @cached_property
    def sh(self):
        return Or(self.left.sh, self.right.sh)


@dataclass(frozen=True)
class ExistsN(ExpansionTree):
    var: str
    matrix: Formula
    expansions: tuple  # of (term, tree)

    def __post_init__(self):
        object.__setattr__(self, "expansions", tuple((t, e) for t, e in self.expansions))
        if not self.expansions:
            raise ShapeError(f"existential node ex {self.var} {self.matrix} has no expansions")
        for t, e in self.expansions:
            try:
                want = substitute(self.matrix, {self.var: t})
            except CaptureError as exc:
                raise ShapeError(str(exc)) from exc
            if not same_formula(e.sh, want):
                raise ShapeError(f"instance +[{t}] has shallow formula {e.sh}, expected {want}")

    @cached_property
    def sh(self):
        return Exists(self.var, self.matrix)


@dataclass(frozen=True)
class ForallN(ExpansionTree):
    var: str
    matrix: Formula
    eigen: str
    child: ExpansionTree

    def __post_init__(self):
        try:
            want = substitute(self.matrix, {self.var: Var(self.eigen)})
        except CaptureError as exc:
            raise ShapeError(str(exc)) from exc
        if not same_formula(self.child.sh, want):
            raise ShapeError(
                f"eigenvariable child +[{self.eigen}] has shallow formula {self.child.sh}, expected {want}"
            )

    @cached_property
    def sh(self):
        return Forall(self.var, self.matrix)


Tree = Union[Leaf, AndN, OrN, ExistsN, ForallN]


def children(e: ExpansionTree):
    """Child subtrees with their selector index."""
    if isinstance(e, (AndN, OrN)):
        return [(0, e.left), (1, e.right)]
    if isinstance(e, ExistsN):
        return [(i, c) for i, (_, c) in enumerate(e.expansions)]
    if isinstance(e, ForallN):
        return [(0, e.child)]
    return []


def subtree(e: ExpansionTree, steps) -> ExpansionTree:
    for s in steps:
        e = dict(children(e))[s]
    return e


def shallow(e: ExpansionTree) -> Formula:
    return e.sh


def deep(e: ExpansionTree) -> Formula:
    if isinstance(e, Leaf):
        return e.literal
    if isinstance(e, AndN):
        return And(deep(e.left), deep(e.right))
    if isinstance(e, OrN):
        return Or(deep(e.left), deep(e.right))
    if isinstance(e, ForallN):
        return deep(e.child)
    parts = [deep(c) for _, c in e.expansions]
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def branches(e: ExpansionTree) -> set:
    """Formula branches: tuples of formulas and the markers 1, 2."""
    if isinstance(e, Leaf):
        return {(e.literal,)}
    if isinstance(e, (AndN, OrN)):
        out = set()
        for i, c in ((1, e.left), (2, e.right)):
            out |= {(e.sh, i) + s for s in branches(c)}
        return out
    out = set()
    for _, c in children(e):
        out |= {(e.sh,) + s for s in branches(c)}
    return out


def leaf_count(e: ExpansionTree) -> int:
    if isinstance(e, Leaf):
        return 1
    return sum(leaf_count(c) for _, c in children(e))


def node_count(e: ExpansionTree) -> int:
    return 1 + sum(node_count(c) for _, c in children(e))


def tree_eigenvariables(e: ExpansionTree) -> list:
    out = []
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, ForallN):
            out.append(n.eigen)
        stack.extend(c for _, c in children(n))
    return out


def tree_names(e: ExpansionTree) -> set:
    """Every nullary symbol, binder and eigenvariable name used in ``e``."""
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        out |= _formula_names(n.sh)
        if isinstance(n, ExistsN):
            for t, _ in n.expansions:
                out |= term_names(t)
        elif isinstance(n, ForallN):
            out.add(n.eigen)
        stack.extend(c for _, c in children(n))
    return out


def _formula_names(f):
    out = set(f.free_names)
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Exists, Forall)):
            out.add(g.var)
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
        else:
            for a in g.args:
                out |= term_names(a)
    return out


def apply_substitution_tree(e: ExpansionTree, sigma) -> ExpansionTree:
    """Apply ``sigma`` to every term, formula and eigenvariable of ``e``.

    Eigenvariables may only be renamed to variables; anything else raises
    NotPermitted.  Capture raises CaptureError.
    """
    if not sigma:
        return e
    if isinstance(e, Leaf):
        return Leaf(substitute(e.literal, sigma))
    if isinstance(e, (AndN, OrN)):
        return type(e)(apply_substitution_tree(e.left, sigma), apply_substitution_tree(e.right, sigma))
    q = substitute(e.sh, sigma)
    if isinstance(e, ExistsN):
        return ExistsN(
            q.var,
            q.body,
            tuple((subst_term(t, sigma), apply_substitution_tree(c, sigma)) for t, c in e.expansions),
        )
    eigen = e.eigen
    if eigen in sigma:
        image = sigma[eigen]
        if not isinstance(image, Var):
            raise NotPermitted(f"eigenvariable {eigen} mapped to non-variable {image}")
        eigen = image.name
    return ForallN(q.var, q.body, eigen, apply_substitution_tree(e.child, sigma))


def coerce_weakening(f: Formula, fresh: "FreshNames") -> ExpansionTree:
    """The natural expansion tree of a formula introduced by weakening.

    Existentials are instantiated with their own bound variable; universals
    get a fresh eigenvariable.
    """
    if is_literal(f):
        return Leaf(f)
    if isinstance(f, And):
        return AndN(coerce_weakening(f.left, fresh), coerce_weakening(f.right, fresh))
    if isinstance(f, Or):
        return OrN(coerce_weakening(f.left, fresh), coerce_weakening(f.right, fresh))
    if isinstance(f, Exists):
        return ExistsN(f.var, f.body, ((Var(f.var), coerce_weakening(f.body, fresh)),))
    alpha = fresh.fresh("alpha")
    child = coerce_weakening(substitute(f.body, {f.var: Var(alpha)}), fresh)
    return ForallN(f.var, f.body, alpha, child)


class FreshNames:
    """Deterministic fresh-name supply: ``base_k`` avoiding every used name."""

    def __init__(self, used=()):
        self.used = set(used)
        self.generated = set()
        self.counter = 0

    def fresh(self, base: str) -> str:
        base = re.sub(r"_\d+$", "", base) or "v"
        while True:
            name = f"{base}_{self.counter}"
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                self.generated.add(name)
                return name


# ------------------------------------------------------------------- cuts


@dataclass(frozen=True)
class Cut:
    positive: ExpansionTree
    negative: ExpansionTree

    def __post_init__(self):
        if not is_positive(self.positive.sh):
            raise ShapeError(f"positive side of cut is not positive: {self.positive.sh}")
        if not same_formula(self.positive.sh, dual(self.negative.sh)):
            raise ShapeError(f"cut sides are not dual: {self.positive.sh} / {self.negative.sh}")

    @property
    def formula(self) -> Formula:
        return self.positive.sh

    def sides(self):
        return (self.positive, self.negative)

    def __str__(self):
        return f"cut {show_tree(self.positive)} {show_tree(self.negative)}"


def make_cut(e1: ExpansionTree, e2: ExpansionTree) -> Cut:
    """Build a cut from two dual trees, putting the positive one first."""
    if is_positive(e1.sh):
        return Cut(e1, e2)
    return Cut(e2, e1)


def cut_formula(c: Cut) -> Formula:
    return c.formula


def deep_cut(c: Cut) -> Formula:
    return And(deep(c.positive), deep(c.negative))


def branches_cut(c: Cut) -> set:
    return branches(c.positive) | branches(c.negative)


# ----------------------------------------------------------------- proofs


@dataclass(frozen=True)
class ExpansionProof:
    cuts: tuple = ()
    trees: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        object.__setattr__(self, "trees", tuple(self.trees))

    def __str__(self):
        return show_proof(self)

    @property
    def is_cut_free(self):
        return not self.cuts

    def elements(self):
        """``(kind, index, side, tree)`` for every tree root in the proof."""
        for i, c in enumerate(self.cuts):
            yield "cut", i, 0, c.positive
            yield "cut", i, 1, c.negative
        for j, t in enumerate(self.trees):
            yield "tree", j, None, t


def shallow_sequent(p: ExpansionProof) -> list:
    return [t.sh for t in p.trees]


def deep_sequent(p: ExpansionProof) -> list:
    return [deep(t) for t in p.trees] + [deep_cut(c) for c in p.cuts]


def branches_proof(p: ExpansionProof) -> set:
    out = set()
    for _, _, _, t in p.elements():
        out |= branches(t)
    return out


def proof_node_count(p: ExpansionProof) -> int:
    return sum(node_count(t) for _, _, _, t in p.elements())


def proof_names(p: ExpansionProof) -> set:
    out = set()
    for _, _, _, t in p.elements():
        out |= tree_names(t)
    return out


def apply_substitution_proof(p: ExpansionProof, sigma) -> ExpansionProof:
    return ExpansionProof(
        tuple(
            Cut(apply_substitution_tree(c.positive, sigma), apply_substitution_tree(c.negative, sigma))
            for c in p.cuts
        ),
        tuple(apply_substitution_tree(t, sigma) for t in p.trees),
    )


def canonical_key(p: ExpansionProof):
    """Printed form with element order ignored."""
    return tuple(sorted(str(c) for c in p.cuts)), tuple(sorted(show_tree(t) for t in p.trees))


def same_proof(p: ExpansionProof, q: ExpansionProof) -> bool:
    """Equality modulo permutation of cuts and of trees."""
    return canonical_key(p) == canonical_key(q)


# ------------------------------------------------------------ occurrences


@dataclass(frozen=True)
class NodePath:
    """Position of an expansion or cut occurrence.

    ``kind`` is ``"cut"`` or ``"tree"``, ``index`` the element index, ``side``
    0/1 for the positive/negative tree of a cut (None otherwise).  An
    expansion is addressed by the child selectors leading to its subtree, so
    the last step is the expansion's index at its quantifier node.  A cut
    occurrence has ``side=None`` and no steps.
    """

    kind: str
    index: int
    side: Optional[int] = None
    steps: tuple = ()

    @property
    def is_cut(self):
        return self.kind == "cut" and self.side is None

    def sort_key(self):
        return (self.kind != "cut", self.index, -1 if self.side is None else self.side, self.steps)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        side = "" if self.side is None else ("+" if self.side == 0 else "-")
        return f"{self.kind}{self.index}{side}/" + ".".join(map(str, self.steps))


@dataclass(frozen=True)
class Occurrence:
    path: NodePath
    quantifier: str  # "exists" or "forall"
    node: ExpansionTree  # the quantifier node
    label: object  # term for exists, eigenvariable name for forall
    child: ExpansionTree
    prefix: tuple  # branch elements strictly above the quantifier node


def expansion_occurrences(p: ExpansionProof) -> list:
    out = []
    for kind, index, side, root in p.elements():
        stack = [(root, (), ())]
        while stack:
            node, steps, prefix = stack.pop()
            if isinstance(node, ExistsN):
                for i, (t, c) in enumerate(node.expansions):
                    path = NodePath(kind, index, side, steps + (i,))
                    out.append(Occurrence(path, "exists", node, t, c, prefix))
                    stack.append((c, steps + (i,), prefix + (node.sh,)))
            elif isinstance(node, ForallN):
                path = NodePath(kind, index, side, steps + (0,))
                out.append(Occurrence(path, "forall", node, node.eigen, node.child, prefix))
                stack.append((node.child, steps + (0,), prefix + (node.sh,)))
            elif isinstance(node, (AndN, OrN)):
                stack.append((node.right, steps + (1,), prefix + (node.sh, 2)))
                stack.append((node.left, steps + (0,), prefix + (node.sh, 1)))
    out.sort(key=lambda o: o.path)
    return out


def occurrence_label(occ: Occurrence) -> str:
    return ("∃" if occ.quantifier == "exists" else "∀") + str(occ.label)


# ------------------------------------------------------- dependency graph


class DependencyGraph:
    """Occurrence-level digraph of the immediate dependency relation."""

    def __init__(self, p: ExpansionProof):
        self.proof = p
        self.occurrences = expansion_occurrences(p)
        self.by_path = {o.path: o for o in self.occurrences}
        g = nx.DiGraph()
        for i in range(len(p.cuts)):
            g.add_node(NodePath("cut", i), kind="cut", label=f"cut#{i}")
        for o in self.occurrences:
            g.add_node(o.path, kind=o.quantifier, label=occurrence_label(o))
        self.graph = g
        self._build_edges()
        self._desc = {}

    def _build_edges(self):
        g, p = self.graph, self.proof
        occ = self.occurrences
        # domination and cut membership
        for o in occ:
            s = o.path.steps
            for k in range(1, len(s)):
                anc = NodePath(o.path.kind, o.path.index, o.path.side, s[:k])
                if anc in self.by_path:
                    g.add_edge(anc, o.path, clause=2)
            if o.path.kind == "cut":
                g.add_edge(NodePath("cut", o.path.index), o.path, clause=3)
        # eigenvariables in terms and cut formulas
        exists_by_name = {}
        for o in occ:
            if o.quantifier == "exists":
                for name in term_names(o.label):
                    exists_by_name.setdefault(name, []).append(o.path)
        cut_names = [c.formula.free_names for c in p.cuts]
        for o in occ:
            if o.quantifier != "forall":
                continue
            for w in exists_by_name.get(o.label, ()):
                g.add_edge(o.path, w, clause=1)
            for i, names in enumerate(cut_names):
                if o.label in names:
                    g.add_edge(o.path, NodePath("cut", i), clause=4)

    @property
    def nodes(self):
        return list(self.graph.nodes)

    @property
    def edges(self):
        return list(self.graph.edges)

    def label(self, node) -> str:
        return self.graph.nodes[node]["label"]

    def labelled_edges(self) -> set:
        return {(self.label(u), self.label(v)) for u, v in self.graph.edges}

    def descendants(self, node) -> set:
        d = self._desc.get(node)
        if d is None:
            d = self._desc[node] = nx.descendants(self.graph, node)
        return d

    def less(self, u, v) -> bool:
        """The transitive closure: ``u < v``."""
        return v in self.descendants(u)

    def find_cycle(self):
        try:
            cyc = nx.find_cycle(self.graph)
        except nx.NetworkXNoCycle:
            return None
        return [u for u, _ in cyc]

    def minimal(self):
        return [n for n in self.graph.nodes if self.graph.in_degree(n) == 0]

    def to_dot(self) -> str:
        ids = {n: f"n{k}" for k, n in enumerate(sorted(self.graph.nodes))}
        lines = ["digraph dependency {"]
        for n, nid in ids.items():
            lines.append(f'  {nid} [label="{_dot_escape(self.label(n))}"];')
        for u, v in sorted(self.graph.edges):
            lines.append(f"  {ids[u]} -> {ids[v]} [style=solid];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def dependency_graph(p: ExpansionProof) -> DependencyGraph:
    return DependencyGraph(p)


# --------------------------------------------------------------- checking


@dataclass
class CheckReport:
    weak_regularity: list = field(default_factory=list)
    cycle: Optional[list] = None
    valid: bool = True
    countermodel: Optional[dict] = None
    validity_error: Optional[str] = None
    eigenvariable: list = field(default_factory=list)

    @property
    def ok(self):
        return (
            not self.weak_regularity
            and self.cycle is None
            and self.valid
            and not self.eigenvariable
        )

    def lines(self) -> list:
        out = []
        if self.weak_regularity:
            out.append("weak regularity: FAILED")
            out.extend(f"  {v}" for v in self.weak_regularity)
        else:
            out.append("weak regularity: ok")
        if self.cycle is None:
            out.append("acyclicity: ok")
        else:
            out.append("acyclicity: FAILED")
            out.append("  cycle: " + " < ".join(map(str, self.cycle)))
        if self.valid:
            out.append("validity: ok")
        else:
            out.append("validity: FAILED")
            if self.validity_error:
                out.append(f"  {self.validity_error}")
            if self.countermodel is not None:
                model = ", ".join(
                    f"{a}={'T' if v else 'F'}" for a, v in sorted(self.countermodel.items(), key=lambda kv: str(kv[0]))
                )
                out.append(f"  countermodel: {model}")
        if self.eigenvariable:
            out.append("eigenvariable condition: FAILED")
            out.extend(f"  {v}" for v in self.eigenvariable)
        else:
            out.append("eigenvariable condition: ok")
        return out


@dataclass(frozen=True)
class RegularityViolation:
    eigenvariable: str
    first: NodePath
    second: NodePath
    first_branch: tuple
    second_branch: tuple
    reason: str

    def __str__(self):
        return f"eigenvariable {self.eigenvariable} at {self.first} and {self.second}: {self.reason}"


def _canon_branch(prefix):
    return tuple(canon(x) if isinstance(x, Formula) else x for x in prefix)


def check_weak_regularity(p: ExpansionProof) -> list:
    """Violations of weak regularity; empty when it holds."""
    seen = {}
    out = []
    for o in expansion_occurrences(p):
        if o.quantifier != "forall":
            continue
        kind = "cut" if o.path.kind == "cut" else "tree"
        entry = (o, _canon_branch(o.prefix), canon(o.node.sh), kind)
        first = seen.setdefault(o.label, entry)
        if first is entry:
            continue
        reasons = []
        if first[1] != entry[1]:
            reasons.append("prefixes differ")
        if first[2] != entry[2]:
            reasons.append("quantified formulas differ")
        if first[3] != entry[3]:
            reasons.append("one occurs in a tree, the other in a cut")
        if reasons:
            f0 = first[0]
            out.append(
                RegularityViolation(
                    o.label,
                    f0.path,
                    o.path,
                    f0.prefix + (f0.node.sh, f0.child.sh),
                    o.prefix + (o.node.sh, o.child.sh),
                    "; ".join(reasons),
                )
            )
    return out


def check_acyclicity(p: ExpansionProof, graph: Optional[DependencyGraph] = None):
    """None if the dependency relation is acyclic, else one witness cycle."""
    graph = graph or DependencyGraph(p)
    return graph.find_cycle()


def check_eigenvariable_condition(p: ExpansionProof) -> list:
    end = shallow_sequent(p)
    out = []
    for o in expansion_occurrences(p):
        if o.quantifier == "forall":
            for f in end:
                if occurs(o.label, f):
                    out.append(f"eigenvariable {o.label} of {o.path} occurs in {f}")
                    break
    return out


def check_validity(p: ExpansionProof, max_atoms: int = DEFAULT_ATOM_LIMIT):
    """``(valid, countermodel, error message)`` for the deep sequent."""
    try:
        ok, model = is_tautology(deep_sequent(p), max_atoms=max_atoms)
    except ResourceLimit as exc:
        return False, None, f"resource limit: {exc}"
    return ok, model, None


def check_proof(p: ExpansionProof, max_atoms: int = DEFAULT_ATOM_LIMIT) -> CheckReport:
    valid, model, err = check_validity(p, max_atoms)
    return CheckReport(
        weak_regularity=check_weak_regularity(p),
        cycle=check_acyclicity(p),
        valid=valid,
        countermodel=model,
        validity_error=err,
        eigenvariable=check_eigenvariable_condition(p),
    )


def is_expansion_proof(p: ExpansionProof, max_atoms: int = DEFAULT_ATOM_LIMIT) -> bool:
    return check_proof(p, max_atoms).ok


# --------------------------------------------------------------- printing


def show_tree(e: ExpansionTree) -> str:
    if isinstance(e, Leaf):
        return str(e.literal)
    if isinstance(e, AndN):
        return f"({show_tree(e.left)} & {show_tree(e.right)})"
    if isinstance(e, OrN):
        return f"({show_tree(e.left)} | {show_tree(e.right)})"
    if isinstance(e, ExistsN):
        inst = " ".join(f"+[{t}] {show_tree(c)}" for t, c in e.expansions)
        return f"(ex {e.var} {e.matrix} {inst})"
    return f"(all {e.var} {e.matrix} +[{e.eigen}] {show_tree(e.child)})"


def show_proof(p: ExpansionProof) -> str:
    lines = [str(c) for c in p.cuts] + [f"tree {show_tree(t)}" for t in p.trees]
    return "\n".join(lines) + ("\n" if lines else "")
