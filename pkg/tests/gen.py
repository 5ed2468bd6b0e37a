"""Seeded random generators for property tests.

LK proofs are grown bottom-up from identity proofs.  Every inference keeps
the proof regular: eigenvariables are renamed apart before two proofs are
combined, and a parameter is renamed to a fresh eigenvariable right before
it gets bound by a universal inference.
"""

from __future__ import annotations

import itertools
import random

from expcut.expansion import (
    AndN,
    ExistsN,
    ExpansionProof,
    ForallN,
    Leaf,
    OrN,
    children,
)
from expcut.lk import LKProof, check_lk, eigenvariables, expand
from expcut.logic import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    NegAtom,
    Or,
    Var,
    complexity,
    dual,
    is_literal,
    subst_term,
    substitute,
    subterms,
)

PARAMS = ("p1", "p2", "p3")
CONSTS = ("a", "b")
PREDS = (("P", 1), ("Q", 1), ("R", 2))

_ids = itertools.count()


def fresh(base):
    return f"{base}{next(_ids)}"


# ------------------------------------------------------------- formulas


def gen_term(rng, scope=(), depth=2):
    leaves = [Var(p) for p in PARAMS] + [App(c, ()) for c in CONSTS] + [Var(v) for v in scope] * 2
    if depth <= 0 or rng.random() < 0.6:
        return rng.choice(leaves)
    if rng.random() < 0.6:
        return App("f", (gen_term(rng, scope, depth - 1),))
    return App("g", (gen_term(rng, scope, depth - 1), gen_term(rng, scope, depth - 1)))


def gen_atom(rng, scope=(), term_depth=1):
    pred, arity = rng.choice(PREDS)
    return Atom(pred, tuple(gen_term(rng, scope, term_depth) for _ in range(arity)))


def gen_literal(rng, scope=(), term_depth=1):
    a = gen_atom(rng, scope, term_depth)
    return a if rng.random() < 0.5 else NegAtom(a.pred, a.args)


def gen_formula(rng, depth=3, scope=(), term_depth=1):
    """Random NNF formula with globally unique binder names."""
    if depth <= 0 or rng.random() < 0.25:
        return gen_literal(rng, scope, term_depth)
    r = rng.random()
    if r < 0.5:
        node = And if r < 0.25 else Or
        return node(gen_formula(rng, depth - 1, scope, term_depth), gen_formula(rng, depth - 1, scope, term_depth))
    x = fresh("x")
    for _ in range(8):
        body = gen_formula(rng, depth - 1, scope + (x,), term_depth)
        if x in body.free_names:
            break
    else:
        body = Atom("P", (Var(x),))
    return (Exists if r < 0.75 else Forall)(x, body)


def gen_qf_formula(rng, atoms, depth=3):
    if depth <= 0 or rng.random() < 0.3:
        a = rng.choice(atoms)
        if a.pred in ("true", "false"):
            return a
        return a if rng.random() < 0.5 else NegAtom(a.pred, a.args)
    node = And if rng.random() < 0.5 else Or
    return node(gen_qf_formula(rng, atoms, depth - 1), gen_qf_formula(rng, atoms, depth - 1))


def gen_qf_sequent(rng, max_atoms=12):
    """Random quantifier-free sequent over at most ``max_atoms`` atoms."""
    n = rng.randint(1, max_atoms)
    pool = [Atom(f"A{i}") for i in range(n)]
    if rng.random() < 0.2:
        pool.append(Atom(rng.choice(("true", "false"))))
    size = rng.randint(0, 5)
    return [gen_qf_formula(rng, pool, rng.randint(0, 4)) for _ in range(size)]


# ---------------------------------------------------------------- trees


def gen_tree(rng, f, eigen_pool, depth_terms=1):
    """Random expansion tree of ``f``; eigenvariables are drawn fresh and
    recorded in ``eigen_pool``."""
    if is_literal(f):
        return Leaf(f)
    if isinstance(f, (And, Or)):
        node = AndN if isinstance(f, And) else OrN
        return node(gen_tree(rng, f.left, eigen_pool), gen_tree(rng, f.right, eigen_pool))
    if isinstance(f, Forall):
        e = fresh("e")
        eigen_pool.append(e)
        return ForallN(f.var, f.body, e, gen_tree(rng, substitute(f.body, {f.var: Var(e)}), eigen_pool))
    exps = []
    for _ in range(rng.randint(1, 2)):
        scope = tuple(eigen_pool)
        t = gen_term(rng, scope, depth_terms)
        exps.append((t, gen_tree(rng, substitute(f.body, {f.var: t}), eigen_pool)))
    return ExistsN(f.var, f.body, tuple(exps))


def gen_permitted_substitution(rng, eigens):
    sigma = {}
    for p in PARAMS:
        if rng.random() < 0.5:
            sigma[p] = gen_term(rng, (), 2)
    for e in eigens:
        r = rng.random()
        if r < 0.3:
            sigma[e] = Var(fresh("r"))
        elif r < 0.45 and eigens:
            sigma[e] = Var(rng.choice(eigens))
    return sigma


def tree_depth(e) -> int:
    kids = children(e)
    if not kids:
        return 0
    return 1 + max(tree_depth(c) for _, c in kids)


# ------------------------------------------------------------ LK proofs


def subst_lk(pi: LKProof, sigma) -> LKProof:
    """Apply a substitution (eigenvariables map to variables) to a whole proof."""
    memo = {}
    stack = [(pi, False)]
    while stack:
        n, done = stack.pop()
        if id(n) in memo:
            continue
        if not done:
            stack.append((n, True))
            stack.extend((p, False) for p in n.premises)
            continue
        arg = n.arg
        if n.rule == "forall":
            arg = sigma[arg].name if arg in sigma else arg
        elif n.rule == "exists":
            arg = subst_term(arg, sigma)
        elif arg is not None:
            arg = substitute(arg, sigma)
        memo[id(n)] = LKProof(
            n.rule,
            tuple(substitute(f, sigma) for f in n.conclusion),
            tuple(memo[id(p)] for p in n.premises),
            arg,
        )
    return memo[id(pi)]


def weaken_all(pi: LKProof, formulas) -> LKProof:
    formulas = tuple(formulas)
    if not formulas:
        return pi
    memo = {}
    stack = [(pi, False)]
    while stack:
        n, done = stack.pop()
        if id(n) in memo:
            continue
        if not done:
            stack.append((n, True))
            stack.extend((p, False) for p in n.premises)
            continue
        memo[id(n)] = LKProof(n.rule, n.conclusion + formulas, tuple(memo[id(p)] for p in n.premises), n.arg)
    return memo[id(pi)]


def freshen(pi: LKProof) -> LKProof:
    sigma = {e: Var(fresh("e")) for e in eigenvariables(pi)}
    return subst_lk(pi, sigma) if sigma else pi


def identity_proof(f) -> LKProof:
    """Proof of ``f, dual(f)`` by atomic initial sequents."""
    g = dual(f)
    if isinstance(f, Atom):
        return LKProof("init", (f, g), (), f)
    if isinstance(f, NegAtom):
        return LKProof("init", (f, g), (), g)
    if isinstance(f, (And, Forall)):
        # build the proof for the dual and swap the order of the sequent
        pi = identity_proof(g)
        return _reorder(pi, (f, g))
    if isinstance(f, Or):
        # f = A | B, g = ~A & ~B
        pa = weaken_all(identity_proof(f.left), (f.right,))  # A, ~A, B
        pb = weaken_all(identity_proof(f.right), (f.left,))  # B, ~B, A
        pa = _reorder(pa, (f.left, f.right, g.left))
        pb = _reorder(pb, (f.left, f.right, g.right))
        both = LKProof("and", (f.left, f.right, g), (pa, freshen(pb)))
        return LKProof("or", (f, g), (both,))
    # f = ex x A, g = all x ~A
    e = fresh("e")
    a_inst = substitute(f.body, {f.var: Var(e)})
    inner = weaken_all(identity_proof(a_inst), (f,))  # A[e], ~A[e], ex x A
    inner = _reorder(inner, (f, a_inst, dual(a_inst)))
    ex = LKProof("exists", (f, dual(a_inst)), (inner,), Var(e))
    return LKProof("forall", (f, g), (ex,), e)


def _reorder(pi: LKProof, order) -> LKProof:
    """Same proof with the end-sequent listed in a given order (multiset-equal)."""
    return LKProof(pi.rule, tuple(order), pi.premises, pi.arg)


def _abstract_term(f, t, x):
    """Replace every occurrence of term ``t`` in ``f`` by ``Var(x)``."""
    if isinstance(f, (Atom, NegAtom)):
        return type(f)(f.pred, tuple(_replace_term(a, t, x) for a in f.args))
    if isinstance(f, (And, Or)):
        return type(f)(_abstract_term(f.left, t, x), _abstract_term(f.right, t, x))
    return type(f)(f.var, _abstract_term(f.body, t, x))


def _replace_term(s, t, x):
    if s == t:
        return Var(x)
    if isinstance(s, App) and s.args:
        return App(s.fn, tuple(_replace_term(a, t, x) for a in s.args))
    return s


def _free_terms(f):
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Atom, NegAtom)):
            for a in g.args:
                out.extend(subterms(a))
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
        else:
            stack.append(g.body)
    bound = _binders(f)
    return [t for t in out if not (_term_names(t) & bound)]


def _binders(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (Exists, Forall)):
            out.add(g.var)
            stack.append(g.body)
    return out


def _term_names(t):
    from expcut.logic import term_names

    return set(term_names(t))


class LKGenerator:
    """Random regular LK proofs of bounded height and formula size."""

    def __init__(self, rng, max_height=6, max_complexity=4, max_cuts=6, max_sequent=5):
        self.rng = rng
        self.max_height = max_height
        self.max_complexity = max_complexity
        self.max_cuts = max_cuts
        self.max_sequent = max_sequent

    def seed_proof(self):
        rng = self.rng
        while True:
            f = gen_formula(rng, depth=rng.randint(0, 3), term_depth=1)
            if complexity(f) <= 3:
                pi = identity_proof(f)
                if self.ok(pi):
                    return pi

    def ok(self, pi):
        return (
            pi.height <= self.max_height
            and pi.cut_count <= self.max_cuts
            and len(pi.conclusion) <= self.max_sequent
            and all(complexity(f) <= self.max_complexity for f in pi.conclusion)
        )

    # each operation returns a new proof or None
    def op_or(self, pi):
        c = pi.conclusion
        if len(c) < 2:
            return None
        i, j = self.rng.sample(range(len(c)), 2)
        rest = tuple(f for k, f in enumerate(c) if k not in (i, j))
        return LKProof("or", rest + (Or(c[i], c[j]),), (pi,))

    def op_forall(self, pi):
        c = pi.conclusion
        cands = []
        for i, f in enumerate(c):
            others = [g for k, g in enumerate(c) if k != i]
            for p in PARAMS:
                if p in f.free_names and not any(p in g.free_names for g in others):
                    cands.append((i, p))
        if not cands:
            return None
        i, p = self.rng.choice(cands)
        e = fresh("e")
        pi = subst_lk(pi, {p: Var(e)})
        f = pi.conclusion[i]
        x = fresh("x")
        body = substitute(f, {e: Var(x)})
        rest = pi.conclusion[:i] + pi.conclusion[i + 1 :]
        return LKProof("forall", rest + (Forall(x, body),), (pi,), e)

    def op_exists(self, pi):
        c = pi.conclusion
        i = self.rng.randrange(len(c))
        f = c[i]
        terms = _free_terms(f)
        if not terms:
            return None
        t = self.rng.choice(terms)
        x = fresh("x")
        body = _abstract_term(f, t, x)
        if x not in body.free_names or substitute(body, {x: t}) != f:
            return None
        ex = Exists(x, body)
        rest = c[:i] + c[i + 1 :]
        premise = weaken_all(pi, (ex,))
        return LKProof("exists", rest + (ex,), (premise,), t)

    def op_and(self, p1, p2):
        p1, p2 = freshen(p1), freshen(p2)
        c1, c2 = p1.conclusion, p2.conclusion
        i = self.rng.randrange(len(c1))
        j = self.rng.randrange(len(c2))
        g1 = c1[:i] + c1[i + 1 :]
        g2 = c2[:j] + c2[j + 1 :]
        left = _reorder(weaken_all(p1, g2), g1 + g2 + (c1[i],))
        right = _reorder(weaken_all(p2, g1), g1 + g2 + (c2[j],))
        return LKProof("and", g1 + g2 + (And(c1[i], c2[j]),), (left, right))

    def op_cut(self, p1, p2):
        """Cut between proofs of ``Γ1, A`` and ``Γ2, ~A`` if such a pair exists."""
        p1, p2 = freshen(p1), freshen(p2)
        from expcut.expansion import canon

        pairs = [
            (i, j)
            for i, f in enumerate(p1.conclusion)
            for j, g in enumerate(p2.conclusion)
            if canon(dual(f)) == canon(g)
        ]
        if not pairs:
            return None
        i, j = self.rng.choice(pairs)
        a = p1.conclusion[i]
        g1 = p1.conclusion[:i] + p1.conclusion[i + 1 :]
        g2 = p2.conclusion[:j] + p2.conclusion[j + 1 :]
        gamma = g1 + g2
        left = _reorder(weaken_all(p1, g2), gamma + (a,))
        right = _reorder(weaken_all(p2, g1), (dual(a),) + gamma)
        right = LKProof(right.rule, (p2.conclusion[j],) + gamma, right.premises, right.arg)
        return LKProof("cut", gamma, (left, right), a)

    def lemma(self, pi):
        """A proof of ``~A, A'`` grown from the identity on a conclusion formula A."""
        rng = self.rng
        cands = [f for f in pi.conclusion if complexity(f) <= 3]
        if not cands:
            return None
        a = max(rng.sample(cands, min(2, len(cands))), key=complexity)
        q = identity_proof(dual(a))  # ~A, A
        for _ in range(rng.randint(0, 2)):
            op = rng.choice((self.op_exists, self.op_forall))
            r = op(q)
            if r is not None and self.ok(r) and any(f == dual(a) for f in r.conclusion):
                q = r
        return q

    def generate(self, steps=None, want_cuts=0):
        rng = self.rng
        pool = [self.seed_proof() for _ in range(3)]
        steps = steps if steps is not None else rng.randint(3, 14)
        for _ in range(steps):
            r = rng.random()
            new = None
            if r < 0.15:
                new = self.op_or(rng.choice(pool))
            elif r < 0.3:
                new = self.op_forall(rng.choice(pool))
            elif r < 0.45:
                new = self.op_exists(rng.choice(pool))
            elif r < 0.6:
                new = self.op_and(rng.choice(pool), rng.choice(pool))
            elif r < 0.9:
                base = rng.choice(pool[-4:])
                lem = self.lemma(base)
                if lem is not None:
                    new = self.op_cut(base, lem)
            else:
                pool.append(self.seed_proof())
            if new is not None and self.ok(new):
                pool.append(new)
        best = [p for p in pool if p.cut_count >= want_cuts] or pool
        pi = rng.choice(best[-3:])
        return freshen(pi)


def gen_lk(rng, **kw) -> LKProof:
    g = LKGenerator(rng, **{k: v for k, v in kw.items() if k in ("max_height", "max_complexity", "max_cuts", "max_sequent")})
    return g.generate(want_cuts=kw.get("want_cuts", 0))


def proof_depth(p: ExpansionProof) -> int:
    return max([tree_depth(t) for _, _, _, t in p.elements()] or [0])


def expansion_corpus(seed, count, max_depth=4, max_cuts=6, min_cuts=1, max_height=7):
    """Valid expansion proofs with cuts, read off random LK proofs."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > count * 200:
            raise RuntimeError("corpus generation is not converging")
        pi = gen_lk(rng, max_height=max_height, max_cuts=max_cuts, want_cuts=1)
        if not check_lk(pi, require_regular=True).ok:
            raise AssertionError("generator produced an incorrect LK proof:\n" + str(pi))
        p = expand(pi)
        if len(p.cuts) < min_cuts or len(p.cuts) > max_cuts or proof_depth(p) > max_depth:
            continue
        out.append(p)
    return out
