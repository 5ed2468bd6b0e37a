"""Expansion proofs with cut for classical first-order logic."""

from .cutelim import (
    CutClass,
    Measure,
    ReductionStep,
    ReductionTrace,
    cut_classes,
    dedup,
    find_maximal_class,
    measure,
    normalize,
    prefer,
    rank,
    reduce_atomic,
    reduce_propositional,
    reduce_quantifier,
)
from .expansion import (
    AndN,
    Cut,
    DependencyGraph,
    ExistsN,
    ExpansionProof,
    ForallN,
    FreshNames,
    Leaf,
    NodePath,
    OrN,
    apply_substitution_tree,
    branches,
    check_proof,
    coerce_weakening,
    deep,
    deep_sequent,
    make_cut,
    shallow,
    shallow_sequent,
)
from .lk import LKProof, check_lk, expand, sequentialize
from .logic import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    NegAtom,
    Or,
    Var,
    alpha_canonical,
    alpha_equal,
    complexity,
    dual,
    free_variables,
    substitute,
)
from .syntax import (
    ParseError,
    parse_expansion_proof,
    parse_formula,
    parse_lk_proof,
    print_expansion_proof,
    print_formula,
    print_lk_proof,
)
from .tautology import is_tautology
