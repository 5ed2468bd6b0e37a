import random

import pytest
from hypothesis import given, settings, strategies as st

from expcut.expansion import ExistsN, Leaf, ShapeError, same_proof
from expcut.lk import LKProof
from expcut.logic import App, Atom, Exists, NegAtom, Or, Var
from expcut.syntax import (
    ParseError,
    parse_expansion_proof,
    parse_formula,
    parse_lk_proof,
    parse_term,
    parse_tree,
    print_expansion_proof,
    print_formula,
    print_lk_proof,
    print_tree,
    tokenize,
)

from conftest import read
from gen import LKGenerator, gen_formula, gen_tree


def test_parse_disjunction_with_quantifier():
    f = parse_formula("~P(a) | ex z Q(z)")
    assert f == Or(NegAtom("P", (App("a"),)), Exists("z", Atom("Q", (Var("z"),))))


def test_parse_quantifier_nesting():
    f = parse_formula("all x ex y (~P(x) | Q(f(y)))")
    assert f.var == "x" and f.body.var == "y"
    assert isinstance(f.body.body, Or)


def test_unclosed_atom_reports_offset():
    with pytest.raises(ParseError) as info:
        parse_formula("P(")
    assert info.value.span.byte_start == 2
    assert "end of input" in str(info.value)


def test_parse_error_message_is_reproducible():
    msgs = set()
    for _ in range(3):
        with pytest.raises(ParseError) as info:
            parse_formula("P(a) & & Q")
        msgs.add(str(info.value))
    assert len(msgs) == 1


def test_byte_offsets_count_utf8():
    with pytest.raises(ParseError) as info:
        parse_formula("# é\nP(a) )")
    # "# é\n" is five bytes, "P(a) " five more
    assert info.value.span.byte_start == 10


def test_negation_only_on_atoms():
    with pytest.raises(ParseError):
        parse_formula("~(P(a) | Q(a))")


def test_vacuous_quantifier_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_formula("ex x P(a)")


def test_single_leaf_proof():
    p = parse_expansion_proof("tree P(a)")
    assert p.cuts == () and p.trees == (Leaf(Atom("P", (App("a"),))),)


def test_example_round_trip(example):
    text = print_expansion_proof(example)
    assert parse_expansion_proof(text) == example
    assert print_expansion_proof(parse_expansion_proof(text)) == text


def test_shape_error_on_wrong_instance():
    with pytest.raises(ShapeError):
        parse_tree("(ex x P(x) +[a] P(b))")


def test_comments_and_whitespace(example):
    assert parse_expansion_proof("# c\n" + read("example.exp").replace("\n", "\n\n")) == example


def test_binder_names_become_variables():
    e = parse_tree("(all x P(x) +[alpha] P(alpha))")
    assert isinstance(e.child.literal.args[0], Var)
    assert isinstance(parse_term("alpha"), App)


def test_lk_initial_sequent():
    pi = parse_lk_proof("(init P(a) [P(a), ~P(a)])")
    assert pi.rule == "init" and pi.premises == ()


def test_lk_disjunction_over_initial():
    pi = parse_lk_proof("(or [(P(a) | ~P(a))] (init P(a) [P(a), ~P(a)]))")
    assert pi.rule == "or" and len(list(pi.nodes())) == 2
    assert parse_lk_proof(print_lk_proof(pi)) == pi


def test_lk_bad_rule_name():
    with pytest.raises(ParseError):
        parse_lk_proof("(weaken [P(a)])")


def test_lk_example_round_trip(example_lk):
    text = print_lk_proof(example_lk)
    assert parse_lk_proof(text) == example_lk
    assert print_lk_proof(parse_lk_proof(text)) == text


@given(st.integers(0, 2**32))
@settings(max_examples=200, deadline=None)
def test_formula_round_trip(seed):
    f = gen_formula(random.Random(seed))
    assert parse_formula(print_formula(f)) == f


@given(st.integers(0, 2**32))
@settings(max_examples=200, deadline=None)
def test_tree_round_trip(seed):
    rng = random.Random(seed)
    e = gen_tree(rng, gen_formula(rng), [])
    text = print_tree(e)
    assert print_tree(parse_tree(text)) == text


@given(st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_lk_round_trip(seed):
    pi = LKGenerator(random.Random(seed)).generate()
    assert isinstance(pi, LKProof)
    text = print_lk_proof(pi)
    assert print_lk_proof(parse_lk_proof(text)) == text


def test_tokenizer_spans():
    toks = tokenize("P(a)")
    assert [t.text for t in toks[:-1]] == ["P", "(", "a", ")"]
    assert all(t.span.byte_start <= t.span.byte_end for t in toks)


def test_printed_proof_is_stable(example):
    once = print_expansion_proof(example)
    assert once == print_expansion_proof(parse_expansion_proof(once))
    assert same_proof(example, parse_expansion_proof(once))


def test_exists_node_needs_an_instance():
    with pytest.raises(ParseError):
        parse_tree("(ex x P(x))")
    assert isinstance(parse_tree("(ex x P(x) +[x] P(x))"), ExistsN)
