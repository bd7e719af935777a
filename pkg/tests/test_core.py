import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from bifib.core import (
    Atom,
    LDiv,
    LMult,
    Pull,
    Push,
    RMult,
    all_derivations,
    cartesian_lift,
    collapse,
    counit,
    cut,
    format_derivation,
    format_formula,
    identity,
    is_strictly_alternating,
    parse_derivation,
    parse_formula,
    permeq_class,
    permeq_classes,
    permeq_decide_bfs,
    permeq_neighbors,
    push_run,
    push_seq,
    pull_run,
    strictify,
    unit,
)
from bifib.errors import BudgetExceeded, IllFormed, NonComposable
from bifib.examples import ordinal_formula, seed
from bifib.suite import FREE_GRAPHS, free_signature, random_derivation, random_formula

SIGS = [free_signature(e) for e in FREE_GRAPHS]
seeds = st.integers(0, 2**32 - 1)
slow = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def test_push_and_pull_check_their_base_objects():
    sig = free_signature({"a": ("x", "y")})
    a = sig.base.gen("a")
    x, y = sig.atom("x"), sig.atom("y")
    assert Push(a, x).ref == "y"
    assert Pull(a, y).ref == "x"
    with pytest.raises(IllFormed):
        Push(a, y)
    with pytest.raises(IllFormed):
        Pull(a, x)


def test_runs_are_innermost_first():
    sig = free_signature({"a": ("x", "y"), "b": ("y", "z")})
    a, b = sig.base.gen("a"), sig.base.gen("b")
    s = push_seq([a, b], sig.atom("x"))
    assert s == Push(b, Push(a, sig.atom("x")))
    assert push_run(s) == ((a, b), sig.atom("x"))
    assert pull_run(s) == ((), s)


def test_strict_alternation():
    s = seed("p2")
    assert is_strictly_alternating(ordinal_formula(3, s))
    f = s.base.between(0, 1)
    idc = s.base.identity(1)
    assert not is_strictly_alternating(Push(idc, Push(f, s.atom())))


def test_derivation_judgments_follow_the_rules():
    s = seed("p2")
    f = s.base.between(0, 1)
    x = s.atom()
    lift = cartesian_lift("push", f, x)
    assert (lift.judgment.lhs, lift.judgment.base, lift.judgment.rhs) == (x, f, Push(f, x))
    with pytest.raises(IllFormed):
        LDiv(f, f, identity(x))


def test_cut_rejects_mismatched_formulas():
    s = seed("p2")
    f = s.base.between(0, 1)
    x = s.atom()
    with pytest.raises(NonComposable):
        cut(identity(x), identity(Push(f, x)))


def test_identity_on_ordinals_is_alone_in_its_homset():
    s = seed("p2")
    o = ordinal_formula(1, s)
    ds = all_derivations(o, s.base.identity(0), o)
    assert identity(o) in ds
    assert len(permeq_classes(ds)) == 1


def test_unit_and_counit_have_the_expected_types():
    s = seed("p2")
    f = s.base.between(0, 1)
    x = s.atom()
    u = unit(f, x)
    assert u.judgment.rhs == Pull(f, Push(f, x))
    c = counit(f, x_over_1 := Push(f, x))
    assert c.judgment.lhs == Push(f, Pull(f, x_over_1))


@slow
@given(seeds)
def test_identity_is_neutral_for_cut(n):
    rng = random.Random(n)
    sig = SIGS[n % len(SIGS)]
    d = random_derivation(rng, sig)
    j = d.judgment
    assert permeq_decide_bfs(cut(identity(j.lhs), d), d)
    assert permeq_decide_bfs(cut(d, identity(j.rhs)), d)


@slow
@given(seeds)
def test_permutation_neighbors_keep_the_judgment(n):
    rng = random.Random(n)
    d = random_derivation(rng, SIGS[n % len(SIGS)])
    for e in permeq_neighbors(d):
        assert e.judgment == d.judgment
        assert d in permeq_neighbors(e)


@slow
@given(seeds)
def test_strictify_gives_inverse_isomorphisms(n):
    rng = random.Random(n)
    sig = SIGS[n % len(SIGS)]
    s = random_formula(rng, sig, 4)
    flat, theta, theta_inv = strictify(s)
    assert is_strictly_alternating(flat) or isinstance(flat, Atom) or _has_identity_step(flat)
    assert permeq_decide_bfs(cut(theta, theta_inv), identity(s))
    assert permeq_decide_bfs(cut(theta_inv, theta), identity(flat))


def _has_identity_step(s):
    while not isinstance(s, Atom):
        if s.arrow.is_identity:
            return True
        s = s.body
    return False


@slow
@given(seeds)
def test_collapse_keeps_the_base_arrow(n):
    rng = random.Random(n)
    d = random_derivation(rng, SIGS[n % len(SIGS)])
    c = collapse(d)
    assert c.judgment.base == d.judgment.base
    assert c.judgment.lhs == strictify(d.judgment.lhs)[0]
    assert c.judgment.rhs == strictify(d.judgment.rhs)[0]


@slow
@given(seeds)
def test_formulas_and_derivations_print_and_parse(n):
    rng = random.Random(n)
    sig = SIGS[n % len(SIGS)]
    d = random_derivation(rng, sig)
    assert parse_derivation(format_derivation(d), sig) == d
    s = d.judgment.lhs
    assert parse_formula(format_formula(s), sig) == s


def test_parse_errors_are_ill_formed():
    sig = SIGS[0]
    for text in ["(atom x", "(push a)", "(frob a (atom x))", "(atom x) extra", ")"]:
        with pytest.raises(IllFormed):
            parse_formula(text, sig)


def test_permutation_class_respects_budget(loop_sig):
    a, b = loop_sig.base.gen("a"), loop_sig.base.gen("b")
    x = loop_sig.atom("x")
    first = LMult(a, RMult(identity(x), b))
    second = RMult(LMult(a, identity(x)), b)
    assert permeq_class(first) == {first, second}
    assert permeq_decide_bfs(first, second)
    with pytest.raises(BudgetExceeded):
        permeq_class(first, node_budget=1)


def test_two_sequentializations_are_equivalent():
    # the left push and right push of X |- push f X can be introduced in either order
    s = seed("p2")
    f = s.base.between(0, 1)
    x = s.atom()
    a = LDiv(f, s.base.identity(1), RMult(identity(x), f))
    assert a == identity(Push(f, x))
    both = all_derivations(Push(f, x), s.base.identity(1), Push(f, x))
    assert all(permeq_decide_bfs(a, b) for b in both)
