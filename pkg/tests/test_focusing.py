import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from bifib.base import ALL, FunctorDef, SimplexCat
from bifib.core import (
    LDiv,
    LMult,
    Push,
    RMult,
    Signature,
    all_derivations,
    cut,
    identity,
    permeq_classes,
    permeq_decide_bfs,
)
from bifib.errors import FPViolation, NotFP, NotStrictlyAlternating
from bifib.examples import ordinal_formula, seed
from bifib.focusing import (
    MDiv,
    bipole_kinds,
    ceil,
    entails,
    floor,
    format_multi,
    invseq,
    is_maximal,
    max_search,
    mf_cut,
    mf_identity,
    multi_of,
    nf_of,
    normalize,
    normalize_trace,
    pack,
    redexes,
    rewrite_step,
    sequentialize,
    strengthen,
    to_derivation,
    unpack,
    weak_identity,
    weak_of,
    weak_preimage,
    weight,
)
from bifib.suite import FREE_GRAPHS, free_signature, random_derivation

SIGS = [free_signature(e) for e in FREE_GRAPHS]
seeds = st.integers(0, 2**32 - 1)
slow = settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def draw(n: int):
    return random_derivation(random.Random(n), SIGS[n % len(SIGS)])


def test_weak_identity_lifts_to_identity():
    s = ordinal_formula(2, seed("p2"))
    w = weak_identity(s)
    assert permeq_decide_bfs(ceil(w), identity(s))
    assert ceil(w).judgment == floor(w).judgment


def test_weak_preimage_needs_alternating_formulas():
    s = seed("p2")
    f = s.base.between(0, 1)
    x = Push(s.base.identity(1), Push(f, s.atom()))
    with pytest.raises(NotStrictlyAlternating):
        weak_preimage(identity(x))


@slow
@given(seeds)
def test_weak_preimage_is_faithful(n):
    d = draw(n)
    assert permeq_decide_bfs(ceil(weak_of(d)), d)


@slow
@given(seeds)
def test_unpack_and_pack_are_inverse(n):
    m = multi_of(draw(n))
    assert pack(unpack(m)) == m
    assert len(bipole_kinds(m)) == len(unpack(m).bipoles)


@slow
@given(seeds)
def test_rewrites_lower_the_weight(n):
    m = multi_of(draw(n))
    while redexes(m):
        for rule, pos in redexes(m):
            assert weight(rewrite_step(m, rule, pos)) < weight(m)
        m = rewrite_step(m, *redexes(m)[0])
    assert is_maximal(m)


@slow
@given(seeds)
def test_strategies_reach_the_same_normal_form(n):
    m = multi_of(draw(n))
    a, steps_a = normalize_trace(m, "bottom-up")
    b, steps_b = normalize_trace(m, "top-down")
    assert a == b
    assert is_maximal(a)
    assert normalize(a) == a


@slow
@given(seeds)
def test_split_then_parallelize_restores_a_bipole(n):
    m = nf_of(draw(n))
    for pos, kind in enumerate(bipole_kinds(m)):
        if kind == "LR":
            split = rewrite_step(m, "seqRL", pos)
            assert bipole_kinds(split)[pos:pos + 2] == ["L", "R"]
            assert rewrite_step(split, "parRL", pos) == m
            split = rewrite_step(m, "seqLR", pos)
            assert rewrite_step(split, "parLR", pos) == m


@slow
@given(seeds)
def test_sequentializations_round_trip(n):
    d = draw(n)
    m = multi_of(d)
    assert permeq_decide_bfs(ceil(invseq(m)), d)
    for w in sequentialize(m, "inv"):
        assert strengthen(w) == m
    nf = normalize(m)
    for x in sequentialize(nf, "foc"):
        assert "LR" not in bipole_kinds(x)
        assert normalize(x) == nf


@slow
@given(seeds)
def test_normal_forms_decide_equivalence(n):
    d = draw(n)
    j = d.judgment
    for e in all_derivations(j.lhs, j.base, j.rhs)[:6]:
        assert (nf_of(d) == nf_of(e)) == permeq_decide_bfs(d, e)


@slow
@given(seeds)
def test_search_finds_one_proof_per_class(n):
    d = draw(n)
    j = d.judgment
    found = list(max_search(j.lhs, j.base, j.rhs))
    assert len(set(found)) == len(found)
    assert all(is_maximal(m) for m in found)
    assert nf_of(d) in found
    assert len(found) == len(permeq_classes(all_derivations(j.lhs, j.base, j.rhs)))
    assert all(to_derivation(m).judgment == j for m in found)


@slow
@given(seeds)
def test_multifocused_cut_matches_plain_cut(n):
    rng = random.Random(n)
    sig = SIGS[n % len(SIGS)]
    a = random_derivation(rng, sig)
    b = random_derivation(rng, sig, 4, lhs=a.judgment.rhs, tries=20)
    assert mf_cut(nf_of(a), nf_of(b)) == nf_of(cut(a, b))
    assert mf_cut(mf_identity(a.judgment.lhs), nf_of(a)) == nf_of(a)


def test_simplex_homsets_from_search():
    s = seed("p2")
    found = list(max_search(ordinal_formula(2, s), s.base.identity(0), ordinal_formula(2, s)))
    assert len(found) == 3
    assert all(isinstance(m, MDiv) for m in found)
    assert entails(ordinal_formula(1, s), s.base.identity(0), ordinal_formula(3, s))
    assert not entails(ordinal_formula(1, s), s.base.identity(0), ordinal_formula(0, s))


def _two_filler_proof():
    c = SimplexCat(3)
    sig = Signature(FunctorDef.identity(c), ALL, ALL)
    m, tau = c.map([0], 2), c.map([0, 0], 1)
    d = LMult(c.map([1], 2), LDiv(m, tau, RMult(sig.ax(m), tau)))
    return sig, multi_of(d)


def test_search_refuses_bases_without_unique_fillers():
    sig, m = _two_filler_proof()
    j = to_derivation(m).judgment
    with pytest.raises(NotFP):
        list(max_search(j.lhs, j.base, j.rhs, sig=sig))


def test_rewrite_reports_ambiguous_fillers():
    _, m = _two_filler_proof()
    assert bipole_kinds(m) == ["L", "R"]
    with pytest.raises(FPViolation):
        rewrite_step(m, "parRL", 0, fp=True)
    merged = rewrite_step(m, "parRL", 0, fp=False)
    assert bipole_kinds(merged) == ["LR"]


def test_unknown_rule_and_strategy():
    m = multi_of(identity(ordinal_formula(1, seed("p2"))))
    with pytest.raises(ValueError):
        rewrite_step(m, "frob", 0)
    with pytest.raises(ValueError):
        normalize_trace(m, "sideways")


def test_format_multi_names_the_node_kinds():
    s = seed("p2")
    text = format_multi(nf_of(identity(ordinal_formula(1, s))))
    assert text.startswith("(rdiv ")
    assert "(atom id@*)" in text
