import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from bifib.core import Pull, Push, all_derivations, cut, identity, permeq_classes
from bifib.errors import IllFormed, NotAWalk, TargetDivisionFailed
from bifib.examples import (
    TREE_S,
    TREE_T,
    OrdinalTarget,
    PlaneTree,
    ambisimplex_formulas,
    ambisimplex_labels,
    catalan,
    chi,
    collapse_formula,
    displacement,
    double_factorial,
    encode_tree,
    forest_of_formula,
    forest_to_json,
    formula_of_walk,
    interpret,
    interpret_formula,
    is_noncrossing,
    kreweras_intervals,
    monotone_oracle,
    non_dyck_example,
    noncrossing_of,
    noncrossing_partitions,
    ordinal_formula,
    partition_from_json,
    partition_of_formula,
    partition_to_json,
    refines,
    seed,
    set_partitions,
    tree_from_json,
    tree_morphism_oracle,
    tree_morphism_oracle_all,
    tree_of_formula,
    tree_of_walk,
    tree_to_json,
    walk_heights,
    walk_of_tree,
)
from bifib.focusing import max_search, to_derivation


def test_seed_names():
    assert seed("p2").name == "p2"
    assert seed("pomega(3)").base is not None
    assert seed("pomega", 3).sig.is_fp()
    assert not seed("bnat").base.locally_finite
    with pytest.raises(IllFormed):
        seed("nope")


@pytest.mark.parametrize("m,n,count", [(2, 2, 3), (0, 1, 1), (3, 2, 4), (1, 0, 0)])
def test_monotone_oracle(m, n, count):
    maps = monotone_oracle(m, n)
    assert len(maps) == count
    assert all(list(t) == sorted(t) for t in maps)


def test_ordinal_interpretation():
    t = OrdinalTarget()
    s = seed("p2")
    for n in range(4):
        assert interpret_formula(ordinal_formula(n, s), t).size == n


def _p2_proofs(m, n):
    s = seed("p2")
    return [to_derivation(p) for p in
            max_search(ordinal_formula(m, s), s.base.identity(0), ordinal_formula(n, s))]


def test_interpretation_respects_cut():
    t = OrdinalTarget()
    for a, b in itertools.product(_p2_proofs(2, 1), _p2_proofs(1, 3)):
        assert interpret(cut(a, b), t) == t.compose(interpret(a, t), interpret(b, t))
    x = ordinal_formula(2)
    assert interpret(identity(x), t) == t.identity(interpret_formula(x, t))


class _NoDivisions(OrdinalTarget):
    def ldiv(self, f, g, alpha, src, tgt):
        return None


def test_missing_division_is_reported():
    d = _p2_proofs(1, 1)[0]
    with pytest.raises(TargetDivisionFailed):
        interpret(d, _NoDivisions())


def test_tree_example_walk_and_zigzag():
    # right-to-left traversal of the eight-vertex tree, read from the atom outward
    assert walk_of_tree(TREE_T) == [1, 1, -1, -1, 1, -1, 1, 1, -1, 1, 1, -1, -1, -1]
    assert TREE_T.size == 8
    s = seed("pomega(3)")
    z = collapse_formula(encode_tree(TREE_T, s))
    # the zigzag 0 -> 3 <- 1 -> 2 <- 0 -> 1 <- 0 -> 2 <- 0, read outermost first
    assert _peaks(z)[::-1] == [0, 3, 1, 2, 0, 1, 0, 2, 0]


def _peaks(s):
    """Turning points of a strictly alternating formula over the chain, from the atom outward."""
    steps = []
    while not hasattr(s, "obj"):
        steps.append(s)
        s = s.body
    heights = [0]
    for step in reversed(steps):
        heights.append(step.arrow.cod if isinstance(step, Push) else step.arrow.dom)
    return heights


def test_eleven_tree_morphisms():
    s = seed("pomega(3)")
    a, b = encode_tree(TREE_S, s), encode_tree(TREE_T, s)
    assert tree_of_formula(a) == TREE_S and tree_of_formula(b) == TREE_T
    proofs = list(max_search(a, s.base.identity(0), b))
    assert len(proofs) == 11
    images = {tree_morphism_oracle(to_derivation(p)).maps for p in proofs}
    assert images == set(tree_morphism_oracle_all(TREE_S, TREE_T))


nested = st.recursive(st.just([]), lambda kids: st.lists(kids, max_size=3), max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(nested)
def test_walks_encode_trees(tree):
    t = PlaneTree.from_nested(tree)
    steps = walk_of_tree(t)
    assert sum(steps) == 0
    assert tree_of_walk(steps) == t
    assert tree_from_json(tree_to_json(t)) == t
    if t.height:
        assert tree_of_formula(encode_tree(t)) == t


def test_marked_trees():
    t = tree_of_walk([1, 1, -1])
    assert (t.height, t.mark) == (2, 1)
    assert tree_of_walk(walk_of_tree(t)) == t


@pytest.mark.parametrize("steps", [[-1], [1, -1, -1, 1]])
def test_walks_below_the_root(steps):
    with pytest.raises(NotAWalk):
        tree_of_walk(steps)
    with pytest.raises(NotAWalk):
        formula_of_walk(steps, seed("pomega(3)"))


def test_displacement_over_the_naturals():
    b = seed("bnat")
    one = b.base.n(1)
    x = b.atom()
    for step in [1, -1, -1, 1, 1, 1, -1]:
        x = Push(one, x) if step > 0 else Pull(one, x)
    assert displacement(x) == 1
    assert walk_heights(x) == [0, 1, 0, -1, 0, 1, 2, 1]


def test_non_dyck_morphism():
    d = non_dyck_example()
    j = d.judgment
    assert walk_heights(j.lhs) == [0, 1, -1, 2, 1]
    assert min(walk_heights(j.lhs)) < 0
    assert displacement(j.lhs) == displacement(j.rhs) == 1
    assert j.base == seed("bnat").base.n(0)


def test_forest_counts():
    assert forest_of_formula(next(ambisimplex_formulas(0))).nodes() == []
    assert double_factorial(5) == 945 == sum(1 for _ in ambisimplex_formulas(5))


@pytest.mark.parametrize("n", range(5))
def test_ambisimplicial_formula_counts(n):
    formulas = list(ambisimplex_formulas(n))
    assert len(formulas) == double_factorial(n)
    assert all(chi(f) == n for f in formulas)


def test_seven_closed_classes_of_three_leaves():
    labels = ambisimplex_labels()
    classes = {collapse_formula(f) for f in ambisimplex_formulas(3)}
    assert classes == set(labels.values())
    assert partition_of_formula(labels["A"]) == ((0,), (1,), (2,))
    assert partition_of_formula(labels["E"]) == ((0, 1, 2),)


def test_forests_follow_formulas():
    for n in range(1, 5):
        for f in ambisimplex_formulas(n):
            forest = forest_of_formula(f)
            assert noncrossing_of(forest) == partition_of_formula(f)
            assert is_noncrossing(noncrossing_of(forest))
            nodes = forest.nodes()
            assert len({x.label for x in nodes}) == len(nodes)
            for node in nodes:
                assert all(c.label > node.label for c in node.children if not isinstance(c, int))
            data = json.loads(forest_to_json(forest))
            assert data["leaves"] == n and not data["open"]


@pytest.mark.parametrize("n", range(7))
def test_noncrossing_partition_counts(n):
    assert len(noncrossing_partitions(n)) == catalan(n)
    bell = [1, 1, 2, 5, 15, 52, 203]
    assert len(list(set_partitions(n))) == bell[n]


def test_kreweras_counts_refinement_intervals():
    for n in range(5):
        ps = noncrossing_partitions(n)
        assert sum(refines(p, q) for p in ps for q in ps) == kreweras_intervals(n)


def test_partition_codec():
    p = ((0, 3), (1, 2))
    assert partition_from_json(partition_to_json(p)) == p
    with pytest.raises(IllFormed):
        partition_from_json("[[0, 2], [1, 3]]")


def test_ambisimplicial_homsets_are_thin():
    s = seed("ambisimplex", 3)
    formulas = sorted({collapse_formula(f) for f in ambisimplex_formulas(3)}, key=str)
    idc = s.base.identity(0)
    for a, b in itertools.product(formulas, repeat=2):
        assert len(permeq_classes(all_derivations(a, idc, b))) <= 1
