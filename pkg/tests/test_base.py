import itertools

import pytest
from hypothesis import given, strategies as st

from bifib.base import (
    DiscreteNat,
    FinPoset,
    FreeCat,
    FunctorDef,
    MonoidNat,
    Point,
    SimplexCat,
    fillers,
    le_fact,
    parse_presentation,
)
from bifib.errors import IllFormed, NonComposable, SquareNotCommuting


def test_free_category_composition_concatenates_words():
    c = FreeCat({"a": ("x", "y"), "b": ("y", "z")})
    ab = c.gen("a").then(c.gen("b"))
    assert ab == c.word(["a", "b"])
    assert str(ab) == "a.b"
    assert c.identity("x").then(c.gen("a")) == c.gen("a")


def test_free_category_rejects_mismatched_composition():
    c = FreeCat({"a": ("x", "y")})
    with pytest.raises(NonComposable):
        c.gen("a").then(c.gen("a"))


def test_paths_enumerates_by_length():
    c = FreeCat({"a": ("x", "x")})
    assert [len(p.payload) for p in c.paths("x", "x", 3)] == [0, 1, 2, 3]


def test_fillers_in_free_category_are_unique():
    c = FreeCat({"a": ("x", "x"), "b": ("x", "x")})
    a, b = c.gen("a"), c.gen("b")
    # square a.(b.a) = (a.b).a has the filler b
    assert fillers(a, a.then(b), b.then(a), a) == [b]
    assert le_fact(a, b.then(a), a.then(b), a)
    # a.b.a = a.(b.a), but a.b is longer than a, so nothing fills the square
    assert not le_fact(a.then(b), a, a, b.then(a))


def test_fillers_reject_non_commuting_square():
    c = FreeCat({"a": ("x", "x"), "b": ("x", "x")})
    a, b = c.gen("a"), c.gen("b")
    with pytest.raises(SquareNotCommuting):
        c.fillers(a, b, a, a)


def test_poset_has_thin_homsets():
    p = FinPoset.chain(3, {(0, 1): "f", (1, 2): "g"})
    assert p.leq(0, 2) and not p.leq(2, 0)
    assert p.between(0, 1).then(p.between(1, 2)) == p.between(0, 2)
    assert str(p.between(0, 1)) == "f"
    assert p.parse_arrow("g") == p.between(1, 2)
    assert p.parse_arrow("0<=2") == p.between(0, 2)
    with pytest.raises(IllFormed):
        p.between(2, 1)


@pytest.mark.parametrize("m,n", [(0, 1), (2, 2), (3, 2), (2, 4)])
def test_simplex_homs_are_monotone_maps(m, n):
    c = SimplexCat(5)
    maps = c.hom(m, n)
    assert len(maps) == len(list(itertools.combinations_with_replacement(range(n), m)))
    assert all(list(a.payload) == sorted(a.payload) for a in maps)


def test_simplicial_identities():
    c = SimplexCat(5)
    for n in range(1, 4):
        for i in range(n + 1):
            for j in range(i + 1, n + 2):
                # delta_i then delta_j equals delta_{j-1} then delta_i
                assert c.delta(i, n).then(c.delta(j, n + 1)) == c.delta(j - 1, n).then(c.delta(i, n + 1))
        for i in range(n):
            assert c.delta(i, n).then(c.sigma(i, n)) == c.identity(n)
            assert c.delta(i + 1, n).then(c.sigma(i, n)) == c.identity(n)


def test_simplex_classes_split_epi_and_mono():
    c = SimplexCat(4)
    cls = c.classes()
    assert cls["epi"](c.sigma(0, 2)) and not cls["mono"](c.sigma(0, 2))
    assert cls["mono"](c.delta(1, 2)) and not cls["epi"](c.delta(1, 2))
    assert c.is_fp("epi", "mono")


@given(st.integers(0, 4), st.integers(1, 4), st.data())
def test_simplex_arrows_print_and_parse(m, n, data):
    c = SimplexCat(5)
    a = data.draw(st.sampled_from(c.hom(m, n)))
    assert c.parse_arrow(str(a)) == a


def test_monoid_of_naturals_adds():
    c = MonoidNat()
    assert c.n(2).then(c.n(3)) == c.n(5)
    assert c.left_divisors(c.n(2), c.n(5)) == [c.n(3)]
    assert c.left_divisors(c.n(6), c.n(5)) == []
    with pytest.raises(IllFormed):
        c.n(-1)


def test_discrete_categories():
    pt = Point()
    assert pt.objects() == ("*",)
    assert pt.hom("*", "*") == [pt.identity("*")]
    d = DiscreteNat(3)
    assert d.hom(1, 2) == []
    assert d.parse_object("2") == 2


def test_functor_lifts():
    base = FinPoset.chain(2)
    dom = FinPoset(["X", "Y"], [("X", "Y")])
    place = {"X": 0, "Y": 1}
    p = FunctorDef(dom, base, place.__getitem__, lambda a: base.between(place[a.dom], place[a.cod]))
    assert p.lifts("X", "Y", base.between(0, 1)) == [dom.between("X", "Y")]
    const = FunctorDef.constant(Point(), base, 0)
    assert const.lifts("*", "*", base.identity(0)) == [Point().identity("*")]
    assert FunctorDef.identity(base).lifts(0, 1, base.between(0, 1)) == [base.between(0, 1)]


def test_parse_presentation_builtin_and_free():
    assert isinstance(parse_presentation("simplex 3"), SimplexCat)
    assert isinstance(parse_presentation("monoid-nat"), MonoidNat)
    free = parse_presentation("objects: x y\narrow a : x -> y\narrow b : y -> y  # loop\n")
    assert isinstance(free, FreeCat)
    assert free.gen("a").then(free.gen("b")).cod == "y"
    poset = parse_presentation("poset\nobjects: x y z\narrow f : x -> y\narrow g : y -> z\n")
    assert poset.leq("x", "z")
    with pytest.raises(IllFormed):
        parse_presentation("objects: x\nnonsense line\n")
