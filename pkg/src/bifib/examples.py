"""Concrete free bifibrations, their semantic models, and brute-force oracles.

The seeds are:

* ``p2``: the point over the arrow category ``0 -> 1``.  The fiber over
  ``0`` is the simplex category.
* ``pomega(k)``: the point over the chain ``0 < 1 < ... < k``.  The fiber over
  ``0`` is plane trees of height at most ``k``.
* ``bnat``: the point over the additive monoid of naturals.  Its formulas are
  walks with a net displacement.
* ``ambisimplex(k)``: the naturals, as a discrete category, over the simplex
  category.  Pushes go along degeneracies and pulls along faces.

Targets implement :class:`CleavedTarget`.  ``interpret`` sends any plain
derivation to a target morphism by structural recursion.  Its results are
compared against oracles that enumerate target morphisms directly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

from .base import Arrow, Category, DiscreteNat, FinPoset, FunctorDef, MonoidNat, Point, SimplexCat
from .core import (
    Atom,
    Ax,
    Derivation,
    Formula,
    LDiv,
    LMult,
    Pull,
    Push,
    RDiv,
    RMult,
    Signature,
    strictify,
)
from .errors import IllFormed, NotAWalk, TargetDivisionFailed

# ---------------------------------------------------------------------------
# seeds


@dataclass(frozen=True)
class Seed:
    name: str
    sig: Signature

    @property
    def base(self) -> Category:
        return self.sig.base

    def atom(self, x=None) -> Atom:
        if x is None:
            x = self.sig.domain.objects()[0]
        return self.sig.atom(x)


def _point_over(base: Category, obj) -> FunctorDef:
    return FunctorDef.constant(Point(), base, obj)


def seed(name: str, k: int | None = None) -> Seed:
    """Build a named seed; ``name`` may also carry the bound, as in ``"pomega(3)"``."""
    if "(" in name:
        name, arg = name.rstrip(")").split("(")
        k = int(arg)
    if name == "p2":
        base = FinPoset.chain(2, {(0, 1): "f"})
        return Seed("p2", Signature(_point_over(base, 0), name="p2"))
    if name == "pomega":
        k = 4 if k is None else k
        base = FinPoset.chain(k + 1, {(i, i + 1): f"f{i}" for i in range(k)})
        return Seed(f"pomega({k})", Signature(_point_over(base, 0), name="pomega"))
    if name == "bnat":
        base = MonoidNat()
        return Seed("bnat", Signature(_point_over(base, MonoidNat.OBJ), name="bnat"))
    if name == "ambisimplex":
        k = 4 if k is None else k
        base = SimplexCat(k)
        p = FunctorDef(DiscreteNat(k), base, lambda n: n, lambda a: base.identity(a.dom))
        classes = base.classes()
        return Seed(f"ambisimplex({k})", Signature(p, classes["epi"], classes["mono"], name="ambisimplex"))
    raise IllFormed(f"unknown seed {name!r}")


# ---------------------------------------------------------------------------
# generic interpretation


class CleavedTarget:
    """A category over the same base with chosen liftings and divisions.

    Morphisms are opaque values handled only through the methods below.
    ``ldiv`` and ``rdiv`` return ``None`` when no morphism factors as asked.
    """

    def atom(self, x) -> Any:
        raise NotImplementedError

    def push(self, f: Arrow, obj) -> Any:
        raise NotImplementedError

    def pull(self, g: Arrow, obj) -> Any:
        raise NotImplementedError

    def axiom(self, delta: Arrow, src, tgt) -> Any:
        raise NotImplementedError

    def opcart(self, f: Arrow, obj) -> Any:
        raise NotImplementedError

    def cart(self, g: Arrow, obj) -> Any:
        raise NotImplementedError

    def ldiv(self, f: Arrow, g: Arrow, alpha, src, tgt) -> Any | None:
        """The unique ``beta : push(f, src) -> tgt`` over ``g`` with ``opcart . beta = alpha``."""
        raise NotImplementedError

    def rdiv(self, alpha, f: Arrow, g: Arrow, src, tgt) -> Any | None:
        """The unique ``beta : src -> pull(g, tgt)`` over ``f`` with ``beta . cart = alpha``."""
        raise NotImplementedError

    def compose(self, a, b) -> Any:
        raise NotImplementedError

    def identity(self, obj) -> Any:
        raise NotImplementedError


def interpret_formula(s: Formula, t: CleavedTarget) -> Any:
    if isinstance(s, Atom):
        return t.atom(s.obj)
    inner = interpret_formula(s.body, t)
    return t.push(s.arrow, inner) if isinstance(s, Push) else t.pull(s.arrow, inner)


def interpret(d: Derivation, t: CleavedTarget) -> Any:
    """The target morphism denoted by ``d``."""
    j = d.judgment
    if isinstance(d, Ax):
        return t.axiom(d.delta, t.atom(j.lhs.obj), t.atom(j.rhs.obj))
    if isinstance(d, RMult):
        return t.compose(interpret(d.body, t), t.opcart(d.f, interpret_formula(d.body.judgment.rhs, t)))
    if isinstance(d, LMult):
        return t.compose(t.cart(d.g, interpret_formula(d.body.judgment.lhs, t)), interpret(d.body, t))
    alpha = interpret(d.body, t)
    if isinstance(d, LDiv):
        beta = t.ldiv(d.f, d.g, alpha, interpret_formula(d.body.judgment.lhs, t), interpret_formula(j.rhs, t))
    else:
        beta = t.rdiv(alpha, d.f, d.g, interpret_formula(j.lhs, t), interpret_formula(d.body.judgment.rhs, t))
    if beta is None:
        raise TargetDivisionFailed(f"{type(d).__name__} has no solution in the target")
    return beta


# ---------------------------------------------------------------------------
# ordinals: the target for p2


@dataclass(frozen=True)
class Ord:
    """``n`` over ``0`` is the ordinal ``{0..n-1}``; over ``1`` it is ``{bot, 0..n-1}``."""

    n: int
    base: int

    @property
    def size(self) -> int:
        return self.n + self.base


@dataclass(frozen=True)
class OrdMap:
    src: Ord
    tgt: Ord
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.src.size or any(not 0 <= y < self.tgt.size for y in self.images):
            raise IllFormed(f"{self.images} is not a map {self.src} -> {self.tgt}")
        if any(a > b for a, b in zip(self.images, self.images[1:])):
            raise IllFormed(f"{self.images} is not monotone")


class OrdinalTarget(CleavedTarget):
    """Ordinals over ``0`` and pointed ordinals over ``1``.

    Pushing along ``f`` adds a bottom element.  Pulling along ``f`` forgets
    that the bottom is special.
    """

    def atom(self, x) -> Ord:
        return Ord(0, 0)

    def push(self, f, obj):
        return obj if f.is_identity else Ord(obj.n, 1)

    def pull(self, g, obj):
        return obj if g.is_identity else Ord(obj.n + 1, 0)

    def axiom(self, delta, src, tgt):
        return OrdMap(src, tgt, ())

    def identity(self, obj):
        return OrdMap(obj, obj, tuple(range(obj.size)))

    def compose(self, a, b):
        if a.tgt != b.src:
            raise IllFormed("ordinal maps do not compose")
        return OrdMap(a.src, b.tgt, tuple(b.images[x] for x in a.images))

    def opcart(self, f, obj):
        if f.is_identity:
            return self.identity(obj)
        return OrdMap(obj, Ord(obj.n, 1), tuple(x + 1 for x in range(obj.n)))

    def cart(self, g, obj):
        if g.is_identity:
            return self.identity(obj)
        return OrdMap(Ord(obj.n + 1, 0), obj, tuple(range(obj.size)))

    def ldiv(self, f, g, alpha, src, tgt):
        if f.is_identity:
            return alpha
        # beta sends the new bottom to the bottom of tgt, which lies over 1
        return OrdMap(Ord(src.n, 1), tgt, (0,) + alpha.images)

    def rdiv(self, alpha, f, g, src, tgt):
        return OrdMap(src, self.pull(g, tgt), alpha.images)


def ordinal_formula(n: int, s: Seed | None = None) -> Formula:
    """``(pull f push f)^n *`` over ``0``."""
    s = s or seed("p2")
    f = s.base.between(0, 1)
    out: Formula = s.atom()
    for _ in range(n):
        out = Pull(f, Push(f, out))
    return out


def monotone_oracle(m: int, n: int) -> list[tuple[int, ...]]:
    """Every weakly increasing map ``{0..m-1} -> {0..n-1}``, as an image tuple."""
    return list(itertools.combinations_with_replacement(range(n), m))


# ---------------------------------------------------------------------------
# plane trees: the target for pomega


@dataclass(frozen=True)
class PlaneTree:
    """A rooted plane tree with a marked vertex on its leftmost branch.

    ``levels[i]`` lists, for each vertex of height ``i + 1`` from left to
    right, the index of its parent at height ``i``.  The root is implicit.
    ``mark`` is the height of the marked vertex, which is always vertex 0 of
    its level.
    """

    levels: tuple[tuple[int, ...], ...] = ()
    mark: int = 0

    def __post_init__(self):
        levels = tuple(tuple(lv) for lv in self.levels)
        while levels and not levels[-1]:
            levels = levels[:-1]
        object.__setattr__(self, "levels", levels)
        width = 1
        for lv in levels:
            if any(not 0 <= p < width for p in lv) or any(a > b for a, b in zip(lv, lv[1:])):
                raise IllFormed(f"bad parent list {lv}")
            width = len(lv)
        for i in range(self.mark):
            if i >= len(levels) or levels[i][0] != 0:
                raise IllFormed(f"mark at height {self.mark} is not on the leftmost branch")

    def width(self, i: int) -> int:
        if i == 0:
            return 1
        return len(self.levels[i - 1]) if i - 1 < len(self.levels) else 0

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def size(self) -> int:
        return 1 + sum(len(lv) for lv in self.levels)

    def parent(self, i: int, x: int) -> int:
        return self.levels[i - 1][x]

    def children(self, i: int, x: int) -> list[int]:
        if i >= len(self.levels):
            return []
        return [y for y, p in enumerate(self.levels[i]) if p == x]

    def grow(self, j: int, k: int) -> "PlaneTree":
        """Add a fresh leftmost chain from the mark at height ``j`` up to height ``k``."""
        levels = [list(lv) for lv in self.levels]
        while len(levels) < k + 1:
            levels.append([])
        for i in range(j + 1, k + 1):
            shifted = [p + 1 for p in levels[i - 1]] if i > j + 1 else list(levels[i - 1])
            levels[i - 1] = [0] + shifted
        if k + 1 <= len(levels) and k > j:
            levels[k] = [p + 1 for p in levels[k]]
        return PlaneTree(tuple(map(tuple, levels)), k)

    def lower(self, j: int) -> "PlaneTree":
        return PlaneTree(self.levels, j)

    def to_nested(self) -> list:
        """Nested-list form: a vertex is the list of its children."""
        def build(i: int, x: int) -> list:
            return [build(i + 1, y) for y in self.children(i, x)]
        return build(0, 0)

    @classmethod
    def from_nested(cls, tree: list, mark: int = 0) -> "PlaneTree":
        levels: list[list[int]] = []
        # breadth-first numbering keeps siblings and cousins in plane order
        frontier = [(tree, 0)]
        depth = 0
        while frontier:
            nxt = []
            for node, idx in frontier:
                for child in node:
                    while len(levels) <= depth:
                        levels.append([])
                    levels[depth].append(idx)
                    nxt.append((child, len(levels[depth]) - 1))
            frontier = nxt
            depth += 1
        return cls(tuple(map(tuple, levels)), mark)


@dataclass(frozen=True)
class TreeMap:
    """A natural transformation between plane trees, one monotone map per height above 0."""

    src: PlaneTree
    tgt: PlaneTree
    maps: tuple[tuple[int, ...], ...]


class TreeTarget(CleavedTarget):
    """Marked plane trees.  Pushing along ``j -> k`` grows a leftmost chain; pulling lowers the mark."""

    def atom(self, x) -> PlaneTree:
        return PlaneTree((), 0)

    def push(self, f, obj):
        return obj.grow(f.dom, f.cod)

    def pull(self, g, obj):
        return obj.lower(g.dom)

    def identity(self, obj):
        return TreeMap(obj, obj, tuple(tuple(range(len(lv))) for lv in obj.levels))

    def axiom(self, delta, src, tgt):
        return self.identity(src)

    def compose(self, a, b):
        if a.tgt != b.src:
            raise IllFormed("tree maps do not compose")
        return TreeMap(a.src, b.tgt, tuple(tuple(mb[x] for x in ma) for ma, mb in zip(a.maps, b.maps + ((),) * len(a.maps))))

    def opcart(self, f, obj):
        j, k = f.dom, f.cod
        tgt = obj.grow(j, k)
        maps = []
        for i in range(1, obj.height + 1):
            shift = 1 if j < i <= k else 0
            maps.append(tuple(x + shift for x in range(obj.width(i))))
        return TreeMap(obj, tgt, tuple(maps))

    def cart(self, g, obj):
        src = obj.lower(g.dom)
        return TreeMap(src, obj, self.identity(obj).maps)

    def ldiv(self, f, g, alpha, src, tgt):
        j, k = f.dom, f.cod
        grown = src.grow(j, k)
        maps = []
        for i in range(1, grown.height + 1):
            old = alpha.maps[i - 1] if i - 1 < len(alpha.maps) else ()
            maps.append((0,) + old if j < i <= k else old)
        return TreeMap(grown, tgt, tuple(maps))

    def rdiv(self, alpha, f, g, src, tgt):
        return TreeMap(src, tgt.lower(g.dom), alpha.maps)


def is_tree_morphism(m: TreeMap) -> bool:
    """Monotone at every height, natural for the parent maps, and mark preserving."""
    s, t = m.src, m.tgt
    if len(m.maps) != s.height:
        return False
    for i in range(1, s.height + 1):
        mp = m.maps[i - 1]
        if len(mp) != s.width(i) or any(not 0 <= y < t.width(i) for y in mp):
            return False
        if any(a > b for a, b in zip(mp, mp[1:])):
            return False
        below = m.maps[i - 2] if i >= 2 else None
        for x, y in enumerate(mp):
            px = s.parent(i, x)
            image_parent = below[px] if below is not None else 0
            if t.parent(i, y) != image_parent:
                return False
    if s.mark > t.mark:
        return False
    return s.mark == 0 or m.maps[s.mark - 1][0] == 0


def tree_morphism_oracle_all(s: PlaneTree, t: PlaneTree) -> list[tuple[tuple[int, ...], ...]]:
    """Every natural transformation ``s -> t`` preserving the mark, by level-wise search."""
    out: list[tuple[tuple[int, ...], ...]] = []
    if s.mark > t.mark:
        return out

    def rec(i: int, acc: tuple) -> None:
        if i > s.height:
            out.append(acc)
            return
        below = acc[-1] if acc else None
        options = []
        for x in range(s.width(i)):
            px = s.parent(i, x)
            want = below[px] if below is not None else 0
            options.append(t.children(i - 1, want))
        for choice in itertools.product(*options):
            if any(a > b for a, b in zip(choice, choice[1:])):
                continue
            if i == s.mark and choice and choice[0] != 0:
                continue
            rec(i + 1, acc + (tuple(choice),))

    rec(1, ())
    return out


def tree_of_formula(s: Formula) -> PlaneTree:
    """The marked plane tree a formula over the chain describes."""
    return interpret_formula(s, TreeTarget())


def tree_morphism_oracle(d: Derivation) -> TreeMap:
    """The natural transformation a derivation denotes, checked for naturality."""
    m = interpret(d, TreeTarget())
    if not is_tree_morphism(m):
        raise IllFormed("interpretation is not a morphism of plane trees")
    return m


def walk_of_tree(t: PlaneTree) -> list[int]:
    """Right-to-left depth-first walk from the root, stopping at the mark: ``+1`` up, ``-1`` down."""
    steps: list[int] = []

    def visit(i: int, x: int) -> None:
        for y in reversed(t.children(i, x)):
            steps.append(+1)
            visit(i + 1, y)
            steps.append(-1)

    visit(0, 0)
    if t.mark:
        # the walk ends by descending from the mark to the root; cut that tail
        steps = steps[: len(steps) - t.mark]
    return steps


def formula_of_walk(steps: Sequence[int], s: Seed) -> Formula:
    """Read steps from the atom outward: ``+1`` pushes one level up, ``-1`` pulls one level down."""
    cat = s.base
    out: Formula = s.atom()
    height = 0
    for st in steps:
        if st > 0:
            out = Push(cat.between(height, height + 1), out)
            height += 1
        else:
            if height == 0:
                raise NotAWalk("walk goes below the root")
            out = Pull(cat.between(height - 1, height), out)
            height -= 1
    return out


def tree_of_walk(steps: Sequence[int]) -> PlaneTree:
    height = 0
    for i, st in enumerate(steps):
        height += st
        if height < 0:
            raise NotAWalk(f"running height negative after step {i}")
    t = PlaneTree((), 0)
    for st in steps:
        t = t.grow(t.mark, t.mark + 1) if st > 0 else t.lower(t.mark - 1)
    return t


def encode_tree(t: PlaneTree, s: Seed | None = None) -> Formula:
    """The formula whose interpretation is ``t``."""
    s = s or seed("pomega", max(t.height, 1))
    return formula_of_walk(walk_of_tree(t), s)


# the two trees of the eleven-morphism example
TREE_S = PlaneTree(((0, 0, 0), (0, 2, 2)))
TREE_T = PlaneTree(((0, 0, 0), (0, 0, 2), (0,)))


# ---------------------------------------------------------------------------
# walks over the additive monoid


def displacement(s: Formula) -> int:
    """Net height change of a formula over the naturals: pushes climb, pulls descend."""
    if isinstance(s, Atom):
        return 0
    d = displacement(s.body)
    return d + s.arrow.payload if isinstance(s, Push) else d - s.arrow.payload


# ---------------------------------------------------------------------------
# a four-cell derivation over the chain A < B < C


def stack_example() -> tuple[Signature, Derivation]:
    """A four-rule derivation ``pull f push f X |-_id pull h push g Y`` over ``A < B < C``."""
    base = FinPoset.chain(3, {(0, 1): "f", (1, 2): "g", (0, 2): "h"})
    dom = FinPoset(["X", "Y"], [("X", "Y")], {("X", "Y"): "alpha"})
    place = {"X": 0, "Y": 1}
    p = FunctorDef(dom, base, place.__getitem__, lambda a: base.between(place[a.dom], place[a.cod]))
    sig = Signature(p, name="fig1")
    f, g, h = base.between(0, 1), base.between(1, 2), base.between(0, 2)
    d = RDiv(LMult(f, LDiv(f, g, RMult(sig.ax(dom.between("X", "Y")), g))), base.identity(0), h)
    return sig, d


# ---------------------------------------------------------------------------
# ambisimplicial formulas, forests and noncrossing partitions


def ambisimplex_formulas(n: int, k: int = 0, s: Seed | None = None) -> Iterator[Formula]:
    """Every generator formula from the atom ``n`` down to ``k``, one face or degeneracy per step."""
    s = s or seed("ambisimplex", max(n, 1))
    cat: SimplexCat = s.base

    def rec(m: int, body: Formula) -> Iterator[Formula]:
        if m == k:
            yield body
            return
        # at ordinal m: pull along a face (m-1 -> m) or push along a degeneracy (m -> m-1)
        for i in range(m):
            yield from rec(m - 1, Pull(cat.delta(i, m - 1), body))
        for i in range(m - 1):
            yield from rec(m - 1, Push(cat.sigma(i, m - 1), body))

    yield from rec(n, s.atom(n))


def double_factorial(n: int) -> int:
    """``(2n - 1)!!``."""
    return math.prod(range(2 * n - 1, 0, -2))


def chi(s: Formula) -> int:
    while not isinstance(s, Atom):
        s = s.body
    return s.obj


@dataclass(frozen=True)
class ForestNode:
    """A binary node (two children) or a root node (one child); leaves are ints."""

    label: int
    kind: str  # "bin" or "root"
    children: tuple


@dataclass(frozen=True)
class IncreasingBinaryForest:
    leaves: int
    roots: tuple  # terminated components, in creation order
    open: tuple  # edges still free, left to right

    def nodes(self) -> list[ForestNode]:
        out = []

        def walk(x) -> None:
            if isinstance(x, ForestNode):
                out.append(x)
                for c in x.children:
                    walk(c)

        for r in self.roots + self.open:
            walk(r)
        return out


def forest_of_formula(s: Formula) -> IncreasingBinaryForest:
    """Build the forest from the atom outward: degeneracies join, faces terminate."""
    steps = []
    cur = s
    while not isinstance(cur, Atom):
        steps.append(cur)
        cur = cur.body
    n = cur.obj
    edges: list = list(range(n))
    roots = []
    for step in reversed(steps):
        a = step.arrow
        if isinstance(step, Push):
            i = _sigma_index(a)
            edges[i:i + 2] = [ForestNode(a.cod, "bin", (edges[i], edges[i + 1]))]
        else:
            i = _delta_index(a)
            roots.append(ForestNode(a.dom, "root", (edges.pop(i),)))
    return IncreasingBinaryForest(n, tuple(roots), tuple(edges))


def _sigma_index(a: Arrow) -> int:
    if a.dom != a.cod + 1:
        raise IllFormed(f"{a} is not a generating degeneracy")
    for i in range(a.cod):
        if a.payload[i] == a.payload[i + 1]:
            return i
    raise IllFormed(f"{a} is not a generating degeneracy")


def _delta_index(a: Arrow) -> int:
    if a.cod != a.dom + 1:
        raise IllFormed(f"{a} is not a generating face")
    missing = set(range(a.cod)) - set(a.payload)
    return missing.pop()


def _leaves(x) -> list[int]:
    if isinstance(x, int):
        return [x]
    return [y for c in x.children for y in _leaves(c)]


NoncrossingPartition = tuple  # sorted tuple of sorted blocks


def partition_of_formula(s: Formula) -> NoncrossingPartition:
    """Blocks of leaves that end up connected, for any formula with an ordinal atom.

    Works on collapsed formulas too: a push along a surjection merges the
    leaves of each fiber, and a pull along an injection closes off every
    element outside its image.
    """
    steps = []
    cur = s
    while not isinstance(cur, Atom):
        steps.append(cur)
        cur = cur.body
    groups: list[frozenset[int]] = [frozenset([i]) for i in range(cur.obj)]
    closed: list[frozenset[int]] = []
    for step in reversed(steps):
        images = step.arrow.payload
        if isinstance(step, Push):
            merged: list[frozenset[int]] = [frozenset()] * step.arrow.cod
            for x, y in enumerate(images):
                merged[y] = merged[y] | groups[x]
            groups = merged
        else:
            kept = set(images)
            closed += [g for y, g in enumerate(groups) if y not in kept]
            groups = [groups[y] for y in images]
    blocks = [tuple(sorted(b)) for b in closed + groups if b]
    return tuple(sorted(blocks))


def noncrossing_of(f: IncreasingBinaryForest) -> NoncrossingPartition:
    """Blocks of leaves by connected component."""
    blocks = [tuple(sorted(_leaves(x))) for x in f.roots + f.open]
    return tuple(sorted(blocks))


def is_noncrossing(blocks: Sequence[Sequence[int]]) -> bool:
    for a, b in itertools.permutations(blocks, 2):
        for x1, x2 in itertools.combinations(sorted(a), 2):
            if any(x1 < y < x2 for y in b) and any(y < x1 or y > x2 for y in b):
                return False
    return True


def set_partitions(n: int) -> Iterator[tuple]:
    """Every set partition of ``{0..n-1}`` as a sorted tuple of blocks."""
    def rec(i: int, blocks: list[list[int]]) -> Iterator[tuple]:
        if i == n:
            yield tuple(sorted(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def noncrossing_partitions(n: int) -> list[tuple]:
    return [p for p in set_partitions(n) if is_noncrossing(p)]


def refines(p: Sequence[Sequence[int]], q: Sequence[Sequence[int]]) -> bool:
    """Every block of ``p`` lies inside a block of ``q``."""
    return all(any(set(b) <= set(c) for c in q) for b in p)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def kreweras_intervals(n: int) -> int:
    return math.comb(3 * n, n) // (2 * n + 1)


def ambisimplex_labels(s: Seed | None = None) -> dict[str, Formula]:
    """The seven collapsed representatives of the closed formulas with three leaves."""
    s = s or seed("ambisimplex", 3)
    c: SimplexCat = s.base
    x3 = s.atom(3)
    m = c.map
    return {
        "A": Pull(m([], 3), x3),
        "B": Pull(m([], 2), Push(c.sigma(0, 2), x3)),
        "C": Pull(m([], 2), Push(c.sigma(1, 2), x3)),
        "D": Pull(m([], 1), Push(m([0, 0], 1), Pull(c.delta(0, 2), x3))),
        "E": Pull(m([], 1), Push(m([0, 0, 0], 1), x3)),
        "F": Pull(m([], 1), Push(m([0, 0], 1), Pull(c.delta(1, 2), x3))),
        "G": Pull(m([], 1), Push(m([0, 0], 1), Pull(c.delta(2, 2), x3))),
    }


def collapse_formula(s: Formula) -> Formula:
    return strictify(s)[0]



def non_dyck_example() -> Derivation:
    """A proof over the naturals whose left walk dips below zero on the way.

    The stack is read from the axiom down; each entry is one generating cell.
    """
    from .zigzag import LPULL, LPUSH, RPULL, RPUSH, GenCell, Stack, recompose

    s = seed("bnat")
    n = s.base.n
    cells = [
        (RPUSH, 0, 2),
        (LPUSH, 1, 1), (RPULL, 0, 1),
        (LPULL, 2, 0), (RPUSH, 2, 1),
        (RPULL, 0, 3),
        (RPUSH, 0, 3),
        (RPULL, 2, 1),
        (RPUSH, 2, 1),
        (LPUSH, 3, 0),
        (LPULL, 1, 0),
        (RPULL, 0, 1),
    ]
    stack = Stack(n(0), tuple(GenCell(kind, n(a), n(b)) for kind, a, b in cells))
    return recompose(s.sig.domain.identity("*"), stack, s.sig.p)


def walk_heights(s: Formula) -> list[int]:
    """Running displacement from the atom outward, starting at 0."""
    steps = []
    while not isinstance(s, Atom):
        steps.append(s)
        s = s.body
    out = [0]
    for st in reversed(steps):
        out.append(out[-1] + (st.arrow.payload if isinstance(st, Push) else -st.arrow.payload))
    return out


# ---------------------------------------------------------------------------
# JSON codecs


def tree_to_json(t: PlaneTree) -> str:
    return json.dumps({"tree": t.to_nested(), "mark": t.mark})


def tree_from_json(text: str) -> PlaneTree:
    data = json.loads(text)
    return PlaneTree.from_nested(data["tree"], data.get("mark", 0))


def partition_to_json(p: NoncrossingPartition) -> str:
    return json.dumps([list(b) for b in p])


def partition_from_json(text: str) -> NoncrossingPartition:
    blocks = tuple(sorted(tuple(sorted(b)) for b in json.loads(text)))
    if not is_noncrossing(blocks):
        raise IllFormed(f"{blocks} is crossing")
    return blocks


def forest_to_json(f: IncreasingBinaryForest) -> str:
    def node(x):
        if isinstance(x, int):
            return x
        return {"label": x.label, "kind": x.kind, "children": [node(c) for c in x.children]}

    return json.dumps({"leaves": f.leaves, "roots": [node(r) for r in f.roots], "open": [node(o) for o in f.open]})
