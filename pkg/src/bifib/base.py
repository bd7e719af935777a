"""Category backends for the base category ``C`` and the domain ``D``.

Composition is written in diagrammatic order throughout: ``compose(a, b)``
means "first ``a``, then ``b``" and requires ``a.cod == b.dom``.

Every arrow remembers the backend that produced it, so the module-level
helpers (:func:`compose`, :func:`left_divisors`, ...) need no extra context.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence

import networkx as nx

from .errors import IllFormed, NonComposable, SquareNotCommuting

ObjId = Hashable


@dataclass(frozen=True)
class Arrow:
    """An arrow ``dom -> cod`` with a backend-specific payload.

    Equality and hashing look only at ``(dom, cod, payload)``.
    """

    dom: Any
    cod: Any
    payload: Any
    cat: "Category" = field(compare=False, repr=False, hash=False)

    def key(self) -> tuple:
        return (self.dom, self.cod, self.payload)

    def __lt__(self, other: "Arrow") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return self.cat.show(self)

    def __repr__(self) -> str:
        return f"Arrow({self.cat.show(self)}: {self.dom!r} -> {self.cod!r})"

    def then(self, other: "Arrow") -> "Arrow":
        return self.cat.compose(self, other)

    @property
    def is_identity(self) -> bool:
        return self == self.cat.identity(self.dom)


@dataclass(frozen=True)
class ArrowClass:
    """A class of arrows (``all``, ``epi``, ``mono``, ...) used to restrict pushes or pulls."""

    name: str
    contains: Callable[[Arrow], bool]

    def __call__(self, arrow: Arrow) -> bool:
        return self.contains(arrow)

    def out_of(self, cat: "Category", obj: ObjId) -> list[Arrow]:
        """Class arrows leaving ``obj`` among the backend's (finite) objects."""
        return sorted(a for b in cat.objects() for a in cat.hom(obj, b) if self.contains(a))

    def into(self, cat: "Category", obj: ObjId) -> list[Arrow]:
        return sorted(a for b in cat.objects() for a in cat.hom(b, obj) if self.contains(a))


ALL = ArrowClass("all", lambda a: True)


class Category:
    """Common interface for the supported backends.

    Subclasses implement ``_payload_compose``, ``_identity_payload``,
    ``left_divisors`` and ``right_divisors``.  ``fp_classes`` names the
    arrow classes for which the backend guarantees that commuting squares
    have at most one diagonal filler.
    """

    name = "category"
    fp_classes: frozenset[str] = frozenset()
    locally_finite = True

    def objects(self) -> Sequence[ObjId]:
        raise NotImplementedError

    def has_object(self, obj: ObjId) -> bool:
        return obj in self.objects()

    def arrow(self, dom: ObjId, cod: ObjId, payload: Any) -> Arrow:
        return Arrow(dom, cod, payload, self)

    def identity(self, obj: ObjId) -> Arrow:
        return Arrow(obj, obj, self._identity_payload(obj), self)

    def compose(self, a: Arrow, b: Arrow) -> Arrow:
        if a.cod != b.dom:
            raise NonComposable(f"cannot compose {a!r} then {b!r}")
        return Arrow(a.dom, b.cod, self._payload_compose(a, b), self)

    def compose_all(self, arrows: Iterable[Arrow], obj: ObjId) -> Arrow:
        """Composite of a (possibly empty) path starting at ``obj``."""
        out = self.identity(obj)
        for a in arrows:
            out = self.compose(out, a)
        return out

    def hom(self, a: ObjId, b: ObjId) -> list[Arrow]:
        raise NotImplementedError(f"{self.name} does not enumerate homsets")

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        raise NotImplementedError

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        raise NotImplementedError

    def fillers(self, f: Arrow, x: Arrow, y: Arrow, k: Arrow) -> list[Arrow]:
        """All ``e`` with ``f.e = x`` and ``e.k = y`` for the square ``f.y = x.k``."""
        if f.dom != x.dom or y.cod != k.cod or f.cod != y.dom or x.cod != k.dom:
            raise SquareNotCommuting("square boundaries do not match")
        if self.compose(f, y) != self.compose(x, k):
            raise SquareNotCommuting(f"{f}.{y} != {x}.{k}")
        return [e for e in self.left_divisors(f, x) if self.compose(e, k) == y]

    def le_fact(self, a: Arrow, b: Arrow, c: Arrow, d: Arrow) -> bool:
        """``(a, b) <= (c, d)``: some ``e`` has ``c = a.e`` and ``b = e.d``."""
        return bool(self.fillers(a, c, b, d))

    def is_fp(self, *class_names: str) -> bool:
        if "all" in self.fp_classes:
            return True
        return all(name in self.fp_classes for name in class_names)

    def classes(self) -> dict[str, ArrowClass]:
        return {"all": ALL}

    def show(self, a: Arrow) -> str:
        return repr(a.payload)

    def parse_arrow(self, text: str) -> Arrow:
        raise IllFormed(f"{self.name}: cannot parse arrow {text!r}")

    def parse_object(self, text: str) -> ObjId:
        for obj in self.objects():
            if str(obj) == text:
                return obj
        raise IllFormed(f"{self.name}: unknown object {text!r}")

    def _identity_payload(self, obj: ObjId) -> Any:
        raise NotImplementedError

    def _payload_compose(self, a: Arrow, b: Arrow) -> Any:
        raise NotImplementedError


class FreeCat(Category):
    """Free category on a directed multigraph; arrows are words of edge names."""

    name = "free"
    fp_classes = frozenset({"all"})
    locally_finite = False

    def __init__(self, edges: dict[str, tuple[ObjId, ObjId]], objects: Iterable[ObjId] = ()):
        self.edges = dict(edges)
        objs = set(objects)
        for src, tgt in self.edges.values():
            objs.update((src, tgt))
        self._objects = tuple(sorted(objs, key=str))

    def objects(self) -> Sequence[ObjId]:
        return self._objects

    def gen(self, name: str) -> Arrow:
        src, tgt = self.edges[name]
        return Arrow(src, tgt, (name,), self)

    def word(self, names: Sequence[str], obj: ObjId | None = None) -> Arrow:
        if not names:
            if obj is None:
                raise IllFormed("an empty word needs an explicit object")
            return self.identity(obj)
        return self.compose_all((self.gen(n) for n in names), self.edges[names[0]][0])

    def _identity_payload(self, obj: ObjId) -> tuple:
        return ()

    def _payload_compose(self, a: Arrow, b: Arrow) -> tuple:
        return a.payload + b.payload

    def paths(self, a: ObjId, b: ObjId, max_len: int) -> list[Arrow]:
        out = []
        frontier = [self.identity(a)]
        for _ in range(max_len + 1):
            out.extend(p for p in frontier if p.cod == b)
            frontier = [self.compose(p, self.gen(e)) for p in frontier
                        for e in sorted(self.edges) if self.edges[e][0] == p.cod]
        return sorted(out)

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        if a.dom != h.dom:
            return []
        n = len(a.payload)
        if h.payload[:n] != a.payload:
            return []
        return [Arrow(a.cod, h.cod, h.payload[n:], self)]

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        if b.cod != h.cod:
            return []
        n = len(h.payload) - len(b.payload)
        if n < 0 or h.payload[n:] != b.payload:
            return []
        return [Arrow(h.dom, b.dom, h.payload[:n], self)]

    def show(self, a: Arrow) -> str:
        return ".".join(a.payload) if a.payload else f"id@{a.dom}"

    def parse_arrow(self, text: str) -> Arrow:
        if text.startswith("id@"):
            return self.identity(self.parse_object(text[3:]))
        names = text.split(".")
        if any(n not in self.edges for n in names):
            raise IllFormed(f"unknown edge in {text!r}")
        return self.word(names)


class FinPoset(Category):
    """A finite preorder: at most one arrow between any two objects."""

    name = "poset"
    fp_classes = frozenset({"all"})

    def __init__(self, elements: Iterable[ObjId], relation: Iterable[tuple[ObjId, ObjId]],
                 names: dict[tuple[ObjId, ObjId], str] | None = None):
        graph = nx.DiGraph()
        graph.add_nodes_from(elements)
        graph.add_edges_from(relation)
        self._closure = nx.transitive_closure(graph, reflexive=True)
        self._objects = tuple(sorted(graph.nodes, key=str))
        self.names = dict(names or {})

    @classmethod
    def chain(cls, n: int, names: dict[tuple[int, int], str] | None = None) -> "FinPoset":
        return cls(range(n), [(i, i + 1) for i in range(n - 1)], names)

    def objects(self) -> Sequence[ObjId]:
        return self._objects

    def leq(self, a: ObjId, b: ObjId) -> bool:
        return self._closure.has_edge(a, b)

    def between(self, a: ObjId, b: ObjId) -> Arrow:
        if not self.leq(a, b):
            raise IllFormed(f"no arrow {a} -> {b}")
        return Arrow(a, b, None, self)

    def hom(self, a: ObjId, b: ObjId) -> list[Arrow]:
        return [Arrow(a, b, None, self)] if self.leq(a, b) else []

    def _identity_payload(self, obj: ObjId) -> None:
        return None

    def _payload_compose(self, a: Arrow, b: Arrow) -> None:
        return None

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        if a.dom != h.dom:
            return []
        return self.hom(a.cod, h.cod)

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        if b.cod != h.cod:
            return []
        return self.hom(h.dom, b.dom)

    def show(self, a: Arrow) -> str:
        if (a.dom, a.cod) in self.names:
            return self.names[(a.dom, a.cod)]
        if a.dom == a.cod:
            return f"id@{a.dom}"
        return f"{a.dom}<={a.cod}"

    def parse_arrow(self, text: str) -> Arrow:
        for pair, name in self.names.items():
            if name == text:
                return self.between(*pair)
        if text.startswith("id@"):
            return self.identity(self.parse_object(text[3:]))
        if "<=" in text:
            a, b = text.split("<=")
            return self.between(self.parse_object(a), self.parse_object(b))
        raise IllFormed(f"cannot parse poset arrow {text!r}")


def _monotone_extensions(length: int, target: int, fixed: dict[int, int], low: int = 0) -> Iterator[tuple[int, ...]]:
    """Weakly increasing tuples of ``length`` values in ``range(target)`` respecting ``fixed``."""
    if length == 0:
        yield ()
        return

    def rec(pos: int, lo: int) -> Iterator[tuple[int, ...]]:
        if pos == length:
            yield ()
            return
        if pos in fixed:
            v = fixed[pos]
            if v >= lo:
                for rest in rec(pos + 1, v):
                    yield (v,) + rest
            return
        # the next fixed value bounds the free stretch from above
        hi = target - 1
        for q in range(pos + 1, length):
            if q in fixed:
                hi = min(hi, fixed[q])
                break
        for v in range(lo, hi + 1):
            for rest in rec(pos + 1, v):
                yield (v,) + rest

    yield from rec(0, low)


class SimplexCat(Category):
    """The augmented simplex category truncated at ``max_n``.

    The object ``n`` is the ordinal ``{0, ..., n-1}``; an arrow ``m -> n``
    is the tuple of images of a weakly increasing function.
    """

    name = "simplex"
    fp_classes = frozenset({"epi", "mono"})

    def __init__(self, max_n: int):
        self.max_n = max_n

    def objects(self) -> Sequence[int]:
        return tuple(range(self.max_n + 1))

    def map(self, images: Sequence[int], cod: int) -> Arrow:
        images = tuple(images)
        if any(x < 0 or x >= cod for x in images) or any(a > b for a, b in zip(images, images[1:])):
            raise IllFormed(f"{images} is not a monotone map into {cod}")
        return Arrow(len(images), cod, images, self)

    def sigma(self, i: int, n: int) -> Arrow:
        """The degeneracy ``n+1 -> n`` hitting ``i`` twice."""
        if not 0 <= i < n:
            raise IllFormed(f"sigma_{i}^{n} undefined")
        return self.map([x if x <= i else x - 1 for x in range(n + 1)], n)

    def delta(self, i: int, n: int) -> Arrow:
        """The face ``n -> n+1`` skipping ``i``."""
        if not 0 <= i <= n:
            raise IllFormed(f"delta_{i}^{n} undefined")
        return self.map([x if x < i else x + 1 for x in range(n)], n + 1)

    def hom(self, m: int, n: int) -> list[Arrow]:
        return [Arrow(m, n, t, self) for t in itertools.combinations_with_replacement(range(n), m)]

    def _identity_payload(self, obj: int) -> tuple[int, ...]:
        return tuple(range(obj))

    def _payload_compose(self, a: Arrow, b: Arrow) -> tuple[int, ...]:
        return tuple(b.payload[x] for x in a.payload)

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        if a.dom != h.dom:
            return []
        fixed: dict[int, int] = {}
        for x, y in enumerate(a.payload):
            if fixed.setdefault(y, h.payload[x]) != h.payload[x]:
                return []
        return [Arrow(a.cod, h.cod, t, self) for t in _monotone_extensions(a.cod, h.cod, fixed)]

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        if b.cod != h.cod:
            return []
        fibres = [[y for y in range(b.dom) if b.payload[y] == v] for v in h.payload]
        out: list[Arrow] = []

        def rec(pos: int, lo: int, acc: tuple[int, ...]) -> None:
            if pos == len(fibres):
                out.append(Arrow(h.dom, b.dom, acc, self))
                return
            for y in fibres[pos]:
                if y >= lo:
                    rec(pos + 1, y, acc + (y,))

        rec(0, 0, ())
        return out

    def is_epi(self, a: Arrow) -> bool:
        return set(a.payload) == set(range(a.cod))

    def is_mono(self, a: Arrow) -> bool:
        return len(set(a.payload)) == len(a.payload)

    def classes(self) -> dict[str, ArrowClass]:
        return {"all": ALL, "epi": ArrowClass("epi", self.is_epi), "mono": ArrowClass("mono", self.is_mono)}

    def show(self, a: Arrow) -> str:
        n = a.cod
        if a.dom == n + 1:
            for i in range(n):
                if a == self.sigma(i, n):
                    return f"s{i}^{n}"
        if a.dom + 1 == n:
            for i in range(n):
                if a == self.delta(i, a.dom):
                    return f"d{i}^{a.dom}"
        return f"m{n}:" + ",".join(map(str, a.payload)) if a.payload else f"m{n}:"

    def parse_arrow(self, text: str) -> Arrow:
        m = re.fullmatch(r"([sd])(\d+)\^(\d+)", text)
        if m:
            kind, i, n = m.group(1), int(m.group(2)), int(m.group(3))
            return self.sigma(i, n) if kind == "s" else self.delta(i, n)
        m = re.fullmatch(r"m(\d+):([\d,]*)", text)
        if m:
            images = [int(x) for x in m.group(2).split(",") if x]
            return self.map(images, int(m.group(1)))
        m = re.fullmatch(r"id\^(\d+)", text)
        if m:
            return self.identity(int(m.group(1)))
        raise IllFormed(f"cannot parse simplex arrow {text!r}")

    def parse_object(self, text: str) -> int:
        return int(text)


class MonoidNat(Category):
    """The one-object category of natural numbers under addition."""

    name = "monoid-nat"
    fp_classes = frozenset({"all"})
    locally_finite = False
    OBJ = "*"

    def objects(self) -> Sequence[str]:
        return (self.OBJ,)

    def n(self, value: int) -> Arrow:
        if value < 0:
            raise IllFormed("negative displacement")
        return Arrow(self.OBJ, self.OBJ, value, self)

    def _identity_payload(self, obj: str) -> int:
        return 0

    def _payload_compose(self, a: Arrow, b: Arrow) -> int:
        return a.payload + b.payload

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        return [self.n(h.payload - a.payload)] if h.payload >= a.payload else []

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        return [self.n(h.payload - b.payload)] if h.payload >= b.payload else []

    def show(self, a: Arrow) -> str:
        return str(a.payload)

    def parse_arrow(self, text: str) -> Arrow:
        return self.n(int(text))


class Discrete(Category):
    """A discrete category: identity arrows only."""

    name = "discrete"
    fp_classes = frozenset({"all"})

    def __init__(self, objects: Iterable[ObjId]):
        self._objects = tuple(objects)

    def objects(self) -> Sequence[ObjId]:
        return self._objects

    def hom(self, a: ObjId, b: ObjId) -> list[Arrow]:
        return [self.identity(a)] if a == b else []

    def _identity_payload(self, obj: ObjId) -> None:
        return None

    def _payload_compose(self, a: Arrow, b: Arrow) -> None:
        return None

    def left_divisors(self, a: Arrow, h: Arrow) -> list[Arrow]:
        return [a] if a == h else []

    def right_divisors(self, h: Arrow, b: Arrow) -> list[Arrow]:
        return [b] if b == h else []

    def show(self, a: Arrow) -> str:
        return f"id@{a.dom}"

    def parse_arrow(self, text: str) -> Arrow:
        if text in ("id", "id@*") and len(self._objects) == 1:
            return self.identity(self._objects[0])
        if text.startswith("id@"):
            return self.identity(self.parse_object(text[3:]))
        raise IllFormed(f"cannot parse discrete arrow {text!r}")


class DiscreteNat(Discrete):
    name = "discrete-nat"

    def __init__(self, max_n: int):
        super().__init__(range(max_n + 1))

    def parse_object(self, text: str) -> int:
        return int(text)


def Point() -> Discrete:
    """The terminal category with the single object ``*``."""
    return Discrete(["*"])


@dataclass
class FunctorDef:
    """A functor ``p : D -> C`` given by its object and arrow maps.

    ``lifts(X, Y, h)`` lists the ``D``-arrows ``X -> Y`` lying over ``h``.
    """

    source: Category
    target: Category
    obj_map: Callable[[ObjId], ObjId]
    arr_map: Callable[[Arrow], Arrow]
    is_identity: bool = False

    @classmethod
    def identity(cls, cat: Category) -> "FunctorDef":
        return cls(cat, cat, lambda x: x, lambda a: a, is_identity=True)

    @classmethod
    def constant(cls, source: Category, target: Category, obj: ObjId) -> "FunctorDef":
        """Every object goes to ``obj`` and every arrow to its identity."""
        return cls(source, target, lambda x: obj, lambda a: target.identity(obj))

    def __call__(self, x: ObjId) -> ObjId:
        return self.obj_map(x)

    def on_arrow(self, a: Arrow) -> Arrow:
        return self.arr_map(a)

    def lifts(self, x: ObjId, y: ObjId, h: Arrow) -> list[Arrow]:
        if self.is_identity:
            return [h] if (h.dom, h.cod) == (x, y) else []
        return [d for d in self.source.hom(x, y) if self.arr_map(d) == h]

    def check_generators(self, arrows: Iterable[Arrow]) -> None:
        for a in arrows:
            img = self.arr_map(a)
            if (img.dom, img.cod) != (self.obj_map(a.dom), self.obj_map(a.cod)):
                raise IllFormed(f"functor does not preserve boundaries of {a!r}")


def compose(a: Arrow, b: Arrow) -> Arrow:
    return a.cat.compose(a, b)


def left_divisors(a: Arrow, h: Arrow) -> list[Arrow]:
    """All ``g`` with ``a.g = h``, in canonical order."""
    if a.dom != h.dom:
        raise NonComposable(f"{a!r} and {h!r} have different domains")
    return a.cat.left_divisors(a, h)


def right_divisors(h: Arrow, b: Arrow) -> list[Arrow]:
    """All ``g`` with ``g.b = h``, in canonical order."""
    if b.cod != h.cod:
        raise NonComposable(f"{h!r} and {b!r} have different codomains")
    return h.cat.right_divisors(h, b)


def fillers(f: Arrow, x: Arrow, y: Arrow, k: Arrow) -> list[Arrow]:
    return f.cat.fillers(f, x, y, k)


def le_fact(a: Arrow, b: Arrow, c: Arrow, d: Arrow) -> bool:
    return a.cat.le_fact(a, b, c, d)


def parse_presentation(text: str) -> Category:
    """Build a backend from the line-oriented presentation format.

    Either a single builtin line (``simplex 5``, ``omega 6``, ``monoid-nat``,
    ``discrete-nat 5``) or ``objects:``/``arrow`` lines describing a free
    category, optionally marked ``poset`` to take the generated preorder.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) == 1:
        head, *rest = lines[0].split()
        if head == "simplex":
            return SimplexCat(int(rest[0]))
        if head == "omega":
            return FinPoset.chain(int(rest[0]) + 1)
        if head == "monoid-nat":
            return MonoidNat()
        if head == "discrete-nat":
            return DiscreteNat(int(rest[0]))
    objects: list[str] = []
    edges: dict[str, tuple[str, str]] = {}
    poset = False
    for ln in lines:
        if ln == "poset":
            poset = True
        elif ln.startswith("objects:"):
            objects.extend(ln[len("objects:"):].split())
        elif ln.startswith("arrow"):
            m = re.fullmatch(r"arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", ln)
            if not m:
                raise IllFormed(f"bad arrow line {ln!r}")
            edges[m.group(1)] = (m.group(2), m.group(3))
        else:
            raise IllFormed(f"unrecognised presentation line {ln!r}")
    if poset:
        return FinPoset(objects, edges.values(), {v: k for k, v in edges.items()})
    return FreeCat(edges, objects)
