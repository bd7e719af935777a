"""Formulas, sequents and the derivation term calculus.

A formula is built from atoms (objects of ``D``) by pushing forward and
pulling back along arrows of ``C``.  A sequent ``S |-_h T`` relates two
formulas along a base arrow ``h``, and derivations are terms over the five
rules below (all arrows in diagrammatic order):

==================  ==========================================================
``Ax(d, h)``        ``Atom(X) |-_h Atom(Y)`` for ``d : X -> Y`` over ``h``
``LDiv(f, g, a)``   ``Push(f, S) |-_g T``       from ``a : S |-_{f.g} T``
``RMult(a, f)``     ``S |-_{h.f} Push(f, T)``   from ``a : S |-_h T``
``LMult(g, a)``     ``Pull(g, S) |-_{g.h} T``   from ``a : S |-_h T``
``RDiv(a, f, g)``   ``S |-_f Pull(g, T)``       from ``a : S |-_{f.g} T``
==================  ==========================================================

Nodes are immutable, hash in O(1) and compute their sequent on
construction, so an invalid term can never be built.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, Union

from .base import ALL, Arrow, ArrowClass, Category, FunctorDef, ObjId
from .errors import BudgetExceeded, IllFormed, NonComposable

DEFAULT_BUDGET = 100_000


# ---------------------------------------------------------------------------
# formulas


class _Node:
    """Mixin giving frozen dataclasses a cached structural hash."""

    __slots__ = ()

    def _seal(self, *parts) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + parts))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Atom(_Node):
    """An atomic formula; ``p`` is the functor that places it over ``ref``."""

    obj: ObjId
    ref: ObjId
    p: FunctorDef = field(repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.obj, self.ref)

    def __str__(self) -> str:
        return f"{self.obj}"


@dataclass(frozen=True, eq=True)
class Push(_Node):
    arrow: Arrow
    body: "Formula"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.body.ref != self.arrow.dom:
            raise IllFormed(f"push along {self.arrow!r} of a formula over {self.body.ref!r}")
        self._seal(self.arrow, self.body)

    @property
    def ref(self) -> ObjId:
        return self.arrow.cod

    def __str__(self) -> str:
        return f"↓{self.arrow} {self.body}"


@dataclass(frozen=True, eq=True)
class Pull(_Node):
    arrow: Arrow
    body: "Formula"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.body.ref != self.arrow.cod:
            raise IllFormed(f"pull along {self.arrow!r} of a formula over {self.body.ref!r}")
        self._seal(self.arrow, self.body)

    @property
    def ref(self) -> ObjId:
        return self.arrow.dom

    def __str__(self) -> str:
        return f"↑{self.arrow} {self.body}"


Formula = Union[Atom, Push, Pull]


def push_run(s: Formula) -> tuple[tuple[Arrow, ...], Formula]:
    """Split ``s`` into its maximal outer run of pushes (innermost first) and the rest."""
    arrows: list[Arrow] = []
    while isinstance(s, Push):
        arrows.append(s.arrow)
        s = s.body
    return tuple(reversed(arrows)), s


def pull_run(s: Formula) -> tuple[tuple[Arrow, ...], Formula]:
    """Split ``s`` into its maximal outer run of pulls (outermost first) and the rest."""
    arrows: list[Arrow] = []
    while isinstance(s, Pull):
        arrows.append(s.arrow)
        s = s.body
    return tuple(arrows), s


def push_seq(pi: Sequence[Arrow], body: Formula) -> Formula:
    for f in pi:
        body = Push(f, body)
    return body


def pull_seq(rho: Sequence[Arrow], body: Formula) -> Formula:
    for g in reversed(rho):
        body = Pull(g, body)
    return body


def composite(cat: Category, arrows: Sequence[Arrow], obj: ObjId) -> Arrow:
    return cat.compose_all(arrows, obj)


def subformulas(s: Formula) -> list[Formula]:
    out = [s]
    while not isinstance(s, Atom):
        s = s.body
        out.append(s)
    return out


def formula_size(s: Formula) -> int:
    return len(subformulas(s)) - 1


def is_strictly_alternating(s: Formula) -> bool:
    for sub in subformulas(s):
        if isinstance(sub, (Push, Pull)) and type(sub.body) is type(sub):
            return False
    return True


@dataclass(frozen=True)
class Judgment:
    lhs: Formula
    base: Arrow
    rhs: Formula

    def __post_init__(self):
        if self.lhs.ref != self.base.dom or self.rhs.ref != self.base.cod:
            raise IllFormed(f"sequent {self.lhs} |-_{self.base} {self.rhs} does not lie over its arrow")

    def __str__(self) -> str:
        return f"{self.lhs} ⊢_{self.base} {self.rhs}"


# ---------------------------------------------------------------------------
# derivations


def _compose(a: Arrow, b: Arrow, where: str) -> Arrow:
    try:
        return a.cat.compose(a, b)
    except NonComposable as exc:
        raise IllFormed(f"{where}: {exc}") from None


@dataclass(frozen=True, eq=True)
class Ax(_Node):
    """Initial axiom on a ``D``-arrow ``delta`` lying over ``over``."""

    delta: Arrow
    over: Arrow
    p: FunctorDef = field(repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.delta, self.over)
        j = Judgment(Atom(self.delta.dom, self.over.dom, self.p), self.over,
                     Atom(self.delta.cod, self.over.cod, self.p))
        object.__setattr__(self, "judgment", j)


@dataclass(frozen=True, eq=True)
class LDiv(_Node):
    f: Arrow
    g: Arrow
    body: "Derivation"
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.f, self.g, self.body)
        j = self.body.judgment
        if _compose(self.f, self.g, "left division") != j.base:
            raise IllFormed(f"left division: {self.f}.{self.g} != {j.base}")
        object.__setattr__(self, "judgment", Judgment(Push(self.f, j.lhs), self.g, j.rhs))


@dataclass(frozen=True, eq=True)
class RMult(_Node):
    body: "Derivation"
    f: Arrow
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.body, self.f)
        j = self.body.judgment
        base = _compose(j.base, self.f, "right multiplication")
        object.__setattr__(self, "judgment", Judgment(j.lhs, base, Push(self.f, j.rhs)))


@dataclass(frozen=True, eq=True)
class LMult(_Node):
    g: Arrow
    body: "Derivation"
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.g, self.body)
        j = self.body.judgment
        base = _compose(self.g, j.base, "left multiplication")
        object.__setattr__(self, "judgment", Judgment(Pull(self.g, j.lhs), base, j.rhs))


@dataclass(frozen=True, eq=True)
class RDiv(_Node):
    body: "Derivation"
    f: Arrow
    g: Arrow
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.body, self.f, self.g)
        j = self.body.judgment
        if _compose(self.f, self.g, "right division") != j.base:
            raise IllFormed(f"right division: {self.f}.{self.g} != {j.base}")
        object.__setattr__(self, "judgment", Judgment(j.lhs, self.f, Pull(self.g, j.rhs)))


Derivation = Union[Ax, LDiv, RMult, LMult, RDiv]
LEFT_RULES = (LDiv, LMult)
RIGHT_RULES = (RMult, RDiv)


def infer_judgment(d: Derivation) -> Judgment:
    """The sequent derived by ``d`` (checked when the term was built)."""
    return d.judgment


def size(d: Derivation) -> int:
    n = 0
    while not isinstance(d, Ax):
        d = d.body
        n += 1
    return n


# ---------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    """The functor ``p : D -> C`` together with the classes allowed for pushes and pulls."""

    p: FunctorDef
    push_class: ArrowClass = ALL
    pull_class: ArrowClass = ALL
    name: str = "p"

    @property
    def base(self) -> Category:
        return self.p.target

    @property
    def domain(self) -> Category:
        return self.p.source

    def atom(self, x: ObjId) -> Atom:
        return Atom(x, self.p(x), self.p)

    def ax(self, delta: Arrow) -> Ax:
        return Ax(delta, self.p.on_arrow(delta), self.p)

    def push(self, f: Arrow, s: Formula) -> Push:
        if not self.push_class(f):
            raise IllFormed(f"{f} is not in the push class {self.push_class.name}")
        return Push(f, s)

    def pull(self, g: Arrow, t: Formula) -> Pull:
        if not self.pull_class(g):
            raise IllFormed(f"{g} is not in the pull class {self.pull_class.name}")
        return Pull(g, t)

    def check_formula(self, s: Formula) -> None:
        for sub in subformulas(s):
            if isinstance(sub, Push) and not self.push_class(sub.arrow):
                raise IllFormed(f"{sub.arrow} is not in the push class")
            if isinstance(sub, Pull) and not self.pull_class(sub.arrow):
                raise IllFormed(f"{sub.arrow} is not in the pull class")
            if isinstance(sub, Atom) and self.p(sub.obj) != sub.ref:
                raise IllFormed(f"atom {sub.obj} does not lie over {sub.ref}")

    def is_fp(self) -> bool:
        return self.base.is_fp(self.push_class.name, self.pull_class.name)

    def identity(self, obj: ObjId) -> Arrow:
        return self.base.identity(obj)


# ---------------------------------------------------------------------------
# identities, cartesian liftings and cut


def identity(s: Formula) -> Derivation:
    """The identity derivation ``S |-_Id S`` built by induction on ``S``."""
    if isinstance(s, Atom):
        return Ax(s.p.source.identity(s.obj), s.p.target.identity(s.ref), s.p)
    if isinstance(s, Push):
        f = s.arrow
        return LDiv(f, f.cat.identity(f.cod), RMult(identity(s.body), f))
    g = s.arrow
    return RDiv(LMult(g, identity(s.body)), g.cat.identity(g.dom), g)




def cartesian_lift(direction: str, f: Arrow, s: Formula) -> Derivation:
    """``push``: ``S |-_f Push(f, S)``; ``pull``: ``Pull(f, S) |-_f S``."""
    if direction == "push":
        return RMult(identity(s), f)
    if direction == "pull":
        return LMult(f, identity(s))
    raise IllFormed(f"unknown lifting direction {direction!r}")


def unit(f: Arrow, s: Formula) -> Derivation:
    """``S |-_Id Pull(f, Push(f, S))``."""
    return RDiv(cartesian_lift("push", f, s), f.cat.identity(f.dom), f)


def counit(f: Arrow, u: Formula) -> Derivation:
    """``Push(f, Pull(f, U)) |-_Id U``."""
    return LDiv(f, f.cat.identity(f.cod), cartesian_lift("pull", f, u))


def cut(a: Derivation, b: Derivation) -> Derivation:
    """Compose ``a : S |-_g T`` with ``b : T |-_h U`` into ``S |-_{g.h} U``.

    Left rules at the root of ``a`` are commuted first, then right rules at
    the root of ``b``; only then are the principal cases met.
    """
    ja, jb = a.judgment, b.judgment
    if ja.rhs != jb.lhs:
        raise NonComposable(f"cannot cut {ja} against {jb}")
    return _cut(a, b)


def _cut(a: Derivation, b: Derivation) -> Derivation:
    if isinstance(a, LMult):
        return LMult(a.g, _cut(a.body, b))
    if isinstance(a, LDiv):
        return LDiv(a.f, a.g.then(b.judgment.base), _cut(a.body, b))
    if isinstance(b, RMult):
        return RMult(_cut(a, b.body), b.f)
    if isinstance(b, RDiv):
        return RDiv(_cut(a, b.body), a.judgment.base.then(b.f), b.g)
    if isinstance(a, Ax) and isinstance(b, Ax):
        return Ax(a.delta.then(b.delta), a.over.then(b.over), a.p)
    if isinstance(a, RMult) and isinstance(b, LDiv):
        return _cut(a.body, b.body)
    if isinstance(a, RDiv) and isinstance(b, LMult):
        return _cut(a.body, b.body)
    raise NonComposable(f"no cut case for {type(a).__name__} against {type(b).__name__}")


# ---------------------------------------------------------------------------
# permutation equivalence


def _root_neighbors(d: Derivation) -> list[Derivation]:
    out: list[Derivation] = []
    body = getattr(d, "body", None)
    if isinstance(d, RMult):
        h = d.f
        if isinstance(body, LMult):
            out.append(LMult(body.g, RMult(body.body, h)))
        elif isinstance(body, LDiv):
            out.append(LDiv(body.f, body.g.then(h), RMult(body.body, h)))
    elif isinstance(d, LMult):
        if isinstance(body, RMult):
            out.append(RMult(LMult(d.g, body.body), body.f))
        elif isinstance(body, RDiv):
            out.append(RDiv(LMult(d.g, body.body), d.g.then(body.f), body.g))
    elif isinstance(d, LDiv):
        f, k = d.f, d.g
        if isinstance(body, RMult):
            a, h = body.body, body.f
            for l in f.cat.fillers(f, a.judgment.base, k, h):
                out.append(RMult(LDiv(f, l, a), h))
        elif isinstance(body, RDiv):
            h = body.g
            out.append(RDiv(LDiv(f, k.then(h), body.body), k, h))
    elif isinstance(d, RDiv):
        k, h = d.f, d.g
        if isinstance(body, LMult):
            f, a = body.g, body.body
            for g in f.cat.fillers(f, k, a.judgment.base, h):
                out.append(LMult(f, RDiv(a, g, h)))
        elif isinstance(body, LDiv):
            f = body.f
            out.append(LDiv(f, k, RDiv(body.body, f.then(k), h)))
    return out


def _rebuild(d: Derivation, body: Derivation) -> Derivation:
    if isinstance(d, LDiv):
        return LDiv(d.f, d.g, body)
    if isinstance(d, RMult):
        return RMult(body, d.f)
    if isinstance(d, LMult):
        return LMult(d.g, body)
    return RDiv(body, d.f, d.g)


def permeq_neighbors(d: Derivation) -> list[Derivation]:
    """Every derivation one generating permutation away from ``d``, at any depth."""
    out = _root_neighbors(d)
    if not isinstance(d, Ax):
        out.extend(_rebuild(d, n) for n in permeq_neighbors(d.body))
    return out


def permeq_class(a: Derivation, node_budget: int = DEFAULT_BUDGET) -> set[Derivation]:
    """The full permutation class of ``a`` (finite on locally finite bases)."""
    seen = {a}
    queue = deque([a])
    while queue:
        for n in permeq_neighbors(queue.popleft()):
            if n not in seen:
                if len(seen) >= node_budget:
                    raise BudgetExceeded(f"permutation class exceeds {node_budget} derivations")
                seen.add(n)
                queue.append(n)
    return seen


def permeq_decide_bfs(a: Derivation, b: Derivation, node_budget: int = DEFAULT_BUDGET) -> bool:
    """Breadth-first search for ``b`` in the permutation class of ``a``."""
    if a.judgment != b.judgment:
        return False
    if a == b:
        return True
    seen = {a}
    queue = deque([a])
    while queue:
        for n in permeq_neighbors(queue.popleft()):
            if n == b:
                return True
            if n not in seen:
                if len(seen) >= node_budget:
                    raise BudgetExceeded(f"gave up after {node_budget} derivations")
                seen.add(n)
                queue.append(n)
    return False


# ---------------------------------------------------------------------------
# strictification


def _ldiv_seq(pi: Sequence[Arrow], g: Arrow, body: Derivation) -> Derivation:
    """Left divisions along a push run, outermost arrow last in ``pi``."""
    tails = [g]
    for f in reversed(pi[1:]):
        tails.append(f.then(tails[-1]))
    tails.reverse()  # tails[i] = pi[i+1] ... pi[n] . g
    for f, t in zip(pi, tails):
        body = LDiv(f, t, body)
    return body


def _rmult_seq(body: Derivation, pi: Sequence[Arrow]) -> Derivation:
    for f in pi:
        body = RMult(body, f)
    return body


def _lmult_seq(rho: Sequence[Arrow], body: Derivation) -> Derivation:
    for g in reversed(rho):
        body = LMult(g, body)
    return body


def _rdiv_seq(body: Derivation, f: Arrow, rho: Sequence[Arrow]) -> Derivation:
    """Right divisions along a pull run ``rho`` (outermost first) ending over ``f``."""
    heads = [f]
    for g in rho[:-1]:
        heads.append(heads[-1].then(g))
    for g, h in zip(reversed(rho), reversed(heads)):
        body = RDiv(body, h, g)
    return body


def strictify(s: Formula) -> tuple[Formula, Derivation, Derivation]:
    """Collapse every run of pushes or pulls into one composite.

    Returns the collapsed formula together with ``theta : S |-_Id S'`` and
    ``theta_inv : S' |-_Id S``.
    """
    if isinstance(s, Atom):
        i = identity(s)
        return s, i, i
    cat = s.arrow.cat
    if isinstance(s, Push):
        pi, body = push_run(s)
        flat, th, th_inv = strictify(body)
        whole = cat.compose_all(pi, body.ref)
        top = Push(whole, flat)
        idc = cat.identity(s.ref)
        theta = _ldiv_seq(pi, idc, RMult(th, whole))
        theta_inv = LDiv(whole, idc, _rmult_seq(th_inv, pi))
        return top, theta, theta_inv
    rho, body = pull_run(s)
    flat, th, th_inv = strictify(body)
    whole = cat.compose_all(rho, s.ref)
    top = Pull(whole, flat)
    idc = cat.identity(s.ref)
    theta = RDiv(_lmult_seq(rho, th), idc, whole)
    theta_inv = _rdiv_seq(LMult(whole, th_inv), idc, rho)
    return top, theta, theta_inv


def collapse(d: Derivation) -> Derivation:
    """``theta_S^-1 . d . theta_T``: the same arrow between collapsed formulas."""
    j = d.judgment
    _, _, inv = strictify(j.lhs)
    _, th, _ = strictify(j.rhs)
    return cut(cut(inv, d), th)


# ---------------------------------------------------------------------------
# exhaustive proof search in the plain calculus


def all_derivations(s: Formula, h: Arrow, t: Formula) -> list[Derivation]:
    """Every derivation of ``S |-_h T`` (finite by the subformula property)."""
    memo: dict[tuple, list[Derivation]] = {}

    def go(s: Formula, h: Arrow, t: Formula) -> list[Derivation]:
        key = (s, h, t)
        if key in memo:
            return memo[key]
        out: list[Derivation] = []
        cat = h.cat
        if isinstance(s, Atom) and isinstance(t, Atom):
            out.extend(Ax(d, h, s.p) for d in s.p.lifts(s.obj, t.obj, h))
        if isinstance(s, Push):
            out.extend(LDiv(s.arrow, h, d) for d in go(s.body, s.arrow.then(h), t))
        if isinstance(t, Pull):
            out.extend(RDiv(d, h, t.arrow) for d in go(s, h.then(t.arrow), t.body))
        if isinstance(t, Push):
            for h2 in cat.right_divisors(h, t.arrow):
                out.extend(RMult(d, t.arrow) for d in go(s, h2, t.body))
        if isinstance(s, Pull):
            for h2 in cat.left_divisors(s.arrow, h):
                out.extend(LMult(s.arrow, d) for d in go(s.body, h2, t))
        memo[key] = out
        return out

    return go(s, h, t)


def permeq_classes(derivations: Sequence[Derivation], node_budget: int = DEFAULT_BUDGET) -> list[list[Derivation]]:
    """Partition derivations of one sequent into permutation classes."""
    remaining = list(dict.fromkeys(derivations))
    classes: list[list[Derivation]] = []
    assigned: set[Derivation] = set()
    for d in remaining:
        if d in assigned:
            continue
        cls = permeq_class(d, node_budget)
        assigned |= cls
        classes.append([x for x in remaining if x in cls])
    return classes


# ---------------------------------------------------------------------------
# S-expressions

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_sexpr(text: str):
    tokens = _TOKEN.findall(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise IllFormed("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(read())
            if pos >= len(tokens):
                raise IllFormed("missing ')'")
            pos += 1
            return items
        if tok == ")":
            raise IllFormed("unexpected ')'")
        return tok

    tree = read()
    if pos != len(tokens):
        raise IllFormed("trailing input after expression")
    return tree


def _expect(tree, head: str, arity: int) -> None:
    if not isinstance(tree, list) or len(tree) != arity + 1 or tree[0] != head:
        raise IllFormed(f"expected ({head} ...) with {arity} arguments, got {tree!r}")


def formula_from_tree(tree, sig: Signature) -> Formula:
    if not isinstance(tree, list) or not tree:
        raise IllFormed(f"not a formula: {tree!r}")
    head = tree[0]
    if head == "atom":
        _expect(tree, "atom", 1)
        return sig.atom(sig.domain.parse_object(tree[1]))
    if head in ("push", "pull"):
        _expect(tree, head, 2)
        arrow = sig.base.parse_arrow(tree[1])
        body = formula_from_tree(tree[2], sig)
        return sig.push(arrow, body) if head == "push" else sig.pull(arrow, body)
    raise IllFormed(f"unknown formula constructor {head!r}")


def parse_formula(text: str, sig: Signature) -> Formula:
    return formula_from_tree(parse_sexpr(text), sig)


def format_formula(s: Formula) -> str:
    if isinstance(s, Atom):
        return f"(atom {s.obj})"
    tag = "push" if isinstance(s, Push) else "pull"
    return f"({tag} {s.arrow} {format_formula(s.body)})"


def derivation_from_tree(tree, sig: Signature) -> Derivation:
    if not isinstance(tree, list) or not tree:
        raise IllFormed(f"not a derivation: {tree!r}")
    head, base = tree[0], sig.base
    if head == "ax":
        _expect(tree, "ax", 1)
        return sig.ax(sig.domain.parse_arrow(tree[1]))
    if head == "ldiv":
        _expect(tree, "ldiv", 3)
        return LDiv(base.parse_arrow(tree[1]), base.parse_arrow(tree[2]), derivation_from_tree(tree[3], sig))
    if head == "rmult":
        _expect(tree, "rmult", 2)
        return RMult(derivation_from_tree(tree[1], sig), base.parse_arrow(tree[2]))
    if head == "lmult":
        _expect(tree, "lmult", 2)
        return LMult(base.parse_arrow(tree[1]), derivation_from_tree(tree[2], sig))
    if head == "rdiv":
        _expect(tree, "rdiv", 3)
        return RDiv(derivation_from_tree(tree[1], sig), base.parse_arrow(tree[2]), base.parse_arrow(tree[3]))
    raise IllFormed(f"unknown derivation constructor {head!r}")


def parse_derivation(text: str, sig: Signature) -> Derivation:
    return derivation_from_tree(parse_sexpr(text), sig)


def format_derivation(d: Derivation) -> str:
    if isinstance(d, Ax):
        return f"(ax {d.delta})"
    if isinstance(d, LDiv):
        return f"(ldiv {d.f} {d.g} {format_derivation(d.body)})"
    if isinstance(d, RMult):
        return f"(rmult {format_derivation(d.body)} {d.f})"
    if isinstance(d, LMult):
        return f"(lmult {d.g} {format_derivation(d.body)})"
    return f"(rdiv {format_derivation(d.body)} {d.f} {d.g})"
