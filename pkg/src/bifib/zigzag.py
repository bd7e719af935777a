"""Derivations as stacks of generating double cells.

Every inference rule is a double cell with tight (horizontal) arrows on top
and bottom and a zigzag step on one side:

=====  ===========  ======  =======  ====================
kind   parameters   top     bottom   side
=====  ===========  ======  =======  ====================
L⊳     ``(f, g)``   ``fg``  ``g``    left, ``f`` downward
R⊳     ``(f', f)``  ``f'``  ``f'f``  right, ``f`` downward
L⊲     ``(g, g')``  ``g'``  ``gg'``  left, ``g`` upward
R⊲     ``(f, g)``   ``fg``  ``f``    right, ``g`` upward
=====  ===========  ======  =======  ====================

A :class:`Stack` lists cells from the top (next to the axiom) down to the
root.  Acting with a stack on a derivation stacks the cells underneath it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from xml.etree import ElementTree as ET

from .base import Arrow, Category, FunctorDef
from .core import Atom, Ax, Derivation, Formula, LDiv, LMult, Pull, Push, RDiv, RMult
from .errors import BoundaryMismatch, IllFormed

LPUSH, RPUSH, LPULL, RPULL = "L⊳", "R⊳", "L⊲", "R⊲"
KINDS = (LPUSH, RPUSH, LPULL, RPULL)
_ASCII = {"L>": LPUSH, "R>": RPUSH, "L<": LPULL, "R<": RPULL}
_MIRROR = {LPUSH: LPULL, LPULL: LPUSH, RPUSH: RPULL, RPULL: RPUSH}


@dataclass(frozen=True)
class GenCell:
    kind: str
    a: Arrow
    b: Arrow
    top: Arrow = field(init=False, compare=False)
    bottom: Arrow = field(init=False, compare=False)

    def __post_init__(self):
        kind = _ASCII.get(self.kind, self.kind)
        if kind not in KINDS:
            raise IllFormed(f"unknown cell kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        a, b = self.a, self.b
        if a.cod != b.dom:
            raise IllFormed(f"cell {kind}: {a} and {b} are not composable")
        ab = a.then(b)
        top, bottom = {LPUSH: (ab, b), RPUSH: (a, ab), LPULL: (b, ab), RPULL: (ab, a)}[kind]
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)

    @property
    def side(self) -> str:
        return self.kind[0]

    @property
    def side_arrow(self) -> Arrow:
        """The zigzag step on the cell's non-trivial side."""
        return {LPUSH: self.a, RPUSH: self.b, LPULL: self.a, RPULL: self.b}[self.kind]

    def reflect(self) -> "GenCell":
        return GenCell(_MIRROR[self.kind], self.a, self.b)

    def __str__(self) -> str:
        return f"{self.kind}({self.a}, {self.b})"


@dataclass(frozen=True)
class Stack:
    """Cells from top to bottom, together with the top arrow (needed when empty)."""

    top: Arrow
    cells: tuple[GenCell, ...] = ()

    def __post_init__(self):
        cur = self.top
        for c in self.cells:
            if c.top != cur:
                raise BoundaryMismatch(f"cell {c} expects {c.top} on top, found {cur}")
            cur = c.bottom
        object.__setattr__(self, "cells", tuple(self.cells))

    @property
    def bottom(self) -> Arrow:
        return self.cells[-1].bottom if self.cells else self.top

    def __len__(self) -> int:
        return len(self.cells)

    def boundary(self, side: str) -> list[tuple[str, Arrow]]:
        """Zigzag steps on one side, from top to bottom, as ``('+', f)`` or ``('-', g)``.

        An empty list is the empty zigzag on the corresponding object.
        """
        return [("+" if c.kind in (LPUSH, RPUSH) else "-", c.side_arrow) for c in self.cells if c.side == side]

    def left_zigzag(self) -> Formula:
        return self._zigzag("L", self.top.dom)

    def right_zigzag(self) -> Formula:
        return self._zigzag("R", self.top.cod)

    def _zigzag(self, side: str, obj) -> Formula:
        p = id_functor(self.top.cat)
        z: Formula = Atom(obj, obj, p)
        for sign, arrow in self.boundary(side):
            z = Push(arrow, z) if sign == "+" else Pull(arrow, z)
        return z


@lru_cache(maxsize=None)
def id_functor(cat: Category) -> FunctorDef:
    return FunctorDef.identity(cat)


def cell_of(d: Derivation) -> GenCell:
    """The generating cell of the last rule of ``d``."""
    if isinstance(d, LDiv):
        return GenCell(LPUSH, d.f, d.g)
    if isinstance(d, RMult):
        return GenCell(RPUSH, d.body.judgment.base, d.f)
    if isinstance(d, LMult):
        return GenCell(LPULL, d.g, d.body.judgment.base)
    if isinstance(d, RDiv):
        return GenCell(RPULL, d.f, d.g)
    raise IllFormed("an axiom has no generating cell")


def apply_cell(d: Derivation, c: GenCell) -> Derivation:
    """Stack ``c`` under ``d``."""
    if d.judgment.base != c.top:
        raise BoundaryMismatch(f"{c} expects {c.top} on top, derivation lies over {d.judgment.base}")
    if c.kind == LPUSH:
        return LDiv(c.a, c.b, d)
    if c.kind == RPUSH:
        return RMult(d, c.b)
    if c.kind == LPULL:
        return LMult(c.a, d)
    return RDiv(d, c.a, c.b)


def decompose(d: Derivation) -> tuple[Arrow, Stack]:
    """Split ``d`` into its axiom's ``D``-arrow and the stack of cells under it."""
    cells = []
    while not isinstance(d, Ax):
        cells.append(cell_of(d))
        d = d.body
    cells.reverse()
    return d.delta, Stack(d.over, tuple(cells))


def recompose(delta: Arrow, stack: Stack, p: FunctorDef) -> Derivation:
    if p.on_arrow(delta) != stack.top:
        raise BoundaryMismatch(f"{delta} lies over {p.on_arrow(delta)}, stack starts at {stack.top}")
    return action(Ax(delta, stack.top, p), stack)


def as_derivation(stack: Stack) -> Derivation:
    """The stack as a derivation of the zigzag category (identity functor)."""
    return recompose(stack.top, stack, id_functor(stack.top.cat))


def action(a: Derivation, z: Stack | Derivation) -> Derivation:
    """Substitute ``a`` for the axiom of the zigzag proof ``z``."""
    stack = z if isinstance(z, Stack) else decompose(z)[1]
    if a.judgment.base != stack.top:
        raise BoundaryMismatch(f"derivation over {a.judgment.base} cannot act on a stack starting at {stack.top}")
    for c in stack.cells:
        a = apply_cell(a, c)
    return a


def act_formula(s: Formula, z: Formula) -> Formula:
    """Substitute ``s`` for the atom of the zigzag formula ``z``."""
    if isinstance(z, Atom):
        if z.ref != s.ref:
            raise BoundaryMismatch(f"formula over {s.ref} substituted into a zigzag from {z.ref}")
        return s
    inner = act_formula(s, z.body)
    return Push(z.arrow, inner) if isinstance(z, Push) else Pull(z.arrow, inner)


def vcompose(s1: Stack, s2: Stack) -> Stack:
    if s1.bottom != s2.top:
        raise BoundaryMismatch(f"stack ending at {s1.bottom} cannot be followed by one starting at {s2.top}")
    return Stack(s1.top, s1.cells + s2.cells)


def empty(top: Arrow) -> Stack:
    return Stack(top, ())


def dagger(s: Stack) -> Stack:
    """Reflect the stack upside down, swapping push and pull cells on each side."""
    return Stack(s.bottom, tuple(c.reflect() for c in reversed(s.cells)))


def stack_neighbors(s: Stack) -> list[Stack]:
    """Stacks one adjacent-cell exchange away, per the four generating relations."""
    out = []
    cells = s.cells
    for i in range(len(cells) - 1):
        for pair in _swaps(cells[i], cells[i + 1]):
            out.append(Stack(s.top, cells[:i] + pair + cells[i + 2:]))
    return out


def _swaps(up: GenCell, lo: GenCell) -> list[tuple[GenCell, GenCell]]:
    cat = up.a.cat
    k = (up.kind, lo.kind)
    if k == (LPULL, RPUSH):
        return [(GenCell(RPUSH, up.b, lo.b), GenCell(LPULL, up.a, up.b.then(lo.b)))]
    if k == (RPUSH, LPULL):
        return [(GenCell(LPULL, lo.a, up.a), GenCell(RPUSH, lo.a.then(up.a), up.b))]
    if k == (LPUSH, RPUSH):
        return [(GenCell(RPUSH, up.top, lo.b), GenCell(LPUSH, up.a, up.b.then(lo.b)))]
    if k == (RPUSH, LPUSH):
        f, h = lo.a, up.b
        return [(GenCell(LPUSH, f, g), GenCell(RPUSH, g, h)) for g in cat.fillers(f, up.a, lo.b, h)]
    if k == (RPULL, LPULL):
        return [(GenCell(LPULL, lo.a, up.top), GenCell(RPULL, lo.a.then(up.a), up.b))]
    if k == (LPULL, RPULL):
        f, h = up.a, lo.b
        return [(GenCell(RPULL, g, h), GenCell(LPULL, f, g)) for g in cat.fillers(f, lo.a, up.b, h)]
    if k == (LPUSH, RPULL):
        return [(GenCell(RPULL, up.a.then(lo.a), lo.b), GenCell(LPUSH, up.a, lo.a))]
    if k == (RPULL, LPUSH):
        return [(GenCell(LPUSH, lo.a, lo.b.then(up.b)), GenCell(RPULL, lo.b, up.b))]
    return []


# ---------------------------------------------------------------------------
# rendering


def ladder_rows(s: Stack, delta: Arrow | None = None) -> list[str]:
    """One line per horizontal arrow, with the cell between consecutive lines."""
    rows = []
    if delta is not None:
        rows.append(_arrow_row(delta, str(delta.dom), str(delta.cod)))
    rows.append(_arrow_row(s.top))
    for c in s.cells:
        rows.append(_arrow_row(c.bottom))
    return rows


def _arrow_row(a: Arrow, dom: str | None = None, cod: str | None = None) -> str:
    return f"{dom if dom is not None else a.dom} --{a}--> {cod if cod is not None else a.cod}"


def _cell_line(c: GenCell) -> str:
    side = f"{'v' if c.kind in (LPUSH, RPUSH) else '^'} {c.side_arrow}"
    left = side if c.side == "L" else "="
    right = side if c.side == "R" else "="
    return f"  {left:<12}{c.kind:^5}{right:>12}"


def render_text(s: Stack, delta: Arrow | None = None) -> str:
    """The two-column ladder: horizontal arrows interleaved with the cells between them."""
    if not s.cells and delta is None:
        return ""
    rows = ladder_rows(s, delta)
    lines = []
    if delta is not None:
        lines.append(rows.pop(0))
    lines.append(rows[0])
    for c, row in zip(s.cells, rows[1:]):
        lines.append(_cell_line(c))
        lines.append(row)
    return "\n".join(lines) + "\n"


def _color(obj) -> str:
    digest = hashlib.sha256(repr(obj).encode()).hexdigest()
    hue = int(digest[:6], 16) % 360
    return f"hsl({hue},55%,82%)"


def render_svg(s: Stack, delta: Arrow | None = None) -> str:
    """String-diagram dual of the stack.

    Each cell becomes a vertex; each side step becomes a wire bending from the
    boundary into that vertex; regions are filled by the object they stand for.
    """
    row_h, width = 60, 240
    n = len(s.cells)
    height = row_h * (n + 2)
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", version="1.1",
                     width=str(width), height=str(height), viewBox=f"0 0 {width} {height}")
    rows = [s.top] + [c.bottom for c in s.cells]
    for i, arrow in enumerate(rows):
        y = row_h * i + row_h // 2
        ET.SubElement(svg, "rect", x="0", y=str(y), width=str(width // 2), height=str(row_h),
                      fill=_color(arrow.dom))
        ET.SubElement(svg, "rect", x=str(width // 2), y=str(y), width=str(width // 2), height=str(row_h),
                      fill=_color(arrow.cod))
        label = ET.SubElement(svg, "text", x=str(width // 2), y=str(y + row_h // 2), fill="black")
        label.set("text-anchor", "middle")
        label.set("font-size", "11")
        label.text = str(arrow)
    if delta is not None:
        node = ET.SubElement(svg, "circle", cx=str(width // 2), cy=str(row_h // 4), r="6", fill="#8a9a8a")
        ET.SubElement(node, "title").text = str(delta)
    for i, c in enumerate(s.cells):
        y = row_h * (i + 1) + row_h // 2
        cx = width // 2
        edge_x = 0 if c.side == "L" else width
        bend = y - row_h // 2 if c.kind in (LPUSH, RPULL) else y + row_h // 2
        ET.SubElement(svg, "path", d=f"M {edge_x} {bend} Q {(edge_x + cx) // 2} {y} {cx} {y}",
                      stroke="black", fill="none")
        vertex = ET.SubElement(svg, "circle", cx=str(cx), cy=str(y), r="5", fill="#e8b33c")
        ET.SubElement(vertex, "title").text = str(c)
    return ET.tostring(svg, encoding="unicode")


def render(s: Stack, fmt: str = "text", delta: Arrow | None = None) -> str:
    if fmt == "text":
        return render_text(s, delta)
    if fmt == "svg":
        return render_svg(s, delta)
    raise ValueError(f"unknown format {fmt!r}")
