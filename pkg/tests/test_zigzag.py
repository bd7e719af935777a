import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from bifib.core import identity, permeq_decide_bfs
from bifib.errors import BoundaryMismatch, IllFormed
from bifib.examples import seed, stack_example
from bifib.zigzag import (
    LPULL,
    LPUSH,
    RPULL,
    RPUSH,
    GenCell,
    Stack,
    act_formula,
    action,
    as_derivation,
    cell_of,
    dagger,
    decompose,
    empty,
    ladder_rows,
    recompose,
    render,
    stack_neighbors,
    vcompose,
)
from bifib.suite import FREE_GRAPHS, free_signature, random_derivation

SIGS = [free_signature(e) for e in FREE_GRAPHS]
seeds = st.integers(0, 2**32 - 1)
slow = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def draw(n: int):
    return random_derivation(random.Random(n), SIGS[n % len(SIGS)])


@pytest.fixture
def fig1():
    sig, d = stack_example()
    delta, stack = decompose(d)
    return sig, d, delta, stack


def test_cell_boundaries():
    c = seed("pomega(3)").base
    a, b = c.between(0, 1), c.between(1, 2)
    ab = a.then(b)
    assert (GenCell(LPUSH, a, b).top, GenCell(LPUSH, a, b).bottom) == (ab, b)
    assert (GenCell(RPUSH, a, b).top, GenCell(RPUSH, a, b).bottom) == (a, ab)
    assert (GenCell(LPULL, a, b).top, GenCell(LPULL, a, b).bottom) == (b, ab)
    assert (GenCell(RPULL, a, b).top, GenCell(RPULL, a, b).bottom) == (ab, a)
    assert GenCell("L>", a, b).kind == LPUSH
    assert GenCell(LPUSH, a, b).reflect() == GenCell(LPULL, a, b)


def test_bad_cells_are_rejected():
    c = seed("pomega(3)").base
    a = c.between(0, 1)
    with pytest.raises(IllFormed):
        GenCell("X>", a, a)
    with pytest.raises(IllFormed):
        GenCell(LPUSH, a, a)
    with pytest.raises(BoundaryMismatch):
        Stack(a, (GenCell(LPUSH, a, c.between(1, 2)),))


def test_axiom_has_no_cell():
    s = seed("p2")
    with pytest.raises(IllFormed):
        cell_of(identity(s.atom()))


def test_stack_example_rows(fig1):
    _, d, delta, stack = fig1
    assert [c.kind for c in stack.cells] == [RPUSH, LPUSH, LPULL, RPULL]
    rows = ladder_rows(stack, delta)
    assert len(rows) == 6
    assert rows[0] == "X --alpha--> Y"
    assert rows[1:] == ["0 --f--> 1", "0 --h--> 2", "1 --g--> 2", "0 --h--> 2", "0 --id@0--> 0"]
    assert recompose(delta, stack, fig1[0].p) == d


def test_stack_example_boundaries(fig1):
    _, _, _, stack = fig1
    assert [s for s, _ in stack.boundary("L")] == ["+", "-"]
    assert [s for s, _ in stack.boundary("R")] == ["+", "-"]
    assert stack.left_zigzag().ref == stack.bottom.dom
    assert stack.right_zigzag().ref == stack.bottom.cod
    assert str(stack.right_zigzag()) == "↑h ↓g 1"


def test_render_formats(fig1):
    _, _, delta, stack = fig1
    text = render(stack, "text", delta)
    assert text.count("\n") >= 6
    svg = ET.fromstring(render(stack, "svg", delta))
    assert svg.tag.endswith("svg")
    with pytest.raises(ValueError):
        render(stack, "png", delta)


def test_recompose_checks_the_top(fig1):
    sig, _, delta, stack = fig1
    with pytest.raises(BoundaryMismatch):
        recompose(delta, Stack(stack.bottom), sig.p)


@slow
@given(seeds)
def test_decompose_then_recompose(n):
    d = draw(n)
    delta, stack = decompose(d)
    assert recompose(delta, stack, SIGS[n % len(SIGS)].p) == d
    assert as_derivation(stack).judgment.base == stack.bottom


@slow
@given(seeds)
def test_dagger_is_an_involution(n):
    _, stack = decompose(draw(n))
    flipped = dagger(stack)
    assert dagger(flipped) == stack
    assert (flipped.top, flipped.bottom) == (stack.bottom, stack.top)
    assert len(flipped) == len(stack)


@slow
@given(seeds)
def test_action_respects_vertical_composition(n):
    d = draw(n)
    delta, stack = decompose(d)
    cut = n % (len(stack) + 1)
    upper = Stack(stack.top, stack.cells[:cut])
    lower = Stack(upper.bottom, stack.cells[cut:])
    a = recompose(delta, empty(stack.top), SIGS[n % len(SIGS)].p)
    assert action(action(a, upper), lower) == action(a, vcompose(upper, lower))
    assert action(a, empty(stack.top)) == a


@slow
@given(seeds)
def test_exchanged_stacks_act_equivalently(n):
    d = draw(n)
    delta, stack = decompose(d)
    a = recompose(delta, empty(stack.top), SIGS[n % len(SIGS)].p)
    for other in stack_neighbors(stack):
        assert (other.top, other.bottom) == (stack.top, stack.bottom)
        assert permeq_decide_bfs(action(a, other), d)


def test_vcompose_and_action_check_boundaries(fig1):
    _, d, _, stack = fig1
    with pytest.raises(BoundaryMismatch):
        vcompose(stack, stack)
    with pytest.raises(BoundaryMismatch):
        action(d, stack)


def test_act_formula_substitutes_the_atom():
    _, stack = decompose(stack_example()[1])
    zig = stack.right_zigzag()
    inner = zig
    while hasattr(inner, "body"):
        inner = inner.body
    assert act_formula(inner, zig) == zig
    with pytest.raises(BoundaryMismatch):
        act_formula(stack.left_zigzag(), zig)
