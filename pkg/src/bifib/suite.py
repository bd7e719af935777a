"""The reproduction suite: one check per acceptance criterion, shared by the CLI and the tests.

Every check returns a :class:`CriterionResult`; a check passes only when
its assertions hold and it finished inside its time limit.
"""

from __future__ import annotations

import functools
import math
import random
import time
from dataclasses import dataclass
from typing import Callable

from .base import Arrow, FreeCat, FunctorDef
from .core import (
    Derivation,
    Formula,
    Pull,
    Push,
    RDiv,
    LDiv,
    LMult,
    RMult,
    Signature,
    all_derivations,
    counit,
    cut,
    identity,
    permeq_classes,
    permeq_decide_bfs,
    unit,
)
from .enumeration import bc_quotient, decide, fiber_poset, homset, poset_analyze
from .examples import (
    TREE_S,
    TREE_T,
    OrdinalTarget,
    TreeTarget,
    ambisimplex_formulas,
    catalan,
    collapse_formula,
    double_factorial,
    encode_tree,
    interpret,
    is_tree_morphism,
    kreweras_intervals,
    monotone_oracle,
    noncrossing_partitions,
    ordinal_formula,
    refines,
    seed,
    tree_morphism_oracle_all,
)
from .focusing import (
    max_search,
    mf_cut,
    multi_of,
    nf_of,
    normalize,
    redexes,
    rewrite_step,
    sequentialize,
    strengthen,
    to_derivation,
    invseq,
    weak_of,
    weight,
    ceil,
)
from .zigzag import dagger, decompose, recompose, action, stack_neighbors, vcompose, Stack

DEFAULT_RNG_SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.title}: {self.detail} ({self.seconds:.1f}s, limit {self.limit:.0f}s)"


class CheckFailed(AssertionError):
    pass


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailed(msg)


def _timed(number: int, title: str, limit: float, body: Callable[[], str]) -> CriterionResult:
    start = time.perf_counter()
    try:
        detail = body()
        ok = True
    except CheckFailed as exc:
        detail, ok = f"failed: {exc}", False
    elapsed = time.perf_counter() - start
    if ok and elapsed > limit:
        ok, detail = False, f"{detail}; over time limit"
    return CriterionResult(number, title, ok, detail, elapsed, limit)


@functools.lru_cache(maxsize=None)
def closed_fiber(n: int):
    return fiber_poset("ambisimplicial", 0, n)


# ---------------------------------------------------------------------------
# criteria 1 to 6: the worked examples


def simplex_counts() -> CriterionResult:
    def body() -> str:
        s = seed("p2")
        idc = s.base.identity(0)
        checked = 0
        for m in range(6):
            for n in range(1, 6):
                got = homset(ordinal_formula(m, s), idc, ordinal_formula(n, s), s.sig).count
                want = math.comb(m + n - 1, m)
                _require(got == want, f"<{m}> -> <{n}>: {got} proofs, expected {want}")
                checked += 1
        return f"{checked} homsets match C(m+n-1, m)"

    return _timed(1, "simplex homset counts", 30, body)


def monotone_bijection() -> CriterionResult:
    def body() -> str:
        s = seed("p2")
        idc = s.base.identity(0)
        target = OrdinalTarget()
        for m in range(5):
            for n in range(5):
                proofs = homset(ordinal_formula(m, s), idc, ordinal_formula(n, s), s.sig).proofs
                images = [interpret(to_derivation(p), target).images for p in proofs]
                _require(len(set(images)) == len(images), f"<{m}> -> <{n}>: interpretation not injective")
                _require(set(images) == set(monotone_oracle(m, n)), f"<{m}> -> <{n}>: image differs from oracle")
        return "interpretation is a bijection onto monotone maps for m, n <= 4"

    return _timed(2, "bijection with monotone maps", 30, body)


def tree_morphisms() -> CriterionResult:
    def body() -> str:
        s = seed("pomega", 3)
        proofs = homset(encode_tree(TREE_S, s), s.base.identity(0), encode_tree(TREE_T, s), s.sig).proofs
        _require(len(proofs) == 11, f"{len(proofs)} proofs, expected 11")
        maps = [interpret(to_derivation(p), TreeTarget()) for p in proofs]
        _require(all(is_tree_morphism(m) for m in maps), "an image is not a natural transformation")
        images = {m.maps for m in maps}
        _require(len(images) == 11, "images are not pairwise distinct")
        _require(images == set(tree_morphism_oracle_all(TREE_S, TREE_T)), "images differ from brute force")
        return "11 proofs, 11 distinct natural transformations, equal to brute force"

    return _timed(3, "tree morphisms", 30, body)


AMBI_CLASSES = (1, 1, 2, 7, 35, 226)


def ambisimplicial_counts() -> CriterionResult:
    def body() -> str:
        start = time.perf_counter()
        for n in range(6):
            s = seed("ambisimplex", max(n, 1))
            formulas = list(ambisimplex_formulas(n, 0, s))
            _require(len(formulas) == double_factorial(n), f"n={n}: {len(formulas)} formulas")
            collapsed = {collapse_formula(f) for f in formulas}
            _require(len(collapsed) == AMBI_CLASSES[n], f"n={n}: {len(collapsed)} collapsed formulas")
            _require(len(closed_fiber(n)) == AMBI_CLASSES[n], f"n={n}: {len(closed_fiber(n))} classes")
            if n == 4:
                small = time.perf_counter() - start
                _require(small < 60, f"n <= 4 took {small:.1f}s, limit 60s")
        return f"formula counts (2n-1)!! and class counts 1,1,2,7,35,226 for n <= 5 (n <= 4 in {small:.1f}s)"

    return _timed(4, "ambisimplicial counts", 15 * 60, body)


F03_COVERS = {("A", "D"), ("A", "F"), ("A", "G"), ("D", "C"), ("G", "B"), ("F", "E"), ("C", "E"), ("B", "E")}


def fiber_structure() -> CriterionResult:
    def body() -> str:
        start = time.perf_counter()
        p3 = closed_fiber(3)
        _require(len(p3) == 7, f"F_0,3 has {len(p3)} elements")
        _require(set(p3.cover_labels()) == F03_COVERS, f"covers {sorted(p3.cover_labels())}")
        small = time.perf_counter() - start
        _require(small < 10, f"F_0,3 took {small:.1f}s, limit 10s")
        p4 = closed_fiber(4)
        _require(len(p4) == 35, f"F_0,4 has {len(p4)} elements")
        report = poset_analyze(p4)
        _require(not report["is_lattice"] and report["failing_pair"] is not None, "F_0,4 reported as a lattice")
        x, y, what = report["failing_pair"]
        return f"F_0,3 covers match; F_0,4 not a lattice: {x}, {y} have no {what}"

    return _timed(5, "fiber poset structure", 5 * 60, body)


def kreweras_quotient() -> CriterionResult:
    def body() -> str:
        for n in range(6):
            q = bc_quotient(closed_fiber(n))
            _require(len(q) == catalan(n) == len(noncrossing_partitions(n)), f"n={n}: {len(q)} elements")
            if n <= 4:
                count = poset_analyze(q)["interval_count"]
                brute = sum(refines(a, b) for a in noncrossing_partitions(n) for b in noncrossing_partitions(n))
                _require(count == kreweras_intervals(n) == brute, f"n={n}: {count} intervals")
        return "Catalan sizes for n <= 5; interval counts 1,1,3,12,55 for n <= 4"

    return _timed(6, "noncrossing quotient", 15 * 60, body)


# ---------------------------------------------------------------------------
# random derivations over free categories


def free_signature(edges: dict[str, tuple[str, str]]) -> Signature:
    cat = FreeCat(edges)
    return Signature(FunctorDef.identity(cat), name="free")


def _paths_from(cat: FreeCat, x, max_len: int) -> list[Arrow]:
    return [a for y in cat.objects() for a in cat.paths(x, y, max_len)]


def _paths_into(cat: FreeCat, y, max_len: int) -> list[Arrow]:
    return [a for x in cat.objects() for a in cat.paths(x, y, max_len)]


def random_formula(rng: random.Random, sig: Signature, depth: int, ref=None, paired: bool = False) -> Formula:
    """A formula with at most ``depth`` connectives, built from a random atom outward.

    ``paired`` builds pull-after-push pairs along single generators, the
    shape whose homsets hold several distinct proofs.
    """
    cat = sig.base
    obj = rng.choice(list(cat.objects())) if ref is None else ref
    s: Formula = sig.atom(obj)
    if paired:
        for _ in range(rng.randint(0, depth // 2)):
            out = _paths_from(cat, s.ref, 1)
            gens = [a for a in out if not a.is_identity]
            if not gens:
                break
            g = rng.choice(gens)
            s = Pull(g, Push(g, s))
        return s
    for _ in range(rng.randint(0, depth)):
        if rng.random() < 0.5:
            s = Push(rng.choice(_paths_from(cat, s.ref, 2)), s)
        else:
            s = Pull(rng.choice(_paths_into(cat, s.ref, 2)), s)
    return s


def random_derivation(rng: random.Random, sig: Signature, depth: int = 6, lhs: Formula | None = None,
                      tries: int = 200, pool: int = 4) -> Derivation:
    """A random derivation with at most ``depth`` rules.

    Half of the draws use paired formulas over an identity arrow.  Draws
    ``pool`` derivable sequents, keeps the one with the most derivations,
    and picks one of those uniformly.  The bias favours
    sequents where proofs can differ.  With ``lhs`` fixed the draw falls back
    to extending an identity when no random sequent is derivable.
    """
    cat = sig.base
    best: list[Derivation] = []
    seen = 0
    paired = rng.random() < 0.5
    for _ in range(tries):
        left = lhs if lhs is not None else random_formula(rng, sig, depth // 2, paired=paired)
        budget = depth - _connectives(left)
        right = random_formula(rng, sig, max(budget, 0), ref=left.ref if paired else None, paired=paired)
        arrows = cat.paths(left.ref, right.ref, 0 if paired else 3)
        if not arrows:
            continue
        found = all_derivations(left, rng.choice(arrows), right)
        if found:
            seen += 1
            if len(found) > len(best):
                best = found
            if seen >= pool:
                break
    if best:
        return rng.choice(best)
    if lhs is not None:
        return extend_right(rng, identity(lhs), depth)
    raise CheckFailed("could not draw a derivable sequent")


def extend_right(rng: random.Random, d: Derivation, steps: int) -> Derivation:
    """Stack up to ``steps`` random right rules under ``d``, keeping its left formula."""
    cat = d.judgment.base.cat
    for _ in range(rng.randint(1, max(steps, 1))):
        j = d.judgment
        if rng.random() < 0.5:
            d = RMult(d, rng.choice(_paths_from(cat, j.rhs.ref, 2)))
            continue
        splits = [(f, g) for g in _paths_into(cat, j.base.cod, 2) for f in cat.right_divisors(j.base, g)]
        f, g = rng.choice(splits)
        d = RDiv(d, f, g)
    return d


def _connectives(s: Formula) -> int:
    n = 0
    while hasattr(s, "body"):
        s, n = s.body, n + 1
    return n


FREE_GRAPHS = (
    {"a": ("x", "x"), "b": ("x", "x")},
    {"a": ("x", "y"), "b": ("y", "x")},
    {"a": ("x", "y"), "b": ("y", "z"), "c": ("x", "z")},
)


def equiv(a: Derivation, b: Derivation) -> bool:
    return permeq_decide_bfs(a, b)


def soundness_case(rng: random.Random, sig: Signature) -> list[str]:
    """All rewriting and composition invariants on one random draw; returns the failures."""
    bad: list[str] = []
    a = random_derivation(rng, sig)
    j = a.judgment

    m = multi_of(a)
    cur = m
    while True:
        reds = redexes(cur)
        for rule, pos in reds:
            nxt = rewrite_step(cur, rule, pos)
            if weight(nxt) >= weight(cur):
                bad.append(f"{rule} at {pos} does not lower the weight")
        if not reds:
            break
        cur = rewrite_step(cur, *reds[0])

    if normalize(m, "bottom-up") != normalize(m, "top-down"):
        bad.append("normalization strategies disagree")

    peers = all_derivations(j.lhs, j.base, j.rhs)
    other = rng.choice(peers)
    if decide(a, other)[0] != permeq_decide_bfs(a, other):
        bad.append("normal-form decision disagrees with breadth-first search")

    ia, ib = identity(j.lhs), identity(j.rhs)
    if not (equiv(cut(ia, a), a) and equiv(cut(a, ib), a)):
        bad.append("identity is not neutral for cut")
    b = random_derivation(rng, sig, 4, lhs=j.rhs, tries=20)
    c = random_derivation(rng, sig, 4, lhs=b.judgment.rhs, tries=20)
    if not equiv(cut(cut(a, b), c), cut(a, cut(b, c))):
        bad.append("cut is not associative")
    if mf_cut(nf_of(a), nf_of(b)) != nf_of(cut(a, b)):
        bad.append("multifocused cut disagrees with plain cut")

    for f in _paths_from(sig.base, j.lhs.ref, 1)[:2]:
        push = Push(f, j.lhs)
        left = LDiv(f, f.cat.identity(f.cod), RMult(unit(f, j.lhs), f))
        if not equiv(cut(left, counit(f, push)), identity(push)):
            bad.append("triangle identity fails for a push")
    for g in _paths_into(sig.base, j.rhs.ref, 1)[:2]:
        pull = Pull(g, j.rhs)
        right = RDiv(LMult(g, counit(g, j.rhs)), g.cat.identity(g.dom), g)
        if not equiv(cut(unit(g, pull), right), identity(pull)):
            bad.append("triangle identity fails for a pull")

    delta, stack = decompose(a)
    if recompose(delta, stack, sig.p) != a:
        bad.append("decompose/recompose does not round-trip")
    if dagger(dagger(stack)) != stack:
        bad.append("dagger is not an involution")
    k = rng.randint(0, len(stack.cells))
    upper, lower = Stack(stack.top, stack.cells[:k]), Stack(stack.top, stack.cells[:k]).bottom
    lower_stack = Stack(lower, stack.cells[k:])
    base_proof = recompose(delta, Stack(stack.top, ()), sig.p)
    if action(action(base_proof, upper), lower_stack) != action(base_proof, vcompose(upper, lower_stack)):
        bad.append("action does not respect vertical composition")
    for nb in stack_neighbors(stack):
        if not equiv(action(base_proof, nb), a):
            bad.append("exchanged stack acts inequivalently")
            break

    w = weak_of(a)
    if not equiv(ceil(invseq(strengthen(w))), ceil(w)):
        bad.append("invseq after strengthen is not equivalent")
    for x in sequentialize(m, "inv"):
        if strengthen(x) != m:
            bad.append("strengthen after sequentialize does not return the proof")
            break
    return bad


def rewriting_soundness(cases: int = 500, rng_seed: int = DEFAULT_RNG_SEED) -> CriterionResult:
    def body() -> str:
        rng = random.Random(rng_seed)
        sigs = [free_signature(e) for e in FREE_GRAPHS]
        failures: list[str] = []
        for i in range(cases):
            problems = soundness_case(rng, sigs[i % len(sigs)])
            failures += [f"case {i}: {p}" for p in problems]
        _require(not failures, "; ".join(failures[:5]) + (f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""))
        return f"{cases} random derivations, zero failures"

    return _timed(7, "rewriting soundness", 5 * 60, body)


MICRO_GRAPHS = (
    {"a": ("x", "x")},
    {"a": ("x", "y")},
    {"a": ("x", "x"), "b": ("x", "x")},
    {"a": ("x", "y"), "b": ("x", "y")},
    {"a": ("x", "y"), "b": ("y", "z")},
    {"a": ("x", "y"), "b": ("y", "x")},
    {"a": ("x", "y"), "b": ("y", "z"), "c": ("x", "z")},
    {"a": ("x", "x"), "b": ("x", "y"), "c": ("y", "y")},
)


def generator_formulas(sig: Signature, depth: int) -> list[Formula]:
    """Every formula with at most ``depth`` pushes and pulls along single generators."""
    cat = sig.base
    out: list[Formula] = []

    def rec(s: Formula, left: int) -> None:
        out.append(s)
        if not left:
            return
        for y in cat.objects():
            for a in cat.paths(s.ref, y, 1):
                if not a.is_identity:
                    rec(Push(a, s), left - 1)
            for a in cat.paths(y, s.ref, 1):
                if not a.is_identity:
                    rec(Pull(a, s), left - 1)

    for x in cat.objects():
        rec(sig.atom(x), depth)
    return out


def maximality_correspondence(depth: int = 3, path_len: int = 2) -> CriterionResult:
    def body() -> str:
        checked = several = 0
        for edges in MICRO_GRAPHS:
            sig = free_signature(edges)
            formulas = generator_formulas(sig, depth)
            for s in formulas:
                for t in formulas:
                    for h in sig.base.paths(s.ref, t.ref, path_len):
                        maximal = len(list(max_search(s, h, t)))
                        classes = len(permeq_classes(all_derivations(s, h, t)))
                        _require(maximal == classes,
                                 f"{s} |-_{h} {t}: {maximal} maximal proofs, {classes} classes")
                        checked += 1
                        several += maximal > 1
        return f"{checked} sequents over {len(MICRO_GRAPHS)} graphs agree, {several} with several proofs"

    return _timed(8, "maximality correspondence", 2 * 60, body)


CRITERIA: tuple[Callable[..., CriterionResult], ...] = (
    simplex_counts,
    monotone_bijection,
    tree_morphisms,
    ambisimplicial_counts,
    fiber_structure,
    kreweras_quotient,
    rewriting_soundness,
    maximality_correspondence,
)


def run_all(rng_seed: int = DEFAULT_RNG_SEED) -> list[CriterionResult]:
    out = []
    for check in CRITERIA:
        if check is rewriting_soundness:
            out.append(check(rng_seed=rng_seed))
        else:
            out.append(check())
    return out
