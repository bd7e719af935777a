"""Homsets, equality of proofs, logical equivalence and fiber posets.

On a factorization-preordered base every arrow of the free bifibration has
exactly one maximally multifocused proof, so ``homset`` is a plain proof
search and ``decide_equal`` compares normal forms.  Elsewhere both fall
back to breadth-first search over permutation classes, bounded by the
``BIFIB_BUDGET`` environment variable.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import networkx as nx

from .base import Arrow
from .core import (
    DEFAULT_BUDGET,
    Derivation,
    Formula,
    Signature,
    all_derivations,
    cut,
    format_formula,
    identity,
    permeq_classes,
    permeq_decide_bfs,
)
from .errors import IllFormed, UndecidableConfiguration
from .examples import (
    ambisimplex_formulas,
    ambisimplex_labels,
    collapse_formula,
    partition_of_formula,
    seed,
)
from .focusing import MDiv, entails, max_search, nf_of


def budget() -> int:
    """Node budget for breadth-first searches, read from ``BIFIB_BUDGET``."""
    raw = os.environ.get("BIFIB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise IllFormed(f"BIFIB_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise IllFormed("BIFIB_BUDGET must be positive")
    return value


def _is_fp(h: Arrow, sig: Signature | None) -> bool:
    if sig is not None:
        return sig.is_fp()
    return bool(h.cat.fp_classes)


# ---------------------------------------------------------------------------
# homsets


@dataclass
class HomsetResult:
    """The arrows ``S -> T`` over ``f``.

    ``proofs`` holds maximal multifocused proofs when ``mode`` is
    ``"max-search"``, and one plain derivation per permutation class when it
    is ``"bfs"``.
    """

    proofs: list
    mode: str
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.proofs)

    def __len__(self) -> int:
        return len(self.proofs)

    def __iter__(self):
        return iter(self.proofs)


def homset(s: Formula, f: Arrow, t: Formula, sig: Signature | None = None) -> HomsetResult:
    if _is_fp(f, sig):
        memo: dict = {}
        proofs = list(dict.fromkeys(max_search(s, f, t, memo=memo)))
        return HomsetResult(proofs, "max-search", {"memo_entries": len(memo)})
    derivations = all_derivations(s, f, t)
    classes = permeq_classes(derivations, budget())
    return HomsetResult([c[0] for c in classes], "bfs",
                        {"derivations": len(derivations), "classes": len(classes)})


# ---------------------------------------------------------------------------
# equality and equivalence


def decide(a: Derivation, b: Derivation, sig: Signature | None = None) -> tuple[bool, str]:
    """Whether ``a`` and ``b`` are permutation equivalent, and which procedure decided it."""
    if a.judgment != b.judgment:
        raise IllFormed(f"different judgments: {a.judgment} and {b.judgment}")
    h = a.judgment.base
    if _is_fp(h, sig):
        return nf_of(a) == nf_of(b), "normal-form"
    if h.cat.locally_finite:
        return permeq_decide_bfs(a, b, budget()), "bfs"
    raise UndecidableConfiguration(
        f"{h.cat.name} is neither factorization preordered nor locally finite")


def decide_equal(a: Derivation, b: Derivation, sig: Signature | None = None) -> bool:
    return decide(a, b, sig)[0]


def logical_equiv(s1: Formula, s2: Formula, sig: Signature | None = None
                  ) -> tuple[Derivation, Derivation] | None:
    """A pair ``S1 -> S2 -> S1`` over the identity whose two round trips are identities."""
    if s1.ref != s2.ref:
        raise IllFormed(f"{s1} and {s2} lie over different objects")
    idc = _identity_arrow(s1)
    there = homset(s1, idc, s2, sig)
    if not there.count:
        return None
    back = homset(s2, idc, s1, sig)
    i1, i2 = identity(s1), identity(s2)
    for a in _as_plain(there):
        for b in _as_plain(back):
            if decide_equal(cut(a, b), i1, sig) and decide_equal(cut(b, a), i2, sig):
                return a, b
    return None


def _identity_arrow(s: Formula) -> Arrow:
    cur = s
    while hasattr(cur, "body"):
        cur = cur.body
    return cur.p.target.identity(s.ref)


def _as_plain(r: HomsetResult) -> list[Derivation]:
    from .focusing import to_derivation

    return [to_derivation(p) if isinstance(p, MDiv) else p for p in r.proofs]


# ---------------------------------------------------------------------------
# posets


@dataclass
class FiberPoset:
    """A finite poset with ``leq[i][j]`` meaning element ``i`` is below element ``j``."""

    elements: list[Any]
    labels: list[str]
    leq: list[list[bool]]

    def __post_init__(self):
        n = len(self.elements)
        if len(self.labels) != n or len(self.leq) != n or any(len(r) != n for r in self.leq):
            raise IllFormed("poset matrix does not match its elements")

    def __len__(self) -> int:
        return len(self.elements)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self)))
        g.add_edges_from((i, j) for i, row in enumerate(self.leq) for j, v in enumerate(row) if v and i != j)
        return g

    @property
    def covers(self) -> list[tuple[int, int]]:
        return sorted(nx.transitive_reduction(self.graph()).edges)

    def cover_labels(self) -> list[tuple[str, str]]:
        return [(self.labels[i], self.labels[j]) for i, j in self.covers]

    def check(self) -> None:
        """Raise unless the matrix is reflexive, antisymmetric and transitive."""
        n = len(self)
        for i in range(n):
            if not self.leq[i][i]:
                raise IllFormed(f"{self.labels[i]} is not below itself")
            for j in range(n):
                if i != j and self.leq[i][j] and self.leq[j][i]:
                    raise IllFormed(f"{self.labels[i]} and {self.labels[j]} are mutually below")
                for k in range(n):
                    if self.leq[i][j] and self.leq[j][k] and not self.leq[i][k]:
                        raise IllFormed("order is not transitive")

    def to_dot(self) -> str:
        lines = ["digraph hasse {", "  rankdir=BT;"]
        for i, lab in enumerate(self.labels):
            lines.append(f'  n{i} [label="{lab}"];')
        for i, j in self.covers:
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + self.labels)
        for lab, row in zip(self.labels, self.leq):
            w.writerow([lab] + [int(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "elements": [{"label": lab, "value": _show(e)} for lab, e in zip(self.labels, self.elements)],
            "covers": self.cover_labels(),
        }, indent=2)


def _show(e) -> Any:
    if isinstance(e, tuple):
        return [list(b) for b in e]
    return format_formula(e)


def _label(i: int) -> str:
    out = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        out = chr(ord("A") + r) + out
    return out


def poset_from_relation(elements: Sequence[Hashable], labels: Sequence[str], leq) -> FiberPoset:
    n = len(elements)
    matrix = [[bool(leq(elements[i], elements[j])) for j in range(n)] for i in range(n)]
    return FiberPoset(list(elements), list(labels), matrix)


def fiber_poset(kind: str, k: int, n: int) -> FiberPoset:
    """Closed (``k == 0``) or open ambisimplicial formulas with ``n`` leaves over ``k``, up to equivalence.

    Each class is represented by its collapsed, strictly alternating
    formula.  Classes that turn out mutually entailing are merged.
    """
    if kind != "ambisimplicial":
        raise IllFormed(f"unknown fiber kind {kind!r}")
    s = seed("ambisimplex", max(n, k, 1))
    idc = s.base.identity(k)
    reps = sorted({collapse_formula(f) for f in ambisimplex_formulas(n, k, s)}, key=format_formula)
    memo: dict = {}
    below = [[i == j or entails(a, idc, b, memo) for j, b in enumerate(reps)] for i, a in enumerate(reps)]
    # quotient by mutual entailment, keeping the first representative
    keep: list[int] = []
    for i in range(len(reps)):
        if not any(below[i][j] and below[j][i] for j in keep):
            keep.append(i)
    reps = [reps[i] for i in keep]
    matrix = [[below[i][j] for j in keep] for i in keep]
    labels = _labels_for(reps, n, k)
    return FiberPoset(reps, labels, matrix)


def _labels_for(reps: list[Formula], n: int, k: int) -> list[str]:
    if (n, k) == (3, 0):
        named = {v: key for key, v in ambisimplex_labels(seed("ambisimplex", 3)).items()}
        return [named[r] for r in reps]
    return [_label(i) for i in range(len(reps))]


def poset_analyze(p: FiberPoset) -> dict[str, Any]:
    """Lattice check by brute force, plus the number of pairs ``x <= y``."""
    n = len(p)
    le = p.leq
    witness = None

    def extreme(cands: list[int], upper: bool) -> int | None:
        for c in cands:
            if all((le[c][d] if upper else le[d][c]) for d in cands):
                return c
        return None

    for i in range(n):
        for j in range(i + 1, n):
            ups = [z for z in range(n) if le[i][z] and le[j][z]]
            downs = [z for z in range(n) if le[z][i] and le[z][j]]
            if extreme(ups, True) is None:
                witness = (p.labels[i], p.labels[j], "join")
            elif extreme(downs, False) is None:
                witness = (p.labels[i], p.labels[j], "meet")
            if witness:
                break
        if witness:
            break
    return {
        "is_lattice": witness is None,
        "interval_count": sum(v for row in le for v in row),
        "failing_pair": witness,
    }


def bc_quotient(p: FiberPoset) -> FiberPoset:
    """Merge elements with the same noncrossing partition and take the induced order."""
    parts = [partition_of_formula(e) for e in p.elements]
    distinct = sorted(set(parts), key=lambda q: (-len(q), q))
    index = {q: i for i, q in enumerate(distinct)}
    g = nx.DiGraph()
    g.add_nodes_from(range(len(distinct)))
    for i, row in enumerate(p.leq):
        for j, v in enumerate(row):
            if v:
                g.add_edge(index[parts[i]], index[parts[j]])
    closure = nx.transitive_closure(g, reflexive=True)
    m = len(distinct)
    matrix = [[closure.has_edge(i, j) for j in range(m)] for i in range(m)]
    labels = ["|".join("".join(map(str, b)) for b in q) or "∅" for q in distinct]
    return FiberPoset(distinct, labels, matrix)
