"""Focused proof systems and normal forms.

Three calculi live here.

*Weakly focused* derivations handle a whole run of pushes (or pulls) in one
step.  Each one has two readings: ``ceil`` expands a run into one small step
per arrow, and ``floor`` collapses it into a single step on the composite.

*Multifocused* derivations (``MAtom``, ``MDiv``, ``MFocus``) have a fixed
shape.  The root is an inversion node ``MDiv(pi, f, rho, body)``.  Either side
of it may be empty.  Above the root sits a stack of *bipoles*.  A bipole is a
focus ``MFocus(sigma, child, tau)`` together with the inversion node that
follows it.  The stack ends with an axiom.  A bipole is ``L``, ``R`` or
``LR`` depending on which of ``sigma``/``tau`` are non-empty.

Normal forms are reached by the parallelization and gravitation rewrites.
They are also enumerated directly by the lock-state search :func:`max_search`.

Arrow sequences are tuples.  A push run ``pi`` is listed innermost first, so
``push_seq(pi, N)`` pushes along ``pi[0]`` first.  A pull run ``rho`` is listed
outermost first, so ``pull_seq(rho, P)`` has ``rho[0]`` on the outside.  In
both cases the composite of the sequence is taken in list order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .base import Arrow, FunctorDef
from .core import (
    Atom,
    Ax,
    Derivation,
    Formula,
    Judgment,
    LDiv,
    LMult,
    Pull,
    Push,
    RDiv,
    RMult,
    Signature,
    _Node,
    collapse,
    is_strictly_alternating,
    pull_run,
    pull_seq,
    push_run,
    push_seq,
    strictify,
)
from .errors import FPViolation, IllFormed, NonComposable, NotFP, NotStrictlyAlternating

Seq = tuple  # tuple[Arrow, ...]


def _comp(seq: Sequence[Arrow], anchor: Arrow, at_dom: bool) -> Arrow:
    """Composite of ``seq``; an empty sequence gives the identity at ``anchor``'s domain or codomain."""
    if seq:
        out = seq[0]
        for a in seq[1:]:
            out = out.then(a)
        return out
    return anchor.cat.identity(anchor.dom if at_dom else anchor.cod)


# ---------------------------------------------------------------------------
# weakly focused derivations


@dataclass(frozen=True, eq=True)
class WAtom(_Node):
    delta: Arrow
    over: Arrow
    p: FunctorDef = field(repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.delta, self.over)
        object.__setattr__(self, "judgment", Ax(self.delta, self.over, self.p).judgment)


@dataclass(frozen=True, eq=True)
class WLDiv(_Node):
    """``Push_pi N |-_g T`` from ``N |-_{|pi| g} T``."""

    pi: Seq
    g: Arrow
    body: "WeakDerivation"
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.pi, self.g, self.body)
        j = self.body.judgment
        if not self.pi or isinstance(j.lhs, Push):
            raise IllFormed("weak left division must strip a maximal non-empty push run")
        if _comp(self.pi, self.g, True).then(self.g) != j.base:
            raise IllFormed("weak left division: arrows do not match")
        object.__setattr__(self, "judgment", Judgment(push_seq(self.pi, j.lhs), self.g, j.rhs))


@dataclass(frozen=True, eq=True)
class WRMult(_Node):
    body: "WeakDerivation"
    pi: Seq
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.body, self.pi)
        j = self.body.judgment
        if not self.pi or isinstance(j.rhs, Push):
            raise IllFormed("weak right multiplication must add a maximal non-empty push run")
        base = j.base.then(_comp(self.pi, j.base, False))
        object.__setattr__(self, "judgment", Judgment(j.lhs, base, push_seq(self.pi, j.rhs)))


@dataclass(frozen=True, eq=True)
class WLMult(_Node):
    sigma: Seq
    body: "WeakDerivation"
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.sigma, self.body)
        j = self.body.judgment
        if not self.sigma or isinstance(j.lhs, Pull):
            raise IllFormed("weak left multiplication must add a maximal non-empty pull run")
        base = _comp(self.sigma, j.base, True).then(j.base)
        object.__setattr__(self, "judgment", Judgment(pull_seq(self.sigma, j.lhs), base, j.rhs))


@dataclass(frozen=True, eq=True)
class WRDiv(_Node):
    """``S |-_f Pull_rho P`` from ``S |-_{f |rho|} P``."""

    body: "WeakDerivation"
    f: Arrow
    rho: Seq
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.body, self.f, self.rho)
        j = self.body.judgment
        if not self.rho or isinstance(j.rhs, Pull):
            raise IllFormed("weak right division must strip a maximal non-empty pull run")
        if self.f.then(_comp(self.rho, self.f, False)) != j.base:
            raise IllFormed("weak right division: arrows do not match")
        object.__setattr__(self, "judgment", Judgment(j.lhs, self.f, pull_seq(self.rho, j.rhs)))


WeakDerivation = Union[WAtom, WLDiv, WRMult, WLMult, WRDiv]


def ceil(w: WeakDerivation) -> Derivation:
    """Expand every run step into one plain rule per arrow."""
    from .core import _ldiv_seq, _lmult_seq, _rdiv_seq, _rmult_seq

    if isinstance(w, WAtom):
        return Ax(w.delta, w.over, w.p)
    if isinstance(w, WLDiv):
        return _ldiv_seq(w.pi, w.g, ceil(w.body))
    if isinstance(w, WRMult):
        return _rmult_seq(ceil(w.body), w.pi)
    if isinstance(w, WLMult):
        return _lmult_seq(w.sigma, ceil(w.body))
    return _rdiv_seq(ceil(w.body), w.f, w.rho)


def floor(w: WeakDerivation) -> Derivation:
    """Replace every run step by a single plain rule on the composite arrow."""
    if isinstance(w, WAtom):
        return Ax(w.delta, w.over, w.p)
    if isinstance(w, WLDiv):
        return LDiv(_comp(w.pi, w.g, True), w.g, floor(w.body))
    if isinstance(w, WRMult):
        return RMult(floor(w.body), _comp(w.pi, w.body.judgment.base, False))
    if isinstance(w, WLMult):
        return LMult(_comp(w.sigma, w.body.judgment.base, True), floor(w.body))
    return RDiv(floor(w.body), w.f, _comp(w.rho, w.f, False))


def weak_views(x):
    """``(ceil, floor)`` readings of a formula or of a weakly focused derivation."""
    if isinstance(x, (Atom, Push, Pull)):
        return x, strictify(x)[0]
    return ceil(x), floor(x)


def weak_preimage(d: Derivation, lhs: Formula | None = None, rhs: Formula | None = None) -> WeakDerivation:
    """The unique weak derivation whose ``floor`` is ``d``.

    ``d`` must involve strictly alternating formulas only.  ``lhs``/``rhs``
    optionally give uncollapsed formulas whose collapse is ``d``'s sequent; their
    runs then become the runs of the result.  By default each composite arrow
    is a one-element run.
    """
    j = d.judgment
    lhs = j.lhs if lhs is None else lhs
    rhs = j.rhs if rhs is None else rhs
    for s in (j.lhs, j.rhs):
        if not is_strictly_alternating(s):
            raise NotStrictlyAlternating(f"{s} is not strictly alternating")
    if strictify(lhs)[0] != j.lhs or strictify(rhs)[0] != j.rhs:
        raise IllFormed("supplied formulas do not collapse to the derivation's sequent")
    return _preimage(d, lhs, rhs)


def _preimage(d: Derivation, lhs: Formula, rhs: Formula) -> WeakDerivation:
    if isinstance(d, Ax):
        return WAtom(d.delta, d.over, d.p)
    if isinstance(d, LDiv):
        pi, n = push_run(lhs)
        return WLDiv(pi, d.g, _preimage(d.body, n, rhs))
    if isinstance(d, RMult):
        pi, n = push_run(rhs)
        return WRMult(_preimage(d.body, lhs, n), pi)
    if isinstance(d, LMult):
        sigma, p = pull_run(lhs)
        return WLMult(sigma, _preimage(d.body, p, rhs))
    rho, p = pull_run(rhs)
    return WRDiv(_preimage(d.body, lhs, p), d.f, rho)


def weak_identity(s: Formula) -> WeakDerivation:
    if isinstance(s, Atom):
        return WAtom(s.p.source.identity(s.obj), s.p.target.identity(s.ref), s.p)
    idc = s.arrow.cat.identity(s.ref)
    if isinstance(s, Push):
        pi, n = push_run(s)
        return WLDiv(pi, idc, WRMult(weak_identity(n), pi))
    rho, p = pull_run(s)
    return WRDiv(WLMult(rho, weak_identity(p)), idc, rho)


def weak_cut(a: WeakDerivation, b: WeakDerivation) -> WeakDerivation:
    """Cut in the weakly focused calculus, with the same case order as plain cut."""
    if a.judgment.rhs != b.judgment.lhs:
        raise NonComposable("weak cut on mismatched formulas")
    return _wcut(a, b)


def _wcut(a: WeakDerivation, b: WeakDerivation) -> WeakDerivation:
    if isinstance(a, WLMult):
        return WLMult(a.sigma, _wcut(a.body, b))
    if isinstance(a, WLDiv):
        return WLDiv(a.pi, a.g.then(b.judgment.base), _wcut(a.body, b))
    if isinstance(b, WRMult):
        return WRMult(_wcut(a, b.body), b.pi)
    if isinstance(b, WRDiv):
        return WRDiv(_wcut(a, b.body), a.judgment.base.then(b.f), b.rho)
    if isinstance(a, WAtom) and isinstance(b, WAtom):
        return WAtom(a.delta.then(b.delta), a.over.then(b.over), a.p)
    if isinstance(a, WRMult) and isinstance(b, WLDiv):
        return _wcut(a.body, b.body)
    if isinstance(a, WRDiv) and isinstance(b, WLMult):
        return _wcut(a.body, b.body)
    raise NonComposable(f"no weak cut case for {type(a).__name__} against {type(b).__name__}")


# ---------------------------------------------------------------------------
# multifocused derivations


def _neutral(j: Judgment) -> bool:
    return not isinstance(j.lhs, Push) and not isinstance(j.rhs, Pull)


@dataclass(frozen=True, eq=True)
class MAtom(_Node):
    delta: Arrow
    over: Arrow
    p: FunctorDef = field(repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.delta, self.over)
        object.__setattr__(self, "judgment", Ax(self.delta, self.over, self.p).judgment)

    kind = "atom"


@dataclass(frozen=True, eq=True)
class MDiv(_Node):
    """Inversion ``Push_pi N |-_f Pull_rho P`` from a neutral ``N |-_{|pi| f |rho|} P``.

    ``pi`` and ``rho`` are the full outer runs and may be empty.
    """

    pi: Seq
    f: Arrow
    rho: Seq
    body: "Neutral"
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.pi, self.f, self.rho, self.body)
        if not isinstance(self.body, (MAtom, MFocus)):
            raise IllFormed("an inversion node must sit on a focus or an axiom")
        j = self.body.judgment
        m = _comp(self.pi, self.f, True).then(self.f).then(_comp(self.rho, self.f, False))
        if m != j.base:
            raise IllFormed(f"inversion arrows compose to {m}, premise lies over {j.base}")
        object.__setattr__(self, "judgment", Judgment(push_seq(self.pi, j.lhs), self.f, pull_seq(self.rho, j.rhs)))

    @property
    def kind(self) -> str:
        if self.pi and self.rho:
            return "bidiv"
        return "ldiv" if self.pi else "rdiv" if self.rho else "inv"


@dataclass(frozen=True, eq=True)
class MFocus(_Node):
    """Focus ``Pull_sigma P |-_{|sigma| g |tau|} Push_tau Q`` from ``body : P |-_g Q``."""

    sigma: Seq
    body: MDiv
    tau: Seq
    _hash: int = field(init=False, repr=False, compare=False)
    judgment: Judgment = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._seal(self.sigma, self.body, self.tau)
        if not isinstance(self.body, MDiv):
            raise IllFormed("a focus must be followed by an inversion node")
        if not (self.sigma or self.tau):
            raise IllFormed("a focus needs a non-empty side")
        j = self.body.judgment
        if self.sigma and isinstance(j.lhs, Pull):
            raise IllFormed("left focus must take the whole pull run")
        if self.tau and isinstance(j.rhs, Push):
            raise IllFormed("right focus must take the whole push run")
        g = j.base
        base = _comp(self.sigma, g, True).then(g).then(_comp(self.tau, g, False))
        out = Judgment(pull_seq(self.sigma, j.lhs), base, push_seq(self.tau, j.rhs))
        if not _neutral(out):
            raise IllFormed("a focus must conclude a neutral sequent")
        object.__setattr__(self, "judgment", out)

    @property
    def kind(self) -> str:
        if self.sigma and self.tau:
            return "bimult"
        return "lmult" if self.sigma else "rmult"


Neutral = Union[MAtom, MFocus]
MultiDerivation = MDiv


@dataclass(frozen=True)
class Bipole:
    """A focus and the inversion right above it, without the rest of the proof."""

    sigma: Seq
    tau: Seq
    pi: Seq
    f: Arrow
    rho: Seq

    @property
    def kind(self) -> str:
        if self.sigma and self.tau:
            return "LR"
        return "L" if self.sigma else "R"


@dataclass(frozen=True)
class Stack:
    """A multifocused proof unpacked into root inversion, bipoles (from the root) and axiom."""

    root: tuple  # (pi, f, rho)
    bipoles: tuple[Bipole, ...]
    atom: MAtom


def unpack(m: MDiv) -> Stack:
    bipoles = []
    root = (m.pi, m.f, m.rho)
    node = m.body
    while isinstance(node, MFocus):
        d = node.body
        bipoles.append(Bipole(node.sigma, node.tau, d.pi, d.f, d.rho))
        node = d.body
    return Stack(root, tuple(bipoles), node)


def pack(stack: Stack) -> MDiv:
    body: Neutral = stack.atom
    for b in reversed(stack.bipoles):
        body = MFocus(b.sigma, MDiv(b.pi, b.f, b.rho, body), b.tau)
    pi, f, rho = stack.root
    return MDiv(pi, f, rho, body)


def bipole_kinds(m: MDiv) -> list[str]:
    return [b.kind for b in unpack(m).bipoles]


def weight(m: MDiv) -> int:
    """Sum over bipoles of (position from the root) times 1 for L/R and 2 for LR."""
    return sum(i * (2 if b.kind == "LR" else 1) for i, b in enumerate(unpack(m).bipoles))


# ---------------------------------------------------------------------------
# strengthening


def strengthen(w: WeakDerivation) -> MDiv:
    """The multifocused proof obtained by inverting eagerly.

    The root inverts every push on the left and every pull on the right.  It
    does this by cutting with the cartesian liftings of those runs.  Focus
    steps are then copied from the weak derivation.
    """
    j = w.judgment
    pi, n = push_run(j.lhs)
    rho, p = pull_run(j.rhs)
    body = w
    if pi:
        body = weak_cut(WRMult(weak_identity(n), pi), body)
    if rho:
        body = weak_cut(body, WLMult(rho, weak_identity(p)))
    return MDiv(pi, j.base, rho, _strengthen_neutral(body))


def _strengthen_neutral(w: WeakDerivation) -> Neutral:
    if isinstance(w, WAtom):
        return MAtom(w.delta, w.over, w.p)
    if isinstance(w, WLMult):
        return MFocus(w.sigma, strengthen(w.body), ())
    if isinstance(w, WRMult):
        return MFocus((), strengthen(w.body), w.pi)
    raise IllFormed(f"{type(w).__name__} cannot conclude a neutral sequent")


# ---------------------------------------------------------------------------
# sequentialization and the rewrite rules


def _seq_rl(b: Bipole) -> tuple[Bipole, Bipole]:
    """``LR`` to ``L`` (below) then ``R`` (above)."""
    lower = Bipole(b.sigma, (), b.pi, b.f.then(_comp(b.tau, b.f, False)), ())
    upper = Bipole((), b.tau, (), _comp(b.pi, b.f, True).then(b.f), b.rho)
    return lower, upper


def _seq_lr(b: Bipole) -> tuple[Bipole, Bipole]:
    """``LR`` to ``R`` (below) then ``L`` (above)."""
    lower = Bipole((), b.tau, (), _comp(b.sigma, b.f, True).then(b.f), b.rho)
    upper = Bipole(b.sigma, (), b.pi, b.f.then(_comp(b.rho, b.f, False)), ())
    return lower, upper


def _unique(candidates: list[Arrow], fp: bool, what: str) -> Arrow | None:
    if not candidates:
        return None
    if len(candidates) > 1 and fp:
        raise FPViolation(f"{what}: {len(candidates)} distinct diagonal fillers")
    return candidates[0]


def _par_rl(lo: Bipole, up: Bipole, fp: bool) -> Bipole | None:
    if lo.kind != "L" or up.kind != "R":
        return None
    k, m = lo.f, up.f
    pi = _comp(lo.pi, m, True)
    tau = _comp(up.tau, k, False)
    e = _unique(k.cat.fillers(pi, m, k, tau), fp, "parallelization")
    return None if e is None else Bipole(lo.sigma, up.tau, lo.pi, e, up.rho)


def _par_lr(lo: Bipole, up: Bipole, fp: bool) -> Bipole | None:
    if lo.kind != "R" or up.kind != "L":
        return None
    k, m = lo.f, up.f
    sigma = _comp(up.sigma, k, True)
    rho = _comp(lo.rho, m, False)
    e = _unique(k.cat.fillers(sigma, k, m, rho), fp, "parallelization")
    return None if e is None else Bipole(up.sigma, lo.tau, up.pi, e, lo.rho)


def _gra_l(lo: Bipole, up: Bipole, fp: bool) -> tuple[Bipole, Bipole] | None:
    if lo.kind != "L" or up.kind != "LR":
        return None
    k1, f = lo.f, up.f
    pi1 = _comp(lo.pi, k1, True)
    top = _comp(up.sigma, f, True).then(f)
    tau2 = _comp(up.tau, f, False)
    g = _unique(f.cat.fillers(pi1, top, k1, tau2), fp, "gravitation")
    if g is None:
        return None
    new_lo = Bipole(lo.sigma, up.tau, lo.pi, g, up.rho)
    new_up = Bipole(up.sigma, (), up.pi, f.then(_comp(up.rho, f, False)), ())
    return new_lo, new_up


def _gra_r(lo: Bipole, up: Bipole, fp: bool) -> tuple[Bipole, Bipole] | None:
    if lo.kind != "R" or up.kind != "LR":
        return None
    k1, f = lo.f, up.f
    sigma2 = _comp(up.sigma, f, True)
    right = f.then(_comp(up.tau, f, False))
    rho1 = _comp(lo.rho, k1, False)
    g = _unique(f.cat.fillers(sigma2, k1, right, rho1), fp, "gravitation")
    if g is None:
        return None
    new_lo = Bipole(up.sigma, lo.tau, up.pi, g, lo.rho)
    new_up = Bipole((), up.tau, (), _comp(up.pi, f, True).then(f), up.rho)
    return new_lo, new_up


RULES = ("seqRL", "seqLR", "parRL", "parLR", "graL", "graR")


def _apply(bipoles: tuple[Bipole, ...], rule: str, pos: int, fp: bool) -> tuple[Bipole, ...] | None:
    if rule in ("seqRL", "seqLR"):
        if not 0 <= pos < len(bipoles) or bipoles[pos].kind != "LR":
            return None
        pair = (_seq_rl if rule == "seqRL" else _seq_lr)(bipoles[pos])
        return bipoles[:pos] + pair + bipoles[pos + 1:]
    if not 0 <= pos < len(bipoles) - 1:
        return None
    lo, up = bipoles[pos], bipoles[pos + 1]
    if rule in ("parRL", "parLR"):
        merged = (_par_rl if rule == "parRL" else _par_lr)(lo, up, fp)
        return None if merged is None else bipoles[:pos] + (merged,) + bipoles[pos + 2:]
    if rule in ("graL", "graR"):
        pair = (_gra_l if rule == "graL" else _gra_r)(lo, up, fp)
        return None if pair is None else bipoles[:pos] + pair + bipoles[pos + 2:]
    raise ValueError(f"unknown rule {rule!r}")


def _fp_of(m: MDiv) -> bool:
    return m.f.cat.is_fp("all") or bool(m.f.cat.fp_classes)


def rewrite_step(m: MDiv, rule: str, pos: int, fp: bool | None = None) -> MDiv | None:
    """Apply ``rule`` at bipole ``pos``, counted from the root; ``None`` when it does not match.

    Two-bipole rules (par, gra) read ``pos`` as the lower bipole of the pair.
    """
    fp = _fp_of(m) if fp is None else fp
    st = unpack(m)
    out = _apply(st.bipoles, rule, pos, fp)
    return None if out is None else pack(Stack(st.root, out, st.atom))


def sequentialize(m: MDiv, mode: str = "foc") -> list:
    """Sequential readings of ``m``.

    ``foc`` splits every ``LR`` bipole both ways and returns multifocused
    proofs.  ``inv`` returns weak derivations.  It takes the ``seqRL`` split
    of every ``LR`` bipole, then lists both orders of every two-sided
    inversion.  ``all`` combines both choices.
    """
    if mode == "foc":
        return _foc_expansions(m)
    if mode == "inv":
        return _inv_orders(_foc_expansions(m)[0])
    if mode == "all":
        out = []
        for x in _foc_expansions(m):
            out.extend(_inv_orders(x))
        return list(dict.fromkeys(out))
    raise ValueError(f"unknown mode {mode!r}")


def _foc_expansions(m: MDiv) -> list[MDiv]:
    st = unpack(m)
    options = []
    for b in st.bipoles:
        options.append([_seq_rl(b), _seq_lr(b)] if b.kind == "LR" else [(b,)])
    out = []
    for choice in itertools.product(*options):
        flat = tuple(x for part in choice for x in part)
        out.append(pack(Stack(st.root, flat, st.atom)))
    return out


def _inv_orders(m: MDiv) -> list[WeakDerivation]:
    def div(d: MDiv) -> list[WeakDerivation]:
        bodies = neutral(d.body)
        if not (d.pi or d.rho):
            return bodies
        out = []
        for w in bodies:
            if d.pi and d.rho:
                pf = _comp(d.pi, d.f, True).then(d.f)
                fr = d.f.then(_comp(d.rho, d.f, False))
                out.append(WLDiv(d.pi, d.f, WRDiv(w, pf, d.rho)))
                out.append(WRDiv(WLDiv(d.pi, fr, w), d.f, d.rho))
            elif d.pi:
                out.append(WLDiv(d.pi, d.f, w))
            else:
                out.append(WRDiv(w, d.f, d.rho))
        return out

    def neutral(n: Neutral) -> list[WeakDerivation]:
        if isinstance(n, MAtom):
            return [WAtom(n.delta, n.over, n.p)]
        if n.sigma and n.tau:
            raise IllFormed("split LR bipoles before reading inversions")
        subs = div(n.body)
        if n.sigma:
            return [WLMult(n.sigma, w) for w in subs]
        return [WRMult(w, n.tau) for w in subs]

    return div(m)


def invseq(m: MDiv) -> WeakDerivation:
    """The canonical sequential reading of ``m`` (first element of ``sequentialize(m, 'inv')``)."""
    return sequentialize(m, "inv")[0]


def to_derivation(m: MDiv) -> Derivation:
    """A plain derivation in the permutation class represented by ``m``."""
    return ceil(invseq(m))


# ---------------------------------------------------------------------------
# normalization


def redexes(m: MDiv, fp: bool | None = None) -> list[tuple[str, int]]:
    fp = _fp_of(m) if fp is None else fp
    bip = unpack(m).bipoles
    return [(rule, i) for i in range(len(bip) - 1) for rule in ("graL", "graR", "parRL", "parLR")
            if _apply(bip, rule, i, fp) is not None]


def is_maximal(m: MDiv) -> bool:
    return not redexes(m)


def normalize_trace(m: MDiv, strategy: str = "bottom-up", fp: bool | None = None) -> tuple[MDiv, int]:
    """Rewrite with par and gra until no redex is left; returns the normal form and step count.

    ``bottom-up`` takes the redex closest to the root and prefers gra over
    par.  ``top-down`` scans from the axiom end and prefers par.  Under the FP
    condition both reach the same result.
    """
    fp = _fp_of(m) if fp is None else fp
    st = unpack(m)
    bip = st.bipoles
    steps = 0
    if strategy == "bottom-up":
        order = ("graL", "graR", "parRL", "parLR")
    elif strategy == "top-down":
        order = ("parRL", "parLR", "graL", "graR")
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    while True:
        positions = range(len(bip) - 1)
        if strategy == "top-down":
            positions = reversed(positions)
        for i in positions:
            hit = None
            for rule in order:
                hit = _apply(bip, rule, i, fp)
                if hit is not None:
                    break
            if hit is not None:
                bip = hit
                steps += 1
                break
        else:
            return pack(Stack(st.root, bip, st.atom)), steps


def normalize(m: MDiv, strategy: str = "bottom-up") -> MDiv:
    return normalize_trace(m, strategy)[0]


# ---------------------------------------------------------------------------
# lock-state proof search

BOT = ("bot",)


def max_search(s: Formula, f: Arrow, t: Formula, lock=BOT, sig: Signature | None = None,
               memo: dict | None = None) -> Iterator[MDiv]:
    """Enumerate the maximally multifocused proofs of ``S |-_f T``.

    ``lock`` is a pre-inversion state: ``("bot",)``, ``("L",)`` or ``("R",)``.
    From ``("bot",)`` the results are exactly the par/gra normal forms, one
    per arrow of the free bifibration.  Alternatives come in the order left
    focus, right focus, bi-focus, axiom.
    """
    cat = f.cat
    if sig is not None and not sig.is_fp():
        raise NotFP(f"{cat.name} is not declared factorization preordered for these classes")
    if sig is None and not cat.fp_classes:
        raise NotFP(f"{cat.name} is not declared factorization preordered")
    memo = {} if memo is None else memo
    yield from _search_inv(s, f, t, lock, memo)


def _search_inv(s: Formula, h: Arrow, t: Formula, q, memo) -> list[MDiv]:
    key = ("inv", s, h, t, q)
    if key in memo:
        return memo[key]
    out: list[MDiv] = []
    if q[0] == "bot":
        pi, n = push_run(s)
        rho, p = pull_run(t)
        state = ("botf",)
    elif q[0] == "L":
        pi, n = push_run(s)
        rho, p = (), t
        state = ("L", pi, h)
    else:
        pi, n = (), s
        rho, p = pull_run(t)
        state = ("R", h, rho)
    if isinstance(n, Push) or isinstance(p, Pull):
        memo[key] = out
        return out
    m = _comp(pi, h, True).then(h).then(_comp(rho, h, False))
    out = [MDiv(pi, h, rho, body) for body in _search_focus(n, m, p, state, memo)]
    memo[key] = out
    return out


def _search_focus(n: Formula, h: Arrow, p: Formula, q, memo) -> list[Neutral]:
    key = ("foc", n, h, p, q)
    if key in memo:
        return memo[key]
    cat = h.cat
    out: list[Neutral] = []
    sigma, p_left = pull_run(n) if isinstance(n, Pull) else ((), None)
    tau, n_right = push_run(p) if isinstance(p, Push) else ((), None)
    s_c = _comp(sigma, h, True) if sigma else None
    t_c = _comp(tau, h, False) if tau else None
    lock_l = q if q[0] == "L" else None
    lock_r = q if q[0] == "R" else None

    def blocked_by_l(a: Arrow, b: Arrow) -> bool:
        # an R-type step (a, b) directly above an L bipole (pi, f)
        if lock_l is None:
            return False
        _, pi, f = lock_l
        return cat.le_fact(_comp(pi, f, True), f, a, b)

    def blocked_by_r(a: Arrow, b: Arrow) -> bool:
        if lock_r is None:
            return False
        _, f, rho = lock_r
        return cat.le_fact(a, b, f, _comp(rho, f, False))

    if sigma:
        for g in cat.left_divisors(s_c, h):
            if blocked_by_r(s_c, g):
                continue
            out.extend(MFocus(sigma, d, ()) for d in _search_inv(p_left, g, p, ("L",), memo))
    if tau:
        for g in cat.right_divisors(h, t_c):
            if blocked_by_l(g, t_c):
                continue
            out.extend(MFocus((), d, tau) for d in _search_inv(n, g, n_right, ("R",), memo))
    if sigma and tau:
        for g1 in cat.left_divisors(s_c, h):
            for g in cat.right_divisors(g1, t_c):
                if blocked_by_l(s_c.then(g), t_c) or blocked_by_r(s_c, g.then(t_c)):
                    continue
                out.extend(MFocus(sigma, d, tau) for d in _search_inv(p_left, g, n_right, BOT, memo))
    if isinstance(n, Atom) and isinstance(p, Atom):
        out.extend(MAtom(d, h, n.p) for d in n.p.lifts(n.obj, p.obj, h))
    memo[key] = out
    return out


def entails(s: Formula, f: Arrow, t: Formula, memo: dict | None = None) -> bool:
    """Whether ``S |-_f T`` has any proof."""
    return bool(_search_inv(s, f, t, BOT, {} if memo is None else memo))


# ---------------------------------------------------------------------------
# composition of multifocused proofs


def _opcart_into(a: MDiv) -> MDiv:
    """Precompose with the opcartesian lifting of ``a``'s left push run."""
    return MDiv((), _comp(a.pi, a.f, True).then(a.f), a.rho, a.body)


def _cart_into(b: MDiv) -> MDiv:
    """Postcompose with the cartesian lifting of ``b``'s right pull run."""
    return MDiv(b.pi, b.f.then(_comp(b.rho, b.f, False)), (), b.body)


def mf_cut(a: MDiv, b: MDiv, renormalize: bool = True) -> MDiv:
    """Compose two multifocused proofs by case analysis on their roots.

    The result is brought back to normal form unless ``renormalize`` is false.
    """
    if a.judgment.rhs != b.judgment.lhs:
        raise NonComposable("multifocused cut on mismatched formulas")
    out = _mcut(a, b)
    return normalize(out) if renormalize else out


def _mcut(a: MDiv, b: MDiv) -> MDiv:
    if a.pi or b.rho:
        inner = _mcut(_opcart_into(a), _cart_into(b))
        return MDiv(a.pi, a.f.then(b.f), b.rho, inner.body)
    gh = a.f.then(b.f)
    # a left focus of ``a`` commutes first, then a right focus of ``b``; a
    # two-sided focus is split so that the commuting half sits at the root
    if not a.rho and isinstance(a.body, MFocus) and a.body.kind == "bimult":
        a = rewrite_step(a, "seqRL", 0, fp=False)
    x = a.body
    a_lmult = not a.rho and isinstance(x, MFocus) and x.kind == "lmult"
    if not a_lmult and not b.pi and isinstance(b.body, MFocus) and b.body.kind == "bimult":
        b = rewrite_step(b, "seqLR", 0, fp=False)
    y = b.body
    b_rmult = not b.pi and isinstance(y, MFocus) and y.kind == "rmult"
    if a_lmult and b_rmult:
        return MDiv((), gh, (), MFocus(x.sigma, _mcut(x.body, y.body), y.tau))
    if a_lmult:
        return MDiv((), gh, (), MFocus(x.sigma, _mcut(x.body, b), ()))
    if b_rmult:
        return MDiv((), gh, (), MFocus((), _mcut(a, y.body), y.tau))
    if b.pi:
        # the cut formula is a push, so a ends with a right focus on it
        if not (isinstance(x, MFocus) and x.kind == "rmult"):
            raise IllFormed("expected a right focus on the cut push")
        return _mcut(x.body, _opcart_into(b))
    if a.rho:
        if not (isinstance(y, MFocus) and y.kind == "lmult"):
            raise IllFormed("expected a left focus on the cut pull")
        return _mcut(_cart_into(a), y.body)
    if isinstance(x, MAtom) and isinstance(y, MAtom):
        return MDiv((), gh, (), MAtom(x.delta.then(y.delta), gh, x.p))
    raise IllFormed(f"no multifocused cut case applies: {format_multi(a)} ; {format_multi(b)}")


def mf_identity(s: Formula) -> MDiv:
    return strengthen(weak_identity(s))


# ---------------------------------------------------------------------------
# from plain derivations to normal forms


def weak_of(d: Derivation) -> WeakDerivation:
    """A weak derivation whose ``ceil`` is permutation equivalent to ``d``."""
    j = d.judgment
    return weak_preimage(collapse(d), j.lhs, j.rhs)


def multi_of(d: Derivation) -> MDiv:
    return strengthen(weak_of(d))


def nf_of(d: Derivation) -> MDiv:
    """The par/gra normal form representing the arrow denoted by ``d``."""
    return normalize(multi_of(d))


def format_multi(m) -> str:
    if isinstance(m, MAtom):
        return f"(atom {m.delta})"
    if isinstance(m, MDiv):
        return f"({m.kind} {_fmt_seq(m.pi)} {m.f} {_fmt_seq(m.rho)} {format_multi(m.body)})"
    return f"({m.kind} {_fmt_seq(m.sigma)} {format_multi(m.body)} {_fmt_seq(m.tau)})"


def _fmt_seq(seq: Sequence[Arrow]) -> str:
    return "[" + " ".join(str(a) for a in seq) + "]"
