"""Command-line front end.

Formulas and derivations are S-expressions, for example
``(pull f (push f (atom *)))``.  Two shorthands are accepted for formulas:
``ord N`` is the ordinal ``N`` over ``p2``, and ``tree JSON`` is a plane
tree given as nested lists, encoded over ``pomega``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .base import FunctorDef, parse_presentation
from .core import Formula, Signature, format_derivation, parse_derivation, parse_formula
from .enumeration import bc_quotient, decide, fiber_poset, homset, poset_analyze
from .errors import BifibError, IllFormed
from .examples import PlaneTree, encode_tree, ordinal_formula, seed, stack_example
from .focusing import MDiv, format_multi, multi_of, normalize_trace
from .suite import CRITERIA, DEFAULT_RNG_SEED, rewriting_soundness
from .zigzag import decompose, render


def _signature(args) -> tuple[str, Signature]:
    if getattr(args, "presentation", None):
        cat = parse_presentation(Path(args.presentation).read_text())
        return "presentation", Signature(FunctorDef.identity(cat), name="presentation")
    if args.seed == "fig1":
        return "fig1", stack_example()[0]
    s = seed(args.seed)
    return s.name, s.sig


def _formula(text: str, sig: Signature, name: str) -> Formula:
    text = text.strip()
    if text.startswith("ord "):
        if not name.startswith("p2"):
            raise IllFormed("the 'ord N' shorthand needs --seed p2")
        return ordinal_formula(int(text[4:]), seed("p2"))
    if text.startswith("tree "):
        if not name.startswith("pomega"):
            raise IllFormed("the 'tree JSON' shorthand needs --seed pomega(K)")
        tree = PlaneTree.from_nested(json.loads(text[5:]))
        return encode_tree(tree, seed(name))
    return parse_formula(text, sig)


def _sequent(args):
    name, sig = _signature(args)
    s = _formula(args.source, sig, name)
    t = s if args.to == "same" else _formula(args.to, sig, name)
    over = sig.base.parse_arrow(args.over) if args.over else sig.base.identity(s.ref)
    return sig, s, over, t


def cmd_count(args, out) -> int:
    sig, s, f, t = _sequent(args)
    print(homset(s, f, t, sig).count, file=out)
    return 0


def cmd_enum(args, out) -> int:
    sig, s, f, t = _sequent(args)
    result = homset(s, f, t, sig)
    for p in result.proofs:
        print(format_multi(p) if isinstance(p, MDiv) else format_derivation(p), file=out)
    print(f"count: {result.count} ({result.mode})", file=out)
    return 0


def cmd_eq(args, out) -> int:
    _, sig = _signature(args)
    a = parse_derivation(args.left, sig)
    b = parse_derivation(args.right, sig)
    same, mode = decide(a, b, sig)
    print(f"{'EQUAL' if same else 'DISTINCT'} ({mode})", file=out)
    return 0


def cmd_nf(args, out) -> int:
    _, sig = _signature(args)
    d = parse_derivation(args.term, sig)
    nf, steps = normalize_trace(multi_of(d), args.strategy)
    print(format_multi(nf), file=out)
    print(f"steps: {steps}", file=out)
    return 0


def cmd_render(args, out) -> int:
    _, sig = _signature(args)
    if args.term:
        d = parse_derivation(args.term, sig)
    elif args.seed == "fig1":
        d = stack_example()[1]
    else:
        raise IllFormed("render needs --term unless --seed fig1")
    delta, stack = decompose(d)
    if args.svg:
        Path(args.svg).write_text(render(stack, "svg", delta))
        print(f"wrote {args.svg}", file=out)
    else:
        out.write(render(stack, "text", delta))
    return 0


def cmd_poset(args, out) -> int:
    if args.seed != "ambisimplex":
        raise IllFormed("poset supports --seed ambisimplex only")
    p = fiber_poset("ambisimplicial", args.k, args.n)
    if args.quotient:
        p = bc_quotient(p)
    print(f"elements: {len(p)}", file=out)
    if args.lattice:
        report = poset_analyze(p)
        if report["is_lattice"]:
            print("LATTICE", file=out)
        else:
            x, y, what = report["failing_pair"]
            print(f"NOT A LATTICE: {x} and {y} have no {what}", file=out)
        print(f"intervals: {report['interval_count']}", file=out)
    exporters = {"dot": p.to_dot, "csv": p.to_csv, "json": p.to_json}
    text = exporters[args.format]()
    out.write(text if text.endswith("\n") else text + "\n")
    return 0


def cmd_suite(args, out) -> int:
    if args.which != "paper":
        raise IllFormed(f"unknown suite {args.which!r}")
    failed = 0
    for check in CRITERIA:
        result = check(rng_seed=args.seed_rng) if check is rewriting_soundness else check()
        print(result.line(), file=out, flush=True)
        failed += not result.passed
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria passed", file=out)
    return 1 if failed else 0


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default="p2",
                   help="p2, pomega(K), bnat, ambisimplex(K) or fig1 (default p2)")
    p.add_argument("--presentation", help="category presentation file; uses its identity functor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bifib", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("count", "number of arrows S -> T over an arrow"),
                           ("enum", "list the normal proofs S -> T")):
        p = sub.add_parser(name, help=helptext)
        _add_seed(p)
        p.add_argument("--from", dest="source", required=True)
        p.add_argument("--to", required=True, help="formula, or 'same'")
        p.add_argument("--over", help="base arrow (default: identity)")

    p = sub.add_parser("eq", help="decide permutation equivalence of two derivations")
    _add_seed(p)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = sub.add_parser("nf", help="normal form of a derivation")
    _add_seed(p)
    p.add_argument("--term", required=True)
    p.add_argument("--strategy", choices=("bottom-up", "top-down"), default="bottom-up")

    p = sub.add_parser("render", help="draw the stack of cells of a derivation")
    _add_seed(p)
    p.add_argument("--term")
    p.add_argument("--svg", metavar="FILE", help="write an SVG string diagram instead of text")

    p = sub.add_parser("poset", help="ambisimplicial fiber posets")
    p.add_argument("--seed", default="ambisimplex")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lattice", action="store_true", help="report whether the poset is a lattice")
    p.add_argument("--quotient", action="store_true", help="collapse to noncrossing partitions")
    p.add_argument("--format", choices=("dot", "csv", "json"), default="dot")

    p = sub.add_parser("suite", help="run the reproduction suite")
    p.add_argument("which", choices=("paper",))
    p.add_argument("--seed-rng", type=int, default=DEFAULT_RNG_SEED)
    return parser


COMMANDS = {
    "count": cmd_count,
    "enum": cmd_enum,
    "eq": cmd_eq,
    "nf": cmd_nf,
    "render": cmd_render,
    "poset": cmd_poset,
    "suite": cmd_suite,
}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except BifibError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=err)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io-error", "message": str(exc)}), file=err)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": "bad-value", "message": str(exc)}), file=err)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
