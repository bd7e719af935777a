import io
import json

import pytest

from bifib.cli import build_parser, run

A = "(rdiv (lmult f (ldiv f id@1 (rmult (rdiv (rmult (ax id@*) f) id@0 f) f))) id@0 f)"
B = "(rdiv (rmult (rdiv (lmult f (ldiv f id@1 (rmult (ax id@*) f))) id@0 f) f) id@0 f)"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_count_ordinals():
    assert call("count", "--from", "ord 2", "--to", "ord 2") == (0, "3\n", "")
    assert call("count", "--from", "ord 3", "--to", "ord 1")[1] == "1\n"


def test_count_trees():
    code, out, _ = call("count", "--seed", "pomega(3)",
                        "--from", "tree [[[]], [], [[], []]]", "--to", "tree [[[[]], []], [], [[]]]")
    assert (code, out) == (0, "11\n")


def test_enum_lists_proofs():
    code, out, _ = call("enum", "--from", "ord 1", "--to", "ord 2")
    lines = out.splitlines()
    assert code == 0
    assert lines[-1] == "count: 2 (max-search)"
    assert all(line.startswith("(") for line in lines[:-1])


def test_count_with_explicit_formulas():
    code, out, _ = call("count", "--from", "(pull f (push f (atom *)))", "--to", "same")
    assert (code, out) == (0, "1\n")


def test_eq():
    assert call("eq", "--left", A, "--right", A)[1] == "EQUAL (normal-form)\n"
    assert call("eq", "--left", A, "--right", B)[1] == "DISTINCT (normal-form)\n"


def test_nf():
    code, out, _ = call("nf", "--term", A, "--strategy", "top-down")
    assert code == 0
    assert out.splitlines()[-1] == "steps: 0"


def test_render_text_and_svg(tmp_path):
    code, out, _ = call("render", "--seed", "fig1")
    assert code == 0
    assert out.splitlines()[0] == "X --alpha--> Y"
    target = tmp_path / "stack.svg"
    code, out, _ = call("render", "--seed", "fig1", "--svg", str(target))
    assert code == 0 and out == f"wrote {target}\n"
    assert target.read_text().startswith("<svg")


def test_poset_exports():
    code, out, _ = call("poset", "--n", "3")
    assert code == 0 and "digraph hasse" in out
    code, out, _ = call("poset", "--n", "4", "--lattice", "--format", "csv")
    assert "NOT A LATTICE: F and N have no meet" in out
    assert "intervals: 238" in out
    code, out, _ = call("poset", "--n", "3", "--quotient", "--format", "json")
    assert out.startswith("elements: 5\n")
    assert len(json.loads(out.split("\n", 1)[1])["elements"]) == 5


@pytest.mark.parametrize("argv,code", [
    (("count", "--seed", "bnat", "--from", "ord 1", "--to", "same"), "ill-formed"),
    (("count", "--from", "(push g (atom *))", "--to", "same"), "ill-formed"),
    (("eq", "--left", A, "--right", "(ax id@*)"), "ill-formed"),
    (("render", "--seed", "p2"), "ill-formed"),
    (("poset", "--seed", "p2", "--n", "3"), "ill-formed"),
    (("count", "--presentation", "/nonexistent/file", "--from", "x", "--to", "same"), "io-error"),
    (("count", "--from", "ord two", "--to", "same"), "bad-value"),
])
def test_errors_are_reported_as_json(argv, code):
    status, out, err = call(*argv)
    assert status == 2 and out == ""
    payload = json.loads(err)
    assert payload["error"] == code
    assert payload["message"]


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
