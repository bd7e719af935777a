"""One test per acceptance criterion, each printing a single PASS/FAIL line.

The checks live in :mod:`bifib.suite`, shared with the ``suite`` command of
the CLI.  Time limits are enforced inside each check.
"""

from bifib import suite


def _report(result, capsys):
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail


def test_criterion_1_simplex_counts(capsys):
    _report(suite.simplex_counts(), capsys)


def test_criterion_2_monotone_bijection(capsys):
    _report(suite.monotone_bijection(), capsys)


def test_criterion_3_tree_morphisms(capsys):
    _report(suite.tree_morphisms(), capsys)


def test_criterion_4_ambisimplicial_counts(capsys):
    _report(suite.ambisimplicial_counts(), capsys)


def test_criterion_5_fiber_structure(capsys):
    _report(suite.fiber_structure(), capsys)


def test_criterion_6_kreweras_quotient(capsys):
    _report(suite.kreweras_quotient(), capsys)


def test_criterion_7_rewriting_soundness(capsys, rng_seed):
    _report(suite.rewriting_soundness(cases=500, rng_seed=rng_seed), capsys)


def test_criterion_8_maximality_correspondence(capsys):
    _report(suite.maximality_correspondence(), capsys)


def test_every_criterion_is_covered():
    assert [c.__name__ for c in suite.CRITERIA] == [
        "simplex_counts", "monotone_bijection", "tree_morphisms", "ambisimplicial_counts",
        "fiber_structure", "kreweras_quotient", "rewriting_soundness", "maximality_correspondence",
    ]

