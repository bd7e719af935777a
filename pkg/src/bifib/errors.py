"""Exception types raised by the engine."""

from __future__ import annotations


class BifibError(Exception):
    """Base class for every error raised by :mod:`bifib`."""

    code = "error"


class NonComposable(BifibError):
    code = "non-composable"


class SquareNotCommuting(BifibError):
    code = "square-not-commuting"


class FPViolation(BifibError):
    """A division expected to be unique under the factorization-preorder flag had two answers."""

    code = "fp-violation"


class IllFormed(BifibError):
    code = "ill-formed"


class BudgetExceeded(BifibError):
    code = "budget-exceeded"


class BoundaryMismatch(BifibError):
    code = "boundary-mismatch"


class NotStrictlyAlternating(BifibError):
    code = "not-strictly-alternating"


class NotFP(BifibError):
    code = "not-fp"


class TargetDivisionFailed(BifibError):
    code = "target-division-failed"


class NotAWalk(BifibError):
    code = "not-a-walk"


class UndecidableConfiguration(BifibError):
    """Neither the FP flag nor local finiteness is available to decide equality."""

    code = "undecidable-configuration"
