"""Accuracy measures against a benchmark: share of good prices and mean abs % error."""
from dataclasses import dataclass

from .exceptions import EmptyCasesError, ZeroBenchmarkError

GOOD_PRICE_THRESHOLD = 0.02


@dataclass(frozen=True)
class CaseResult:
    val: float
    mc: float
    label: str = ""

    @property
    def rel_error(self):
        return abs((self.val - self.mc) / self.mc)


def c1_c2(cases):
    """Return (C1, C2) in percent.

    C1 counts cases with relative error strictly below 2%; C2 is the mean
    absolute relative error.
    """
    cases = list(cases)
    if not cases:
        raise EmptyCasesError("c1_c2 needs at least one case")
    for case in cases:
        if case.mc == 0:
            raise ZeroBenchmarkError(f"benchmark value is zero for case {case.label!r}")
    errs = [c.rel_error for c in cases]
    good = sum(e < GOOD_PRICE_THRESHOLD for e in errs)
    return 100.0 * good / len(cases), 100.0 * sum(errs) / len(cases)
