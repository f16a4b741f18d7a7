import math

import numpy as np
import pytest

from basketmm import (BasketSpec, MomentSummary, basket_moments_lognormal, calibrate_lognormal,
                      finite_difference_greeks, greeks_lognormal, small_skew_diagnostic, solve_cubic_skew)
from basketmm.calibrate_lognormal import ShiftedLognormalParams
from basketmm.exceptions import BoundaryError, DegenerateSkewError, WrongBranchError
from basketmm.greeks import dx_deta
from basketmm.pricing import Case

R, T = 0.03, 1.0


def rel_err(a, b):
    # floor of 1e-6: a zero Greek is compared with pure finite-difference round-off
    return abs(a - b) / max(abs(a), abs(b), 1e-6)


def test_deep_positive_branch_constants():
    ms = MomentSummary.from_summary(20.0, 4.0, 1.0)
    p = calibrate_lognormal(ms)
    g = greeks_lognormal(p, ms, p.tau - 5.0, R, T)
    assert g.case == Case.C1_KleTau.value
    assert (g.dP_dmu, g.dP_dsigma, g.dP_deta) == (math.exp(-R * T), 0.0, 0.0)


def test_negative_branch_above_shift_constants():
    ms = MomentSummary.from_summary(-20.0, 4.0, -1.0)
    p = calibrate_lognormal(ms)
    g = greeks_lognormal(p, ms, -p.tau + 5.0, R, T)
    assert g.case == Case.Cneg_KgeNegTau.value
    assert (g.dP_dmu, g.dP_dsigma, g.dP_deta) == (0.0, 0.0, 0.0)


def test_scenario3_at_the_mean_matches_finite_differences():
    spec = BasketSpec([0.7, 0.3], [110, 90], [0.3, 0.2], 0.9, R, T)
    ms = basket_moments_lognormal(spec)
    p = calibrate_lognormal(ms)
    g = greeks_lognormal(p, ms, ms.mu_B, R, T)
    fd = finite_difference_greeks(ms, ms.mu_B, R, T, rel_bump=1e-5)
    for a, f in zip((g.dP_dmu, g.dP_dsigma, g.dP_deta), fd):
        assert rel_err(a, f) <= 1e-4


# one representative strike per branch
BRANCHES = [
    (MomentSummary.from_summary(20.0, 4.0, 1.0), lambda p: p.tau - 3.0, Case.C1_KleTau),
    (MomentSummary.from_summary(20.0, 4.0, 1.0), lambda p: 21.0, Case.C1_KgtTau),
    (MomentSummary.from_summary(-20.0, 4.0, -1.0), lambda p: -p.tau + 3.0, Case.Cneg_KgeNegTau),
    (MomentSummary.from_summary(-20.0, 4.0, -1.0), lambda p: -21.0, Case.Cneg_KltNegTau),
    (MomentSummary.from_summary(5.0, 3.0, -0.4), lambda p: 4.0, Case.Cneg_KltNegTau),
    (MomentSummary.from_summary(5.0, 3.0, 2.5), lambda p: 9.0, Case.C1_KgtTau),
]


@pytest.mark.parametrize("ms, strike, case", BRANCHES)
def test_every_branch_against_finite_differences(ms, strike, case):
    p = calibrate_lognormal(ms)
    K = strike(p)
    g = greeks_lognormal(p, ms, K, R, T)
    assert g.case == case.value
    fd = finite_difference_greeks(ms, K, R, T, rel_bump=1e-5)
    for a, f in zip((g.dP_dmu, g.dP_dsigma, g.dP_deta), fd):
        assert rel_err(a, f) <= 1e-4


def test_boundary_strike_rejected():
    ms = MomentSummary.from_summary(20.0, 4.0, 1.0)
    p = calibrate_lognormal(ms)
    with pytest.raises(BoundaryError):
        greeks_lognormal(p, ms, p.tau, R, T)


def test_dx_deta_at_two():
    h = 1e-6
    fd = (solve_cubic_skew(2 + h) - solve_cubic_skew(2 - h)) / (2 * h)
    assert abs(dx_deta(2.0) - fd) <= 1e-7


def test_dx_deta_small_skew_limit():
    ratios = [dx_deta(e) / e for e in (1e-2, 1e-3, 1e-4)]
    errs = [abs(r - 2 / 9) for r in ratios]
    assert errs[-1] < 1e-6
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-9


def test_dx_deta_is_odd_and_matches_fd_on_grid():
    h = 1e-6
    for eta in np.linspace(-10, 10, 401):
        if abs(eta) < 1e-3:
            continue
        assert dx_deta(-eta) == -dx_deta(eta)
        fd = (solve_cubic_skew(eta + h) - solve_cubic_skew(eta - h)) / (2 * h)
        assert abs(dx_deta(eta) - fd) <= 1e-7


def test_dx_deta_degenerate():
    with pytest.raises(DegenerateSkewError):
        dx_deta(0.0)
    with pytest.raises(DegenerateSkewError):
        dx_deta(1e-9)


def test_small_skew_remainder_stays_bounded():
    mu, sigma, K = 10.0, 2.0, 10.0
    rems = []
    for eta in (-0.2, -0.1, -0.05, -0.025):
        ms = MomentSummary.from_summary(mu, sigma, eta)
        p = calibrate_lognormal(ms)
        g = greeks_lognormal(p, ms, K, R, T)
        A, B = small_skew_diagnostic(p, ms, K, R, T)
        rems.append(abs(eta * eta * g.dP_deta - A - B * eta))
    assert max(rems) <= rems[0] * (1 + 1e-6)
    assert max(rems) < 1.0


def test_small_skew_diagnostic_trivial_cases():
    ms = MomentSummary.from_summary(-10.0, 0.0, float("nan"))
    p = ShiftedLognormalParams(-1, 0.2, 1.0, -20.0, math.exp(0.04), math.expm1(0.04))
    assert small_skew_diagnostic(p, ms, 15.0, R, T) == (0.0, 0.0)
    ms = MomentSummary.from_summary(-10.0, 2.0, -0.5)
    flat = ShiftedLognormalParams(-1, 1e-12, 1.0, -20.0, 1.0, 1e-24)
    A, _ = small_skew_diagnostic(flat, ms, 15.0, R, T)
    assert abs(A) < 1e-10


def test_small_skew_diagnostic_wrong_branch():
    ms = MomentSummary.from_summary(20.0, 4.0, 1.0)
    p = calibrate_lognormal(ms)
    with pytest.raises(WrongBranchError):
        small_skew_diagnostic(p, ms, 21.0, R, T)
