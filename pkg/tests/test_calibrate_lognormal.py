import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from basketmm import (BasketSpec, MomentSummary, approximant_moments_lognormal, basket_moments_lognormal,
                      calibrate_lognormal, solve_cubic_skew)
from basketmm.calibrate_lognormal import ShiftedLognormalParams, cubic_root_minus_one
from basketmm.exceptions import DegenerateSkewError, ZeroVarianceError
from conftest import bisect_cubic, rel


def residual(x, eta):
    return abs(x ** 3 + 3 * x ** 2 - 4 - eta * eta)


def test_zero_skew_root_is_one():
    assert solve_cubic_skew(0.0) == 1.0


def test_eta_two_against_pinned_bisection(pinned):
    ref = float(pinned["cubic_root_eta2"])
    assert 1.3 < ref < 1.4
    assert abs(solve_cubic_skew(2.0) - ref) <= 1e-12
    assert solve_cubic_skew(-2.0) == solve_cubic_skew(2.0)


@pytest.mark.parametrize("key, eta", [("cubic_root_eta_half", 0.5), ("cubic_root_eta10", 10.0)])
def test_other_pinned_roots(pinned, key, eta):
    assert abs(solve_cubic_skew(eta) - float(pinned[key])) <= 1e-12 * float(pinned[key])


def test_single_lognormal_is_recovered():
    spec = BasketSpec([1], [100], [0.2], 1.0, 0.03, 1.0)
    ms = basket_moments_lognormal(spec)
    p = calibrate_lognormal(ms)
    assert p.c == 1
    assert abs(p.tau) <= 1e-9 * ms.mu_B
    assert p.s == pytest.approx(0.2, rel=1e-10)
    assert math.exp(p.m) == pytest.approx(100 * math.exp(0.03 - 0.02), rel=1e-10)
    assert p.x == pytest.approx(math.exp(0.04), rel=1e-13)


def test_negated_weights_flip_sign_only():
    spec = BasketSpec([0.7, 0.3], [110, 90], [0.3, 0.2], 0.9, 0.03, 1.0)
    a = calibrate_lognormal(basket_moments_lognormal(spec))
    b = calibrate_lognormal(basket_moments_lognormal(spec.scaled(-1)))
    assert (a.c, b.c) == (1, -1)
    assert b.x == a.x and b.s == a.s
    assert b.m == pytest.approx(a.m, rel=1e-13)
    # tau = c mu - sigma/sqrt(x-1): mu flips with the basket, c flips with eta
    assert b.tau == pytest.approx(a.tau, rel=1e-12)


def test_summary_with_eta_two(pinned):
    x = float(pinned["cubic_root_eta2"])
    p = calibrate_lognormal(MomentSummary.from_summary(7.0, 2.0, 2.0))
    assert p.x == pytest.approx(x, rel=1e-12)
    assert p.s == pytest.approx(math.sqrt(math.log(x)), rel=1e-12)
    assert p.m == pytest.approx(0.5 * math.log(4 / (x * (x - 1))), rel=1e-12)
    back = approximant_moments_lognormal(p)
    c3 = back.m3 - 3 * back.m1 * back.m2 + 2 * back.m1 ** 3
    assert c3 / back.sigma_B ** 3 == pytest.approx(2.0, rel=1e-9)


def test_unshifted_moments_are_classical():
    p = ShiftedLognormalParams(1, 0.3, 0.1, 0.0, math.exp(0.09))
    ms = approximant_moments_lognormal(p)
    for k, mk in enumerate((ms.m1, ms.m2, ms.m3), start=1):
        assert mk == pytest.approx(math.exp(k * 0.1 + k * k * 0.09 / 2), rel=1e-14)


def test_errors():
    with pytest.raises(ZeroVarianceError):
        calibrate_lognormal(MomentSummary.from_summary(1.0, 0.0, 0.0))
    with pytest.raises(DegenerateSkewError):
        calibrate_lognormal(MomentSummary.from_summary(1.0, 1.0, 1e-9))


def test_invariants_on_calibrated_params():
    ms = MomentSummary.from_summary(20.0, 5.0, -1.3)
    p = calibrate_lognormal(ms)
    assert p.x > 1
    assert residual(p.x, ms.eta_B) <= 1e-10 * (1 + ms.eta_B ** 2)
    assert p.s == pytest.approx(math.sqrt(math.log(p.x)), rel=1e-14)
    assert math.exp(2 * p.m) * p.x * (p.x - 1) == pytest.approx(25.0, rel=1e-10)


@given(st.floats(-50, 50, allow_nan=False))
def test_cubic_residual(eta):
    assert residual(solve_cubic_skew(eta), eta) <= 1e-10 * (1 + eta * eta)


@pytest.mark.parametrize("eta", [1e7, 1e9, -3e8])
def test_cubic_residual_huge_skew(eta):
    x = solve_cubic_skew(eta)
    assert residual(x, eta) <= 1e-10 * (1 + eta * eta)


def test_root_increases_with_skew():
    grid = np.linspace(0.01, 10, 1000)
    xs = [solve_cubic_skew(e) for e in grid]
    assert all(b > a for a, b in zip(xs, xs[1:]))


@given(st.floats(1e-4, 50))
def test_cardano_matches_bisection(eta):
    assert abs(solve_cubic_skew(eta) - bisect_cubic(eta)) <= 1e-10 * bisect_cubic(eta)
    # the cancellation-free x - 1 agrees too
    assert cubic_root_minus_one(eta) == pytest.approx(bisect_cubic(eta) - 1, rel=1e-9, abs=1e-15)


@given(st.floats(-1e4, 1e4), st.floats(0.1, 100), st.floats(0.01, 10), st.booleans())
def test_moment_match_round_trip(mu, sigma, abs_eta, negative):
    ms = MomentSummary.from_summary(mu, sigma, -abs_eta if negative else abs_eta)
    back = approximant_moments_lognormal(calibrate_lognormal(ms))
    # raw moments compared on the scale of the distribution they describe
    scale = math.sqrt(ms.m2)
    assert abs(back.m1 - ms.m1) <= 1e-9 * scale
    assert abs(back.m2 - ms.m2) <= 1e-9 * scale ** 2
    assert abs(back.m3 - ms.m3) <= 1e-9 * scale ** 3
    assert rel(back.sigma_B, sigma) <= 1e-9
    assert abs(back.eta_B - ms.eta_B) <= 1e-9 * max(1.0, abs_eta)
