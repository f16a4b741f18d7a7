"""Moment matching for the log-normal shape mixture ``c (exp(s sqrt(Y) N + m) + tau)``."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .calibrate_lognormal import ETA_MIN, _from_central
from .exceptions import DegenerateSkewError, DomainEmptyError, NoRootError, ZeroVarianceError
from .laws import MixingLaw

GRID_POINTS = 256
GRID_START = 1e-12
ROOT_TOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MixtureParams:
    c: int
    s: float
    m: float
    tau: float
    x: float
    law: MixingLaw = field(repr=False)
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)


def _excess_ratios(x, law):
    """(phi(2x)/phi(x/2)^2 - 1, phi(9x/2)/phi(x/2)^3 - 1) through the log-MGF."""
    x = np.asarray(x, dtype=float)
    k_half = law.cgf(0.5 * x)
    r2 = np.expm1(law.cgf(2.0 * x) - 2.0 * k_half)
    r3 = np.expm1(law.cgf(4.5 * x) - 3.0 * k_half)
    return r2, r3


def skew_ratio(x, law, *, with_noise=False):
    """Skewness of exp(sqrt(x Y) N) as a function of x = s^2.

    Equals (phi(9x/2) - 3 phi(x/2) phi(2x) + 2 phi(x/2)^3) / (phi(2x) - phi(x/2)^2)^{3/2};
    both numerator and denominator are divided by powers of phi(x/2) first.
    """
    r2, r3 = _excess_ratios(x, law)
    num = r3 - 3.0 * r2
    with np.errstate(invalid="ignore", divide="ignore"):
        g = num / r2 ** 1.5
    if not with_noise:
        return g
    noise = 16.0 * _EPS * (np.abs(r3) + 3.0 * np.abs(r2) + 1.0 * (np.abs(r3) + np.abs(r2)))
    reliable = (r2 > 16.0 * _EPS) & (np.abs(num) > noise) & np.isfinite(g)
    return g, reliable


def _upper_bound(law):
    bound = law.mgf_domain_bound
    if not bound > 0:
        raise DomainEmptyError(f"law {law.label!r} has an empty MGF domain")
    if math.isinf(bound):
        # log-MGF grows at most linearly for a point mass; 50 is far past any useful skew
        return 50.0
    return (2.0 / 9.0) * bound * (1.0 - 1e-9)


def solve_mixture_shape(eta, law):
    """Strictly positive root x of the mixture skewness equation for |eta|.

    The skewness ratio is scanned on a geometric grid; grid points whose
    numerator is swamped by rounding are discarded, and the first sign change
    among the remaining ones is refined with Brent's method.
    """
    target = abs(float(eta))
    if not target > ETA_MIN:
        raise DegenerateSkewError(f"|skewness| = {target:.3g} <= {ETA_MIN:g}")
    hi = _upper_bound(law)
    grid = np.geomspace(GRID_START, hi, GRID_POINTS)
    with np.errstate(all="ignore"):
        g, ok = skew_ratio(grid, law, with_noise=True)
    xs = grid[ok]
    gs = g[ok] - target
    if xs.size < 2:
        raise NoRootError(f"skewness ratio of {law.label!r} could not be evaluated on (0, {hi:.4g})")
    changes = np.flatnonzero(np.sign(gs[:-1]) != np.sign(gs[1:]))
    exact = np.flatnonzero(gs == 0.0)
    if changes.size == 0 and exact.size == 0:
        lo_g, hi_g = float(np.min(g[ok])), float(np.max(g[ok]))
        if gs[0] > 0:
            msg = (f"skewness {target:.4g} lies below the resolvable range of {law.label!r} "
                   f"(smallest reliable ratio {lo_g:.4g})")
        else:
            msg = (f"no root for skewness {target:.4g} under {law.label!r}; "
                   f"ratio spans [{lo_g:.4g}, {hi_g:.4g}] on (0, {hi:.4g})")
        raise NoRootError(msg, g_range=(lo_g, hi_g))
    diagnostics = {"sign_changes": int(changes.size)}
    if exact.size and (changes.size == 0 or exact[0] <= changes[0]):
        return float(xs[exact[0]]), diagnostics
    i = changes[0]

    def f(x):
        return float(skew_ratio(x, law)) - target

    root = brentq(f, xs[i], xs[i + 1], xtol=1e-300, rtol=4 * _EPS, maxiter=500)
    resid = abs(f(root))
    diagnostics["residual"] = resid
    if changes.size > 1:
        diagnostics["note"] = "several sign changes; smallest root taken"
    return root, diagnostics


def calibrate_mixture(ms, law, eta_min=ETA_MIN):
    if not ms.sigma_B > 0:
        raise ZeroVarianceError("basket has zero variance; the shifted mixture is undefined")
    eta = ms.eta_B
    if not math.isfinite(eta) or abs(eta) <= eta_min:
        raise DegenerateSkewError(
            f"|skewness| = {abs(eta):.3g} <= {eta_min:g}; use the normal approximation instead"
        )
    x, diagnostics = solve_mixture_shape(eta, law)
    c = 1 if eta > 0 else -1
    r2 = float(_excess_ratios(x, law)[0])
    k_half = float(law.cgf(0.5 * x))
    # phi(2x) - phi(x/2)^2 = phi(x/2)^2 * r2
    log_var = 2.0 * k_half + math.log(r2)
    m = math.log(ms.sigma_B) - 0.5 * log_var
    tau = c * ms.mu_B - ms.sigma_B / math.sqrt(r2)
    return MixtureParams(c, math.sqrt(x), m, tau, x, law, diagnostics)


def approximant_moments_mixture(p):
    law = p.law
    s2 = p.s * p.s
    c = p.c
    scale = math.exp(p.m + float(law.cgf(0.5 * s2)))
    m1 = c * (scale + p.tau)
    r2, r3 = (float(v) for v in _excess_ratios(s2, law))
    var = scale * scale * r2
    c3 = c * scale ** 3 * (r3 - 3.0 * r2)
    return _from_central(m1, var, c3)
