"""Approximate basket call prices from calibrated shifted (mixture) log-normals."""
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from scipy import integrate
from scipy.optimize import brentq

from .calibrate_lognormal import ETA_MIN, ShiftedLognormalParams, calibrate_lognormal
from .calibrate_mixture import calibrate_mixture
from .exceptions import BasketError, QuadratureError
from .laws import resolve_law
from .moments import basket_moments_lognormal, basket_moments_mixture
from .normal import norm_cdf, norm_pdf

QUAD_RTOL = 1e-8
TAIL_MASS = 1e-12
SMALL_Y = 1e-12
_TINY_GAP = 1e-300


class Case(str, Enum):
    C1_KleTau = "C1_KleTau"
    C1_KgtTau = "C1_KgtTau"
    Cneg_KgeNegTau = "Cneg_KgeNegTau"
    Cneg_KltNegTau = "Cneg_KltNegTau"


class Method(str, Enum):
    closed_form_lognormal = "closed_form_lognormal"
    mixture_quadrature = "mixture_quadrature"
    normal_fallback = "normal_fallback"
    black_scholes = "black_scholes"
    deterministic = "deterministic"


class TailTruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PricingTerms:
    d11: float = float("nan")
    d12: float = float("nan")
    d21: float = float("nan")
    d22: float = float("nan")
    case: Case = None


@dataclass(frozen=True)
class PriceResult:
    price: float
    method: Method
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.price)


def select_case(c, K, tau):
    if c > 0:
        return Case.C1_KleTau if K <= tau else Case.C1_KgtTau
    return Case.Cneg_KgeNegTau if K >= -tau else Case.Cneg_KltNegTau


def pricing_terms(p, K):
    """Standardised log-boundary terms of the log-normal price."""
    case = select_case(p.c, K, p.tau)
    s, m = p.s, p.m
    if case is Case.C1_KgtTau:
        d12 = (m - math.log(K - p.tau)) / s
        return PricingTerms(d11=d12 + s, d12=d12, case=case)
    if case is Case.Cneg_KltNegTau:
        d22 = (math.log(-K - p.tau) - m) / s
        return PricingTerms(d21=d22 - s, d22=d22, case=case)
    return PricingTerms(case=case)


def price_lognormal(p, K, r, T):
    """Four-branch closed form of the shifted log-normal call price."""
    K = float(K)
    disc = math.exp(-r * T)
    terms = pricing_terms(p, K)
    case = terms.case
    scale = math.exp(p.m + 0.5 * p.s * p.s)
    if case is Case.C1_KleTau:
        price = disc * (scale + p.tau - K)
    elif case is Case.Cneg_KgeNegTau:
        price = 0.0
    elif case is Case.C1_KgtTau:
        gap = K - p.tau
        if gap < _TINY_GAP:
            price = disc * (scale + p.tau - K)
        else:
            price = disc * (scale * norm_cdf(terms.d11) - gap * norm_cdf(terms.d12))
    else:
        gap = -K - p.tau
        if gap < _TINY_GAP:
            price = 0.0
        else:
            price = disc * (-scale * norm_cdf(terms.d21) + gap * norm_cdf(terms.d22))
    return PriceResult(max(float(price), 0.0), Method.closed_form_lognormal,
                       {"case": case.value, "terms": terms})


def _tail_point(law):
    """y_max with P(Y > y_max) < TAIL_MASS."""
    if law.sf is not None:
        hi = 1.0
        while law.sf(hi) >= TAIL_MASS:
            hi *= 2.0
            if hi > 1e8:
                raise QuadratureError(f"survival function of {law.label!r} does not decay")
        return brentq(lambda y: float(law.sf(y)) - 0.5 * TAIL_MASS, hi / 2.0 if hi > 1 else 0.0, hi), 0.5 * TAIL_MASS
    # fall back to integrating the density outward
    hi, mass = 1.0, 0.0
    while True:
        mass = integrate.quad(law.density, 0.0, hi, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        if 1.0 - mass < TAIL_MASS or hi > 1e6:
            break
        hi *= 2.0
    return hi, max(1.0 - mass, 0.0)


def _mixture_integrand(p, K):
    """Conditional (given Y = y) call value times the density, with its y -> 0 limit."""
    s, m, tau = p.s, p.m, p.tau
    dens = p.law.density
    if p.c > 0:
        gap = K - tau
        log_gap = math.log(gap)
        lim = max(math.exp(m) - gap, 0.0) if m != log_gap else 0.5 * (math.exp(m) - gap)

        def f(y):
            if y <= SMALL_Y:
                return lim * float(dens(y))
            sy = s * math.sqrt(y)
            d12 = (m - log_gap) / sy
            d11 = d12 + sy
            val = math.exp(0.5 * s * s * y + m) * norm_cdf(d11) - gap * norm_cdf(d12)
            return val * float(dens(y))
    else:
        gap = -K - tau
        log_gap = math.log(gap)
        lim = max(gap - math.exp(m), 0.0) if m != log_gap else 0.5 * (gap - math.exp(m))

        def f(y):
            if y <= SMALL_Y:
                return lim * float(dens(y))
            sy = s * math.sqrt(y)
            d22 = (log_gap - m) / sy
            d21 = d22 - sy
            val = -math.exp(0.5 * s * s * y + m) * norm_cdf(d21) + gap * norm_cdf(d22)
            return val * float(dens(y))
    return f


def price_mixture(p, K, r, T, rtol=QUAD_RTOL):
    """Mixture price: closed form in the deep branches, otherwise quadrature over Y."""
    K = float(K)
    disc = math.exp(-r * T)
    law = p.law
    case = select_case(p.c, K, p.tau)
    if case is Case.C1_KleTau:
        price = disc * (math.exp(p.m) * float(law.mgf(0.5 * p.s * p.s)) + p.tau - K)
        return PriceResult(max(price, 0.0), Method.mixture_quadrature, {"case": case.value, "quad_error": 0.0})
    if case is Case.Cneg_KgeNegTau:
        return PriceResult(0.0, Method.mixture_quadrature, {"case": case.value, "quad_error": 0.0})
    gap = K - p.tau if p.c > 0 else -K - p.tau
    if gap < _TINY_GAP:
        price = disc * (math.exp(p.m) * float(law.mgf(0.5 * p.s * p.s)) + p.tau - K) if p.c > 0 else 0.0
        return PriceResult(max(price, 0.0), Method.mixture_quadrature, {"case": case.value, "quad_error": 0.0})
    if law.point_mass is not None:
        return _point_mass_price(p, K, r, T, case)
    if law.density is None:
        raise BasketError(f"law {law.label!r} has no density; cannot integrate over the time change")
    y_max, tail = _tail_point(law)
    if tail > 1e-10:
        warnings.warn(f"truncated tail mass {tail:.2e} of {law.label!r} exceeds 1e-10", TailTruncationWarning)
    f = _mixture_integrand(p, K)
    value, err, info = integrate.quad(f, 0.0, y_max, epsabs=0.0, epsrel=rtol * 0.1, limit=500, full_output=1)[:3]
    if err > rtol * max(abs(value), 1e-300) and err > 1e-14:
        raise QuadratureError(
            f"quadrature did not reach rtol {rtol:g} (estimate {value:.10g}, error {err:.2e}, "
            f"{info.get('neval', '?')} evaluations)"
        )
    price = disc * value
    return PriceResult(max(price, 0.0), Method.mixture_quadrature,
                       {"case": case.value, "quad_error": disc * err, "y_max": y_max, "tail_mass": tail})


def _point_mass_price(p, K, r, T, case):
    t = p.law.point_mass
    s_eff = p.s * math.sqrt(t)
    res = price_lognormal(ShiftedLognormalParams(p.c, s_eff, p.m, p.tau, math.exp(s_eff * s_eff)), K, r, T)
    return PriceResult(res.price, Method.mixture_quadrature, {"case": case.value, "quad_error": 0.0})


def normal_price(mu, sigma, K, r, T):
    """Call on a normal variable N(mu, sigma^2), discounted."""
    disc = math.exp(-r * T)
    if sigma == 0:
        return disc * max(mu - K, 0.0)
    d = (mu - K) / sigma
    return disc * ((mu - K) * float(norm_cdf(d)) + sigma * float(norm_pdf(d)))


def black_scholes_call(S0, K, sigma, r, T):
    S0, K, sigma, r, T = float(S0), float(K), float(sigma), float(r), float(T)
    fwd = S0 * math.exp(r * T)
    disc = math.exp(-r * T)
    if K <= 0:
        return S0 - disc * K
    if sigma == 0:
        return disc * max(fwd - K, 0.0)
    sd = sigma * math.sqrt(T)
    d1 = (math.log(fwd / K) + 0.5 * sd * sd) / sd
    return S0 * float(norm_cdf(d1)) - disc * K * float(norm_cdf(d1 - sd))


def price_basket(spec, law=None, eta_min=ETA_MIN):
    """Moments -> calibration -> price, with the degenerate fallbacks.

    ``law=None`` (or ``"lognormal"``) uses the log-normal closed form;
    otherwise the named or supplied mixing law.
    """
    law = resolve_law(law)
    r, T, K = spec.rate, spec.horizon, spec.strike
    ms = basket_moments_lognormal(spec) if law is None else basket_moments_mixture(spec, law)
    if ms.sigma_B == 0:
        return PriceResult(math.exp(-r * T) * max(ms.mu_B - K, 0.0), Method.deterministic,
                           {"moments": ms})
    if abs(ms.eta_B) <= eta_min:
        return PriceResult(normal_price(ms.mu_B, ms.sigma_B, K, r, T), Method.normal_fallback,
                           {"moments": ms, "case": "normal_fallback"})
    try:
        if law is None:
            p = calibrate_lognormal(ms, eta_min)
            res = price_lognormal(p, K, r, T)
        else:
            p = calibrate_mixture(ms, law, eta_min)
            res = price_mixture(p, K, r, T)
    except BasketError as exc:
        label = "lognormal" if law is None else law.label
        exc.args = (f"{label} pricing failed: {exc}",) + exc.args[1:]
        raise
    diag = dict(res.diagnostics)
    diag.update(moments=ms, params=p)
    return PriceResult(res.price, res.method, diag)
