"""Sensitivities of the log-normal approximation price to (mean, stdev, skewness)."""
import math
from dataclasses import dataclass

from .calibrate_lognormal import ETA_MIN, _cardano_terms, calibrate_lognormal
from .exceptions import BoundaryError, DegenerateSkewError, WrongBranchError
from .moments import MomentSummary
from .normal import norm_cdf, norm_pdf
from .pricing import Case, price_lognormal, pricing_terms


@dataclass(frozen=True)
class GreekTriple:
    dP_dmu: float
    dP_dsigma: float
    dP_deta: float
    dx_deta: float
    case: str


def dx_deta(eta):
    """Derivative of the Cardano root with respect to the skewness.

    Evaluated for |eta| and given the sign of eta, since the root is even in eta.
    """
    eta = float(eta)
    if not abs(eta) > ETA_MIN:
        raise DegenerateSkewError(f"dx/deta has a 0/0 form at |eta| <= {ETA_MIN:g}")
    a = abs(eta)
    u, v = _cardano_terms(a)
    root = math.sqrt(1.0 + 0.25 * a * a)
    lead = (1.0 + 0.5 * a * a) / root
    val = (u ** (-2.0 / 3.0) * (a + lead) + v ** (-2.0 / 3.0) * (a - lead)) / 3.0
    return math.copysign(val, eta)


def _check_boundary(p, K):
    if p.c > 0:
        gap = K - p.tau
    else:
        gap = K + p.tau
    if abs(gap) < 1e-12 * (1.0 + abs(p.tau)):
        raise BoundaryError(f"strike {K!r} sits on the branch boundary (tau = {p.tau!r})")


def greeks_lognormal(p, ms, K, r, T):
    K = float(K)
    _check_boundary(p, K)
    disc = math.exp(-r * T)
    dx = dx_deta(ms.eta_B)
    terms = pricing_terms(p, K)
    case = terms.case
    if case is Case.C1_KleTau:
        return GreekTriple(disc, 0.0, 0.0, dx, case.value)
    if case is Case.Cneg_KgeNegTau:
        return GreekTriple(0.0, 0.0, 0.0, dx, case.value)
    xm1 = p.x_minus_1 if math.isfinite(p.x_minus_1) else p.x - 1.0
    x = 1.0 + xm1
    sig = ms.sigma_B
    sqrt_xm1 = math.sqrt(xm1)
    sqrt_lnx = p.s
    if case is Case.C1_KgtTau:
        P1, P2 = float(norm_cdf(terms.d11)), float(norm_cdf(terms.d12))
        dmu = disc * P2
        dsig = disc / sqrt_xm1 * (P1 - P2)
        bracket = (P2 - P1) / xm1 + float(norm_pdf(terms.d11)) / (x * sqrt_lnx)
    else:
        P1, P2 = float(norm_cdf(terms.d21)), float(norm_cdf(terms.d22))
        dmu = disc * P2
        dsig = disc / sqrt_xm1 * (P2 - P1)
        bracket = (P1 - P2) / xm1 + float(norm_pdf(terms.d21)) / (x * sqrt_lnx)
    deta = disc * sig / (2.0 * sqrt_xm1) * bracket * dx
    return GreekTriple(dmu, dsig, deta, dx, case.value)


def small_skew_diagnostic(p, ms, K, r, T):
    """Leading coefficients (A, B) of dP/deta ~ A / eta^2 + B / eta for small skew.

    A = 3 e^{-rT} sigma (Phi(d21) - Phi(d22)), B = e^{-rT} sigma phi(d21), both
    evaluated at the calibrated parameters.  Only the negative-skew,
    in-the-money branch carries this expansion.
    """
    terms = pricing_terms(p, float(K))
    if terms.case is not Case.Cneg_KltNegTau:
        raise WrongBranchError(f"small-skew expansion needs branch Cneg_KltNegTau, got {terms.case.value}")
    disc = math.exp(-r * T)
    sig = ms.sigma_B
    A = 3.0 * disc * sig * (float(norm_cdf(terms.d21)) - float(norm_cdf(terms.d22)))
    B = disc * sig * float(norm_pdf(terms.d21))
    return A, B


def price_from_summary(mu, sigma, eta, K, r, T):
    """Closed-form price as a function of the moment summary (recalibrates)."""
    ms = MomentSummary.from_summary(mu, sigma, eta)
    return price_lognormal(calibrate_lognormal(ms), K, r, T).price


def finite_difference_greeks(ms, K, r, T, rel_bump=1e-5):
    """Central differences of the full calibrate-and-price pipeline."""
    mu, sig, eta = ms.mu_B, ms.sigma_B, ms.eta_B
    out = []
    for i, val in enumerate((mu, sig, eta)):
        h = rel_bump * max(abs(val), 1e-8 if i == 2 else 1.0)
        up = [mu, sig, eta]
        dn = [mu, sig, eta]
        up[i] += h
        dn[i] -= h
        out.append((price_from_summary(*up, K, r, T) - price_from_summary(*dn, K, r, T)) / (2.0 * h))
    return tuple(out)
