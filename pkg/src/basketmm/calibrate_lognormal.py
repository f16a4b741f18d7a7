"""Closed-form moment matching for the shifted log-normal ``c (exp(s N + m) + tau)``."""
import math
from dataclasses import dataclass

from .exceptions import DegenerateSkewError, ZeroVarianceError
from .moments import MomentSummary

ETA_MIN = 1e-8


@dataclass(frozen=True)
class ShiftedLognormalParams:
    c: int
    s: float
    m: float
    tau: float
    x: float
    # x - 1 evaluated without cancellation; equals x - 1 up to rounding
    x_minus_1: float = float("nan")


def _cardano_terms(eta):
    a = abs(float(eta))
    u = 1.0 + 0.5 * a * a + a * math.sqrt(1.0 + 0.25 * a * a)
    # the two radicands multiply to exactly one
    return u, 1.0 / u


def solve_cubic_skew(eta):
    """Real root of x^3 + 3x^2 - 4 - eta^2 = 0 via Cardano's formula.

    The depressed cubic in y = x + 1 has radicands
    ``1 + eta^2/2 +/- eta sqrt(1 + eta^2/4)`` whose product is one, so the
    second is formed as the reciprocal of the first; this keeps both cube roots
    on the real branch with no loss of digits for large |eta|.
    """
    eta = float(eta)
    if not math.isfinite(eta):
        raise ValueError("eta must be finite")
    if eta == 0.0:
        return 1.0
    u, v = _cardano_terms(eta)
    x = math.copysign(abs(u) ** (1.0 / 3.0), u) + math.copysign(abs(v) ** (1.0 / 3.0), v) - 1.0
    if abs(eta) > 1e6:
        fx = (x * x * x + 3.0 * x * x - 4.0) - eta * eta
        x -= fx / (3.0 * x * x + 6.0 * x)
    return x


def cubic_root_minus_one(eta):
    """x - 1 for the cubic root, as 4 sinh^2(asinh(|eta|/2) / 3).

    Same value as ``solve_cubic_skew(eta) - 1`` but accurate to full relative
    precision when eta is small, where x - 1 ~ eta^2 / 9.
    """
    t = math.sinh(math.asinh(0.5 * abs(float(eta))) / 3.0)
    return 4.0 * t * t


def calibrate_lognormal(ms, eta_min=ETA_MIN):
    """Parameters (c, s, m, tau) matching the first three moments of ``ms``."""
    if not ms.sigma_B > 0:
        raise ZeroVarianceError("basket has zero variance; the shifted log-normal is undefined")
    eta = ms.eta_B
    if not math.isfinite(eta) or abs(eta) <= eta_min:
        raise DegenerateSkewError(
            f"|skewness| = {abs(eta):.3g} <= {eta_min:g}; use the normal approximation instead"
        )
    c = 1 if eta > 0 else -1
    x = solve_cubic_skew(eta)
    xm1 = cubic_root_minus_one(eta)
    s = math.sqrt(math.log1p(xm1))
    sigma = ms.sigma_B
    m = math.log(sigma) - 0.5 * (math.log1p(xm1) + math.log(xm1))
    tau = c * ms.mu_B - sigma / math.sqrt(xm1)
    return ShiftedLognormalParams(c, s, m, tau, x, xm1)


def approximant_moments_lognormal(p):
    """Moments of ``c (exp(s N + m) + tau)``."""
    c, s, m, tau = p.c, p.s, p.m, p.tau
    m1 = c * (math.exp(0.5 * s * s + m) + tau)
    # central moments straight from the log-normal part (shift drops out);
    # expanding powers of tau instead loses digits when tau >> stdev
    xm1 = math.expm1(s * s)
    var = math.exp(2.0 * m) * math.exp(s * s) * xm1
    c3 = c * math.exp(3.0 * m + 1.5 * s * s) * xm1 * xm1 * (xm1 + 3.0)
    return _from_central(m1, var, c3)


def _from_central(m1, var, c3):
    sigma = math.sqrt(var)
    m2 = var + m1 * m1
    m3 = c3 + 3.0 * m1 * var + m1 ** 3
    return MomentSummary(m1, m2, m3, m1, sigma, c3 / sigma ** 3, c3)
