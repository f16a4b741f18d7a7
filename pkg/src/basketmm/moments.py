"""Exact first three moments of a signed basket of assets.

Both model classes share one computation.  Writing each asset as
``g * a_i * X_i`` with ``a_i = w_i S_i(0)``, ``g = e^{rT}`` and ``E[X_i] = 1``,
only the pair and triple excess factors

    P_ij  = E[X_i X_j] - 1
    Q_ijk = E[X_i X_j X_k] - 1

differ between the log-normal model and a normal variance mixture.  Raw and
central moments are then assembled from them with exact (``math.fsum``)
accumulation, which keeps near-symmetric spreads from cancelling away.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_correlation, as_float_vector, check_real, readonly
from .exceptions import DegenerateBasketError, InvalidBasketError, MgfDomainError, NotPSDError

PSD_PIVOT_TOL = 1e-10
# Central third moments below this (times max(1, |m1|^3)) are reported as exact zero skew.
SKEW_ZERO_TOL = 1e-12
VARIANCE_CANCEL_TOL = 1e-9


@dataclass(frozen=True)
class BasketSpec:
    weights: np.ndarray
    spots: np.ndarray
    vols: np.ndarray
    corr: np.ndarray
    rate: float = 0.0
    horizon: float = 1.0
    strike: float = 0.0

    def __post_init__(self):
        w = as_float_vector(self.weights, "weights", allow_scalar=True)
        n = w.size
        s0 = as_float_vector(self.spots, "spots", allow_scalar=True)
        vol = as_float_vector(self.vols, "vols", allow_scalar=True)
        if s0.size != n or vol.size != n:
            raise InvalidBasketError(
                f"weights, spots and vols must share length; got {n}, {s0.size}, {vol.size}"
            )
        if np.any(s0 <= 0):
            raise InvalidBasketError("spots must be strictly positive")
        if np.any(vol < 0):
            raise InvalidBasketError("vols must be non-negative")
        if not np.any(w != 0):
            raise InvalidBasketError("at least one weight must be non-zero")
        corr = as_correlation(self.corr, n)
        object.__setattr__(self, "weights", readonly(w))
        object.__setattr__(self, "spots", readonly(s0))
        object.__setattr__(self, "vols", readonly(vol))
        object.__setattr__(self, "rate", check_real(self.rate, "rate"))
        object.__setattr__(self, "horizon", check_real(self.horizon, "horizon", positive=True))
        object.__setattr__(self, "strike", check_real(self.strike, "strike"))
        # raises NotPSDError for an invalid matrix
        factor = factorize_correlation(corr)
        object.__setattr__(self, "corr", readonly(corr))
        object.__setattr__(self, "_factor", factor)

    @property
    def n_assets(self):
        return self.weights.size

    @property
    def initial_value(self):
        """B(0) = sum_i w_i S_i(0)."""
        return math.fsum(self.weights * self.spots)

    @property
    def factor(self):
        return self._factor

    def with_strike(self, strike):
        return BasketSpec(self.weights, self.spots, self.vols, self.corr,
                          self.rate, self.horizon, strike)

    def permuted(self, order):
        order = np.asarray(order)
        return BasketSpec(self.weights[order], self.spots[order], self.vols[order],
                          self.corr[np.ix_(order, order)], self.rate, self.horizon, self.strike)

    def scaled(self, lam):
        return BasketSpec(lam * self.weights, self.spots, self.vols, self.corr,
                          self.rate, self.horizon, self.strike)

    def __eq__(self, other):
        if not isinstance(other, BasketSpec):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and np.array_equal(self.spots, other.spots)
            and np.array_equal(self.vols, other.vols)
            and np.array_equal(self.corr, other.corr)
            and self.rate == other.rate
            and self.horizon == other.horizon
            and self.strike == other.strike
        )

    __hash__ = None


@dataclass(frozen=True)
class MomentSummary:
    m1: float
    m2: float
    m3: float
    mu_B: float
    sigma_B: float
    eta_B: float
    # E[(B - mu)^3]; kept separately because m3 - 3 m1 m2 + 2 m1^3 loses digits.
    central3: float = field(default=float("nan"), compare=False)

    @property
    def skew_defined(self):
        return self.sigma_B > 0 and np.isfinite(self.eta_B)

    @classmethod
    def from_summary(cls, mu, sigma, eta):
        """Build raw moments from (mean, stdev, skewness)."""
        mu, sigma, eta = float(mu), float(sigma), float(eta)
        if sigma < 0:
            raise InvalidBasketError("sigma must be non-negative")
        m2 = sigma * sigma + mu * mu
        c3 = eta * sigma ** 3
        m3 = c3 + 3.0 * mu * sigma * sigma + mu ** 3
        return cls(mu, m2, m3, mu, sigma, eta, c3)

    @classmethod
    def from_raw(cls, m1, m2, m3):
        m1, m2, m3 = float(m1), float(m2), float(m3)
        var = m2 - m1 * m1
        c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3
        return _summarize(m1, m2, m3, var, c3)


@dataclass(frozen=True)
class CorrelationFactor:
    A: np.ndarray

    def reconstruction_error(self, corr):
        return float(np.max(np.abs(self.A @ self.A.T - np.asarray(corr))))


def factorize_correlation(corr):
    """Lower-triangular ``A`` with ``A @ A.T == corr``.

    Rank-deficient (semidefinite) matrices are handled by zeroing the column of
    a vanishing pivot; a pivot below ``-PSD_PIVOT_TOL`` means the matrix is not
    positive semidefinite.
    """
    S = np.array(corr, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n):
        raise InvalidBasketError("correlation must be square")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-14):
        raise InvalidBasketError("correlation matrix is not symmetric")
    A = np.zeros((n, n))
    for j in range(n):
        pivot = S[j, j] - math.fsum(A[j, :j] ** 2)
        if pivot < -PSD_PIVOT_TOL:
            raise NotPSDError(f"correlation matrix is not positive semidefinite (pivot {pivot:.3e} at {j})")
        if pivot <= PSD_PIVOT_TOL:
            residual = S[j + 1:, j] - A[j + 1:, :j] @ A[j, :j]
            if residual.size and np.max(np.abs(residual)) > 1e-7:
                raise NotPSDError(
                    f"correlation matrix is not positive semidefinite (zero pivot at {j} "
                    f"with residual {np.max(np.abs(residual)):.3e})"
                )
            continue
        d = math.sqrt(pivot)
        A[j, j] = d
        A[j + 1:, j] = (S[j + 1:, j] - A[j + 1:, :j] @ A[j, :j]) / d
    err = np.max(np.abs(A @ A.T - S))
    if err > 1e-12:
        raise NotPSDError(f"correlation factor reconstruction error {err:.3e} exceeds 1e-12")
    A.setflags(write=False)
    return CorrelationFactor(A)


def _summarize(m1, m2, m3, var, c3):
    if var < 0:
        if var < -VARIANCE_CANCEL_TOL * max(m1 * m1, 1.0):
            raise DegenerateBasketError(f"basket variance is negative ({var:.6e})")
        var = 0.0
    sigma = math.sqrt(var)
    if sigma == 0.0:
        eta = float("nan")
    elif abs(c3) < SKEW_ZERO_TOL * max(1.0, abs(m1) ** 3):
        eta = 0.0
    else:
        eta = c3 / sigma ** 3
    return MomentSummary(m1, m2, m3, m1, sigma, eta, c3)


def _assemble(a, growth, P, Q):
    """Raw and central moments from excess factors P (n x n) and Q (n x n x n)."""
    aa = np.multiply.outer(a, a)
    aaa = np.multiply.outer(aa, a)
    g = growth
    m1 = g * math.fsum(a)
    m2 = g * g * (math.fsum(aa.ravel()) + math.fsum((aa * P).ravel()))
    m3 = g ** 3 * (math.fsum(aaa.ravel()) + math.fsum((aaa * Q).ravel()))
    var = g * g * math.fsum((aa * P).ravel())
    Pij = P[:, :, None]
    Pik = P[:, None, :]
    Pjk = P[None, :, :]
    centred = Q - Pij - Pik - Pjk
    c3 = g ** 3 * math.fsum((aaa * centred).ravel())
    return _summarize(m1, m2, m3, var, c3)


def basket_moments_lognormal(spec):
    """Moments of B(T) = sum_i w_i S_i(0) exp((r - vol_i^2/2) T + vol_i sqrt(T) N_i)."""
    a = spec.weights * spec.spots
    vol = spec.vols
    C = spec.corr * np.multiply.outer(vol, vol) * spec.horizon
    P = np.expm1(C)
    Q = np.expm1(C[:, :, None] + C[:, None, :] + C[None, :, :])
    return _assemble(a, math.exp(spec.rate * spec.horizon), P, Q)


def mixture_mgf_arguments(spec):
    """Return (single, pair, triple) MGF arguments used by the mixture moments."""
    vol = spec.vols
    half = 0.5 * vol * vol
    cov = spec.corr * np.multiply.outer(vol, vol)
    pair = half[:, None] + half[None, :] + cov
    triple = (half[:, None, None] + half[None, :, None] + half[None, None, :]
              + cov[:, :, None] + cov[:, None, :] + cov[None, :, :])
    return half, pair, triple


def basket_moments_mixture(spec, law):
    """Moments of the subordinated basket with common time change ``law``.

    Each asset is normalised by ``mgf(vol_i^2 / 2)`` so discounted prices are
    martingales; the MGF ratios are evaluated through the law's cumulant
    generating function.
    """
    half, pair, triple = mixture_mgf_arguments(spec)
    worst = float(np.max(triple))
    if not worst < law.mgf_domain_bound:
        raise MgfDomainError(worst, law.mgf_domain_bound, law.label)
    k1 = law.cgf(half)
    P = np.expm1(law.cgf(pair) - k1[:, None] - k1[None, :])
    Q = np.expm1(law.cgf(triple) - k1[:, None, None] - k1[None, :, None] - k1[None, None, :])
    return _assemble(spec.weights * spec.spots, math.exp(spec.rate * spec.horizon), P, Q)
