"""Time-change (mixing) distributions for the normal variance mixture model."""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import SamplerError, UnknownLawError
from .normal import norm_cdf, norm_ppf


@dataclass(frozen=True)
class MixingLaw:
    """Law of the terminal business time ``Y_T``.

    ``mgf`` must be finite on ``[0, mgf_domain_bound)``.  ``sampler(rng, size)``
    receives a ``numpy.random.Generator`` owned by the caller.  ``log_mgf``
    and ``sf`` are optional; supplying the log-MGF in closed form improves the
    conditioning of the shape calibration for small skewness.
    """

    mgf: Callable
    mgf_domain_bound: float
    density: Optional[Callable] = None
    sampler: Optional[Callable] = None
    label: str = "custom"
    log_mgf: Optional[Callable] = None
    sf: Optional[Callable] = None
    point_mass: Optional[float] = None

    def cgf(self, s):
        s = np.asarray(s, dtype=float)
        if self.log_mgf is not None:
            return self.log_mgf(s)
        return np.log(self.mgf(s))

    def in_domain(self, s):
        return bool(np.all(np.asarray(s) < self.mgf_domain_bound))

    def __repr__(self):
        return f"MixingLaw({self.label!r}, bound={self.mgf_domain_bound})"


def _exp1_sample(rng, size):
    return -np.log1p(-rng.random(size))


def _gamma22_sample(rng, size):
    shape = (2,) + (tuple(size) if np.iterable(size) else (int(size),))
    u = rng.random(shape)
    return -0.5 * (np.log1p(-u[0]) + np.log1p(-u[1]))


def inverse_gaussian_sample(rng, size, mu=1.0, lam=2.0):
    """Michael-Schucany-Haas transform with inverse-cdf normals."""
    nu = norm_ppf(rng.random(size))
    y = nu * nu
    # larger root of lam (x - mu)^2 = mu^2 y x; the smaller one is mu^2 / larger
    big = mu + mu * mu * y / (2.0 * lam) + mu / (2.0 * lam) * np.sqrt(4.0 * mu * lam * y + mu * mu * y * y)
    small = mu * mu / big
    u = rng.random(size)
    out = np.where(u <= mu / (mu + small), small, big)
    bad = ~(np.isfinite(out) & (out > 0))
    if np.any(bad):
        idx = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise SamplerError(f"inverse Gaussian transform broke down at draw {idx}", path_index=idx)
    return out


def _ig12_sample(rng, size):
    return inverse_gaussian_sample(rng, size, 1.0, 2.0)


def _ig12_density(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sqrt(2.0 / (2.0 * math.pi * y ** 3)) * np.exp(-2.0 * (y - 1.0) ** 2 / (2.0 * y))
    return np.where(y > 0, val, 0.0)


def _ig12_sf(y):
    y = np.asarray(y, dtype=float)
    r = np.sqrt(2.0 / y)
    return norm_cdf(-r * (y - 1.0)) - math.exp(4.0) * norm_cdf(-r * (y + 1.0))


def exponential_law():
    return MixingLaw(
        mgf=lambda s: 1.0 / (1.0 - np.asarray(s, dtype=float)),
        mgf_domain_bound=1.0,
        density=lambda y: np.where(np.asarray(y) > 0, np.exp(-np.asarray(y, dtype=float)), 0.0),
        sampler=_exp1_sample,
        label="exp1",
        log_mgf=lambda s: -np.log1p(-np.asarray(s, dtype=float)),
        sf=lambda y: np.exp(-np.asarray(y, dtype=float)),
    )


def gamma22_law():
    # shape 2, rate 2 (mean 1), matching the MGF (2 / (2 - s))^2
    return MixingLaw(
        mgf=lambda s: (2.0 / (2.0 - np.asarray(s, dtype=float))) ** 2,
        mgf_domain_bound=2.0,
        density=lambda y: np.where(np.asarray(y) > 0, 4.0 * np.asarray(y, dtype=float) * np.exp(-2.0 * np.asarray(y, dtype=float)), 0.0),
        sampler=_gamma22_sample,
        label="gamma22",
        log_mgf=lambda s: -2.0 * np.log1p(-0.5 * np.asarray(s, dtype=float)),
        sf=lambda y: (1.0 + 2.0 * np.asarray(y, dtype=float)) * np.exp(-2.0 * np.asarray(y, dtype=float)),
    )


def inverse_gaussian_law():
    # IG(mean 1, shape 2): mgf exp(2 (1 - sqrt(1 - s)))
    def log_mgf(s):
        s = np.asarray(s, dtype=float)
        # 1 - sqrt(1 - s) written without cancellation
        return 2.0 * s / (1.0 + np.sqrt(1.0 - s))

    return MixingLaw(
        mgf=lambda s: np.exp(log_mgf(s)),
        mgf_domain_bound=1.0,
        density=_ig12_density,
        sampler=_ig12_sample,
        label="ig12",
        log_mgf=log_mgf,
        sf=_ig12_sf,
    )


def point_mass_law(t=1.0):
    """Deterministic clock Y = t; with t equal to the horizon this is the log-normal model."""
    t = float(t)

    def sampler(rng, size):
        return np.full(size, t)

    return MixingLaw(
        mgf=lambda s: np.exp(t * np.asarray(s, dtype=float)),
        mgf_domain_bound=math.inf,
        density=None,
        sampler=sampler,
        label="pointmass" if t == 1.0 else f"pointmass({t:g})",
        log_mgf=lambda s: t * np.asarray(s, dtype=float),
        sf=None,
        point_mass=t,
    )


_BUILTIN = {
    "exp1": exponential_law,
    "gamma22": gamma22_law,
    "ig12": inverse_gaussian_law,
    "pointmass": point_mass_law,
}

BUILTIN_LAWS = tuple(_BUILTIN)


def builtin_law(name):
    try:
        return _BUILTIN[name]()
    except KeyError:
        raise UnknownLawError(f"unknown mixing law {name!r}; expected one of {', '.join(_BUILTIN)}") from None


def resolve_law(law):
    """None stays None (log-normal); strings are looked up; MixingLaw passes through."""
    if law is None or isinstance(law, MixingLaw):
        return law
    if isinstance(law, str):
        if law == "lognormal":
            return None
        return builtin_law(law)
    raise TypeError(f"law must be None, a name or a MixingLaw, got {type(law).__name__}")
