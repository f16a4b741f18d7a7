"""scikit-learn style front end: ``fit`` calibrates, ``predict`` prices strikes."""
import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_real, check_strikes
from .calibrate_lognormal import ETA_MIN, calibrate_lognormal
from .calibrate_mixture import calibrate_mixture
from .exceptions import InvalidBasketError
from .greeks import greeks_lognormal
from .laws import resolve_law
from .moments import BasketSpec, MomentSummary, basket_moments_lognormal, basket_moments_mixture
from .pricing import Method, normal_price, price_lognormal, price_mixture


class ShiftedLognormalBasketPricer(BaseEstimator):
    """Moment-matched shifted log-normal call pricer.

    Parameters
    ----------
    law : None, str or MixingLaw
        ``None``/``"lognormal"`` for the log-normal model, otherwise a mixing
        law (``"exp1"``, ``"gamma22"``, ``"ig12"``, ``"pointmass"`` or a
        ``MixingLaw`` instance).
    eta_min : float
        Skewness magnitude under which the normal approximation is used.

    ``fit`` accepts a :class:`BasketSpec`, a :class:`MomentSummary`, or a 1-D
    array of simulated terminal basket values (sample moments are matched).
    Rate and horizon come from the BasketSpec, or from the ``rate``/``horizon`` fit
    arguments otherwise.
    """

    def __init__(self, law=None, eta_min=ETA_MIN):
        self.law = law
        self.eta_min = eta_min

    def fit(self, X, y=None, *, rate=None, horizon=None):
        law = resolve_law(self.law)
        if isinstance(X, BasketSpec):
            ms = basket_moments_lognormal(X) if law is None else basket_moments_mixture(X, law)
            rate = X.rate if rate is None else rate
            horizon = X.horizon if horizon is None else horizon
        elif isinstance(X, MomentSummary):
            ms = X
        else:
            samples = np.asarray(X, dtype=float).ravel()
            if samples.size < 3 or not np.all(np.isfinite(samples)):
                raise InvalidBasketError("need at least three finite basket samples")
            mu = samples.mean()
            dev = samples - mu
            ms = MomentSummary.from_summary(mu, np.sqrt(np.mean(dev ** 2)),
                                            np.mean(dev ** 3) / np.mean(dev ** 2) ** 1.5
                                            if np.any(dev) else 0.0)
        self.rate_ = check_real(0.0 if rate is None else rate, "rate")
        self.horizon_ = check_real(1.0 if horizon is None else horizon, "horizon", positive=True)
        self.moments_ = ms
        self.law_ = law
        if ms.sigma_B == 0:
            self.method_, self.params_ = Method.deterministic, None
        elif abs(ms.eta_B) <= self.eta_min:
            self.method_, self.params_ = Method.normal_fallback, None
        elif law is None:
            self.method_, self.params_ = Method.closed_form_lognormal, calibrate_lognormal(ms, self.eta_min)
        else:
            self.method_, self.params_ = Method.mixture_quadrature, calibrate_mixture(ms, law, self.eta_min)
        return self

    def _price_one(self, K):
        ms, r, T = self.moments_, self.rate_, self.horizon_
        if self.method_ is Method.deterministic:
            return math.exp(-r * T) * max(ms.mu_B - K, 0.0)
        if self.method_ is Method.normal_fallback:
            return normal_price(ms.mu_B, ms.sigma_B, K, r, T)
        if self.method_ is Method.closed_form_lognormal:
            return price_lognormal(self.params_, K, r, T).price
        return price_mixture(self.params_, K, r, T).price

    def predict(self, K):
        """Discounted call prices for strike(s) ``K``; output matches the input shape."""
        check_is_fitted(self, "moments_")
        K = check_strikes(K)
        out = np.array([self._price_one(float(k)) for k in K.ravel()])
        return out.reshape(K.shape) if K.ndim else float(out[0])

    def greeks(self, K):
        """Sensitivities to (mean, stdev, skewness); log-normal model only."""
        check_is_fitted(self, "moments_")
        if self.method_ is not Method.closed_form_lognormal:
            raise InvalidBasketError("analytic greeks exist only for the log-normal closed form")
        return greeks_lognormal(self.params_, self.moments_, float(K), self.rate_, self.horizon_)
