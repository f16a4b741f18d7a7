"""Standard normal cdf and density.

``ndtr`` evaluates the cdf through erf/erfc (Cephes), switching to the
complementary function in the tails so relative accuracy is kept for very
negative arguments.
"""
import numpy as np
from scipy.special import ndtr, ndtri

_INV_SQRT_2PI = 0.3989422804014327


def norm_cdf(z):
    return ndtr(z)


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def norm_ppf(u):
    return ndtri(u)
