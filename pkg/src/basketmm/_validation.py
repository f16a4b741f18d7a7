"""Input checking helpers used by the public constructors and the estimator."""
import numbers

import numpy as np

from .exceptions import InvalidBasketError


def as_float_vector(values, name, *, allow_scalar=False):
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0 and allow_scalar:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidBasketError(f"{name} must be a non-empty 1-D sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidBasketError(f"{name} contains non-finite values")
    return arr


def as_correlation(corr, n):
    """Accept a full matrix, a scalar (constant off-diagonal) or an upper-triangle list."""
    arr = np.asarray(corr, dtype=float)
    if arr.ndim == 0:
        mat = np.full((n, n), float(arr))
        np.fill_diagonal(mat, 1.0)
    elif arr.ndim == 1:
        expected = n * (n - 1) // 2
        if arr.size != expected:
            raise InvalidBasketError(
                f"upper-triangle correlation list needs {expected} entries for n={n}, got {arr.size}"
            )
        mat = np.eye(n)
        iu = np.triu_indices(n, k=1)
        mat[iu] = arr
        mat[(iu[1], iu[0])] = arr
    else:
        mat = arr.copy()
    if mat.shape != (n, n):
        raise InvalidBasketError(f"correlation must be {n}x{n}, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InvalidBasketError("correlation contains non-finite values")
    if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-14):
        raise InvalidBasketError("correlation matrix is not symmetric")
    if not np.allclose(np.diag(mat), 1.0, rtol=0.0, atol=1e-14):
        raise InvalidBasketError("correlation matrix must have a unit diagonal")
    if np.any(np.abs(mat) > 1.0 + 1e-14):
        raise InvalidBasketError("correlations must lie in [-1, 1]")
    mat = 0.5 * (mat + mat.T)
    np.fill_diagonal(mat, 1.0)
    return mat


def check_real(value, name, *, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (numbers.Real, np.floating, np.integer)):
        raise InvalidBasketError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidBasketError(f"{name} must be finite")
    if positive and value <= 0:
        raise InvalidBasketError(f"{name} must be > 0, got {value}")
    if nonnegative and value < 0:
        raise InvalidBasketError(f"{name} must be >= 0, got {value}")
    return value


def check_strikes(K):
    arr = np.asarray(K, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidBasketError("strikes must be finite")
    return arr


def readonly(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr
