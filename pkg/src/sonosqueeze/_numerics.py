"""Overflow-safe hyperbolic helpers shared by the physics modules.

Arguments above ``LOG_SPACE_THRESHOLD`` are handled through their
logarithms so that ratios of huge sinh values never overflow.
"""

import numpy as np

LOG_SPACE_THRESHOLD = 30.0
_LN2 = np.log(2.0)


def log_sinh(x):
    """ln sinh(x) for x >= 0 (``-inf`` at 0), vectorised."""
    x = np.asarray(x, dtype=float)
    big = x > LOG_SPACE_THRESHOLD
    with np.errstate(divide="ignore"):
        small = np.log(np.sinh(np.where(big, 1.0, x)))
    large = x - _LN2 + np.log1p(-np.exp(-2.0 * np.where(big, x, LOG_SPACE_THRESHOLD)))
    out = np.where(big, large, small)
    return out[()] if out.ndim == 0 else out


def log_sinh_direct(x):
    with np.errstate(divide="ignore"):
        return np.log(np.sinh(np.asarray(x, dtype=float)))


def log_sinh_asymptotic(x):
    x = np.asarray(x, dtype=float)
    return x - _LN2 + np.log1p(-np.exp(-2.0 * x))


def log1mexp(y):
    """ln(1 - exp(-y)) for y > 0, switching form at ln 2 to avoid cancellation."""
    y = np.asarray(y, dtype=float)
    near = y < _LN2
    with np.errstate(divide="ignore"):
        a = np.log(-np.expm1(-np.where(near, y, _LN2)))
        b = np.log1p(-np.exp(-np.where(near, _LN2, y)))
    return np.where(near, a, b)


def log_coth(z):
    """ln coth(z) for z > 0; accurate for tiny and for large z."""
    z = np.asarray(z, dtype=float)
    out = np.log1p(np.exp(-2.0 * z)) - log1mexp(2.0 * z)
    return out[()] if out.ndim == 0 else out


def artanh_exp_neg(y):
    """artanh(exp(-y)) for y > 0 without forming 1 - exp(-y) by subtraction."""
    y = np.asarray(y, dtype=float)
    out = 0.5 * (np.log1p(np.exp(-y)) - log1mexp(y))
    return out[()] if out.ndim == 0 else out


def sinh_squared(z):
    z = np.asarray(z, dtype=float)
    big = z > LOG_SPACE_THRESHOLD
    with np.errstate(over="ignore"):
        large = np.exp(2.0 * log_sinh(np.where(big, z, LOG_SPACE_THRESHOLD)))
    out = np.where(big, large, np.sinh(np.where(big, 0.0, z)) ** 2)
    return out[()] if out.ndim == 0 else out
