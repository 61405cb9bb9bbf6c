"""Special functions needed by the mode formulas and the Chebyshev series."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["laguerre", "laguerre_derivative", "log_mode_norm", "bessel_j_sequence"]


def laguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^alpha(x) by three-term recurrence."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def laguerre_derivative(n: int, alpha: float, x):
    """d/dx L_n^alpha(x) = -L_{n-1}^{alpha+1}(x)."""
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return -laguerre(n - 1, alpha + 1, x)


def log_mode_norm(n: int, ell: int) -> float:
    """log C_nl with C_nl = sqrt(2 n! / (pi (n+|l|)!)), evaluated in log space."""
    return 0.5 * (math.log(2.0 / math.pi) + math.lgamma(n + 1) - math.lgamma(n + abs(ell) + 1))


_RESCALE = 1e250


def bessel_j_sequence(order: int, x: float) -> np.ndarray:
    """J_0(x) ... J_order(x) for real x >= 0 by Miller's downward recurrence.

    The recurrence is started well above both ``order`` and ``x`` with an
    arbitrary seed, rescaled whenever it grows large, and normalised with
    J_0 + 2 * sum_k J_2k = 1.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    out = np.zeros(order + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    start = int(max(order, x) + 40 + 20 * x ** (1.0 / 3.0))
    start += start % 2  # even start keeps the normalisation sum aligned
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    two_over_x = 2.0 / x
    for j in range(start, 0, -1):
        vals[j - 1] = j * two_over_x * vals[j] - vals[j + 1]
        if abs(vals[j - 1]) > _RESCALE:
            vals[j - 1 :] /= _RESCALE
    norm = vals[0] + 2.0 * vals[2::2].sum()
    vals /= norm
    out[:] = vals[: order + 1]
    return out
