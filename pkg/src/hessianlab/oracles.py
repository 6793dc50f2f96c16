"""Brute-force and finite-difference oracles.

Independent evaluation paths used to audit the production code: subset
enumeration for sigma_k, principal-minor enumeration for sigma_k of a matrix,
central finite differences for jets, and dense-search convex conjugates.
Nothing here is fast; everything here is simple enough to trust.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "sigma_subsets",
    "sigma_subsets_exact",
    "principal_minor_sum",
    "fd_gradient",
    "fd_hessian_of_gradient",
    "fd_hessian_of_value",
    "log_sum_hessian_second_difference",
    "conjugate_dense",
]


def sigma_subsets(k: int, values) -> float:
    """sigma_k by summing products over all k-subsets."""
    vals = list(np.asarray(values, dtype=np.float64))
    if k == 0:
        return 1.0
    if k > len(vals):
        return 0.0
    return float(sum(math.prod(c) for c in combinations(vals, k)))


def sigma_subsets_exact(k: int, values: Sequence) -> Fraction:
    vals = [Fraction(v) for v in values]
    if k == 0:
        return Fraction(1)
    if k > len(vals):
        return Fraction(0)
    return sum((math.prod(c) for c in combinations(vals, k)), Fraction(0))


def principal_minor_sum(k: int, matrix) -> float:
    """Sum of all k x k principal minors of a square matrix."""
    m = np.asarray(matrix, dtype=np.float64)
    n = m.shape[0]
    total = 0.0
    for rows in combinations(range(n), k):
        idx = np.asarray(rows)
        total += float(np.linalg.det(m[np.ix_(idx, idx)]))
    return total


def fd_gradient(f: Callable[[np.ndarray], float], x, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    g = np.empty_like(x)
    for p in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[p] += step
        lo[p] -= step
        g[p] = (f(hi) - f(lo)) / (2.0 * step)
    return g


def fd_hessian_of_gradient(
    grad: Callable[[np.ndarray], np.ndarray], x, step: float = 1e-5
) -> np.ndarray:
    """Central-difference Jacobian of a gradient, symmetrized."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    h = np.empty((n, n))
    for q in range(n):
        hi = x.copy()
        lo = x.copy()
        hi[q] += step
        lo[q] -= step
        h[:, q] = (grad(hi) - grad(lo)) / (2.0 * step)
    return 0.5 * (h + h.T)


def fd_hessian_of_value(f: Callable[[np.ndarray], float], x, step=1e-4) -> np.ndarray:
    """Full second-difference Hessian of a scalar function (mixed terms included).

    `step` may be a scalar or a per-coordinate vector; vector steps keep the
    stencil resolved when coordinates live on very different scales.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    steps = np.broadcast_to(np.asarray(step, dtype=np.float64), (n,))
    h = np.empty((n, n))
    f0 = f(x)
    for p in range(n):
        ep = np.zeros(n)
        ep[p] = steps[p]
        h[p, p] = (f(x + ep) - 2.0 * f0 + f(x - ep)) / steps[p] ** 2
        for q in range(p + 1, n):
            eq = np.zeros(n)
            eq[q] = steps[q]
            mixed = (
                f(x + ep + eq) - f(x + ep - eq) - f(x - ep + eq) + f(x - ep - eq)
            ) / (4.0 * steps[p] * steps[q])
            h[p, q] = mixed
            h[q, p] = mixed
    return h


def log_sum_hessian_second_difference(
    lam, k: int, xi, step: float = 1e-4
) -> float:
    """d^2/dt^2 of log S_k(lam + t xi) at t = 0 by central differences."""
    from . import symfun

    lam = np.asarray(lam, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)

    def val(t: float) -> float:
        return math.log(symfun.sum_hessian(k, lam + t * xi))

    return (val(step) - 2.0 * val(0.0) + val(-step)) / step**2


def conjugate_dense(points: np.ndarray, values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Convex conjugate sup_x (<x, y> - f(x)) over a finite point cloud.

    `points` is (N, d), `values` is (N,), `targets` is (M, d); plain dense
    search, one target at a time.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(targets.shape[0])
    for i, y in enumerate(targets):
        out[i] = np.max(points @ y - values)
    return out
