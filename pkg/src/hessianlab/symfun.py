"""Elementary symmetric functions, deleted variants, and sum-Hessian jets.

The sum-Hessian operator of order k is S_k(lam) = sigma_k(lam) + sigma_{k-1}(lam),
evaluated on the eigenvalue vector of a symmetric matrix.  Everything here is a
pure function of its inputs.  Conventions: sigma_0 = 1, sigma_j = 0 for j < 0
and for j > n.

Evaluation uses the incremental polynomial-coefficient recurrence (O(n*k) per
point), which is the stable production path; subset enumeration lives in
`hessianlab.oracles` and is only used to cross-check this module in tests.
Deleted functions sigma_{j;p}, sigma_{j;pq} are recomputed from the surviving
entries rather than by synthetic division, to avoid cancellation when one
eigenvalue dominates.

Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Spectrum",
    "SymmetricMatrixValue",
    "OperatorJet",
    "sigma",
    "sigma_exact",
    "sigma_matrix",
    "sigma_deleted",
    "sum_hessian",
    "sum_hessian_jet",
    "check_identities",
    "check_identities_exact",
    "elementary_batch",
    "deleted_one_batch",
    "deleted_pair_batch",
    "sum_hessian_value_batch",
    "sum_hessian_gradient_batch",
    "sum_hessian_pair_hessian_batch",
]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    """An ordered eigenvalue vector in R^n, n >= 2."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 1:
            raise ValueError("spectrum must be a 1-D vector")
        if vals.size < 2:
            raise ValueError("spectrum needs at least 2 entries")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    def sorted_desc(self) -> "Spectrum":
        """View with values[0] >= values[1] >= ... >= values[n-1]."""
        return Spectrum(np.sort(self.values, kind="stable")[::-1].copy())

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)


@dataclass(frozen=True)
class SymmetricMatrixValue:
    """Dense n x n real symmetric matrix (symmetrized on construction)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        object.__setattr__(self, "entries", 0.5 * (m + m.T))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> Spectrum:
        """Eigenvalues sorted descending (all formulas assume this order)."""
        lam = np.linalg.eigvalsh(self.entries)
        return Spectrum(lam[::-1].copy())


@dataclass(frozen=True)
class OperatorJet:
    """Value, gradient and eigenvalue-space Hessian of S_k at one spectrum.

    The Hessian is symmetric with identically zero diagonal: the second
    derivative of S_k in a repeated eigenvalue direction vanishes.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    k: int


def _values(lam) -> np.ndarray:
    vals = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    if vals.ndim != 1:
        raise ValueError("expected a 1-D eigenvalue vector")
    return vals


# ---------------------------------------------------------------------------
# batch primitives
# ---------------------------------------------------------------------------


def elementary_batch(lams: np.ndarray, kmax: int) -> np.ndarray:
    """Coefficients e_0..e_kmax of prod(1 + lam_i t) for a batch of spectra.

    `lams` has shape (m, n); the result has shape (m, kmax + 1) with
    column j equal to sigma_j.  Orders beyond n are zero by construction.
    """
    lams = np.asarray(lams, dtype=np.float64)
    m, n = lams.shape
    e = np.zeros((m, kmax + 1), dtype=np.float64)
    e[:, 0] = 1.0
    for i in range(n):
        x = lams[:, i]
        for j in range(min(i + 1, kmax), 0, -1):
            e[:, j] += x * e[:, j - 1]
    return e


def deleted_one_batch(lams: np.ndarray, kmax: int) -> np.ndarray:
    """sigma_{j;p} for every p: shape (m, n, kmax + 1)."""
    lams = np.asarray(lams, dtype=np.float64)
    m, n = lams.shape
    out = np.empty((m, n, kmax + 1), dtype=np.float64)
    cols = np.arange(n)
    for p in range(n):
        out[:, p, :] = elementary_batch(lams[:, cols != p], kmax)
    return out


def deleted_pair_batch(lams: np.ndarray, kmax: int) -> np.ndarray:
    """sigma_{j;pq} for every unordered pair: shape (m, n, n, kmax + 1).

    Diagonal slots (p == q) are left as zeros; only p != q is meaningful.
    """
    lams = np.asarray(lams, dtype=np.float64)
    m, n = lams.shape
    out = np.zeros((m, n, n, kmax + 1), dtype=np.float64)
    cols = np.arange(n)
    for p in range(n):
        for q in range(p + 1, n):
            e = elementary_batch(lams[:, (cols != p) & (cols != q)], kmax)
            out[:, p, q, :] = e
            out[:, q, p, :] = e
    return out


def _order(e: np.ndarray, j: int) -> np.ndarray:
    """Column j of an e-coefficient array, honoring sigma conventions."""
    if j < 0:
        return np.zeros(e.shape[:-1])
    if j >= e.shape[-1]:
        raise IndexError(f"order {j} not computed (kmax={e.shape[-1] - 1})")
    return e[..., j]


def sum_hessian_value_batch(lams: np.ndarray, k: int) -> np.ndarray:
    e = elementary_batch(lams, k)
    return e[:, k] + e[:, k - 1]


def sum_hessian_gradient_batch(lams: np.ndarray, k: int) -> np.ndarray:
    """S_k^{pp} = sigma_{k-1;p} + sigma_{k-2;p}, shape (m, n)."""
    d1 = deleted_one_batch(lams, k - 1)
    return _order(d1, k - 1) + _order(d1, k - 2)


def sum_hessian_pair_hessian_batch(lams: np.ndarray, k: int) -> np.ndarray:
    """S_k^{pp,qq} = sigma_{k-2;pq} + sigma_{k-3;pq} for p != q, 0 on diagonal.

    k = 3 has the closed form sigma_1 - lam_p - lam_q + 1, used as a fast path.
    """
    lams = np.asarray(lams, dtype=np.float64)
    m, n = lams.shape
    if k == 3:
        s1 = lams.sum(axis=1)
        h = (s1 + 1.0)[:, None, None] - lams[:, :, None] - lams[:, None, :]
    elif k == 2:
        h = np.ones((m, n, n))
    elif k == 1:
        h = np.zeros((m, n, n))
    else:
        d2 = deleted_pair_batch(lams, k - 2)
        h = _order(d2, k - 2) + _order(d2, k - 3)
    idx = np.arange(n)
    h[:, idx, idx] = 0.0
    return h


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------


def sigma(k: int, lam) -> float:
    """k-th elementary symmetric function; 1 for k = 0, 0 for k > n."""
    if k < 0:
        raise ValueError(f"order k must be nonnegative, got {k}")
    vals = _values(lam)
    if k == 0:
        return 1.0
    if k > vals.size:
        return 0.0
    return float(elementary_batch(vals[None, :], k)[0, k])


def sigma_exact(k: int, values: Sequence) -> Fraction:
    """Exact-arithmetic sigma_k over integers/rationals (identity certification)."""
    if k < 0:
        raise ValueError(f"order k must be nonnegative, got {k}")
    vals = [Fraction(v) for v in values]
    if k == 0:
        return Fraction(1)
    if k > len(vals):
        return Fraction(0)
    e = [Fraction(0)] * (k + 1)
    e[0] = Fraction(1)
    for i, x in enumerate(vals):
        for j in range(min(i + 1, k), 0, -1):
            e[j] += x * e[j - 1]
    return e[k]


def sigma_matrix(k: int, A) -> float:
    """sigma_k of a symmetric matrix: sigma_k of its spectrum.

    Equals the sum of all k x k principal minors (the enumeration oracle
    checks this equivalence).
    """
    if not isinstance(A, SymmetricMatrixValue):
        A = SymmetricMatrixValue(np.asarray(A))
    if not 1 <= k <= A.n:
        raise ValueError(f"need 1 <= k <= {A.n}, got k={k}")
    return sigma(k, A.eigenvalues().values)


def sigma_deleted(k: int, lam, omit: Iterable[int]) -> float:
    """sigma_k with the entries at `omit` (at most two indices) set aside."""
    vals = _values(lam)
    omit = tuple(omit)
    if len(omit) > 2:
        raise ValueError("at most two indices may be deleted")
    if len(set(omit)) != len(omit):
        raise ValueError(f"duplicate deletion indices {omit}")
    for i in omit:
        if not 0 <= i < vals.size:
            raise ValueError(f"deletion index {i} out of range for n={vals.size}")
    keep = np.delete(vals, omit)
    return sigma(k, keep) if keep.size else (1.0 if k == 0 else 0.0)


def sum_hessian(k: int, lam) -> float:
    """S_k(lam) = sigma_k + sigma_{k-1}."""
    if k < 1:
        raise ValueError(f"sum-Hessian order must be >= 1, got {k}")
    return sigma(k, lam) + sigma(k - 1, lam)


def sum_hessian_jet(k: int, lam) -> OperatorJet:
    """Value, gradient and eigenvalue Hessian of S_k at one spectrum.

    gradient[p] = sigma_{k-1;p} + sigma_{k-2;p} and
    hessian[p,q] = sigma_{k-2;pq} + sigma_{k-3;pq} for p != q.
    """
    vals = _values(lam)
    n = vals.size
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    batch = vals[None, :]
    value = float(sum_hessian_value_batch(batch, k)[0])
    grad = sum_hessian_gradient_batch(batch, k)[0]
    hess = sum_hessian_pair_hessian_batch(batch, k)[0]
    return OperatorJet(value=value, gradient=grad, hessian=hess, k=k)


def check_identities(k: int, lam) -> np.ndarray:
    """Absolute residuals of the three S_k decomposition identities.

    Returns n + 2 residuals:
      [0..n)   S_k = lam_p * S_{k-1;p} + S_{k;p}          (one per index p)
      [n]      sum_p S_{k;p} = (n-k) sigma_k + (n-k+1) sigma_{k-1}
      [n+1]    sum_p lam_p S_{k-1;p} = k sigma_k + (k-1) sigma_{k-1}

    where S_{j;p} = sigma_{j;p} + sigma_{j-1;p}.
    """
    vals = _values(lam)
    n = vals.size
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    batch = vals[None, :]
    e = elementary_batch(batch, k)
    d1 = deleted_one_batch(batch, k)
    sk = e[0, k] + e[0, k - 1]
    s_del_k = _order(d1, k) + _order(d1, k - 1)          # S_{k;p}
    s_del_km1 = _order(d1, k - 1) + _order(d1, k - 2)    # S_{k-1;p}
    res_p = np.abs(vals * s_del_km1[0] + s_del_k[0] - sk)
    rhs7 = (n - k) * e[0, k] + (n - k + 1) * e[0, k - 1]
    res7 = abs(float(s_del_k[0].sum()) - rhs7)
    rhs8 = k * e[0, k] + (k - 1) * e[0, k - 1]
    res8 = abs(float((vals * s_del_km1[0]).sum()) - rhs8)
    return np.concatenate([res_p, [res7, res8]])


def check_identities_exact(k: int, values: Sequence) -> list:
    """Exact-arithmetic version of `check_identities` (zero means certified)."""
    vals = [Fraction(v) for v in values]
    n = len(vals)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")

    def s_del(j: int, p: int) -> Fraction:
        rest = vals[:p] + vals[p + 1:]
        a = sigma_exact(j, rest) if j >= 0 else Fraction(0)
        b = sigma_exact(j - 1, rest) if j - 1 >= 0 else Fraction(0)
        return a + b

    sk = sigma_exact(k, vals) + sigma_exact(k - 1, vals)
    residuals = [abs(vals[p] * s_del(k - 1, p) + s_del(k, p) - sk) for p in range(n)]
    res7 = abs(
        sum(s_del(k, p) for p in range(n))
        - ((n - k) * sigma_exact(k, vals) + (n - k + 1) * sigma_exact(k - 1, vals))
    )
    res8 = abs(
        sum(vals[p] * s_del(k - 1, p) for p in range(n))
        - (k * sigma_exact(k, vals) + (k - 1) * sigma_exact(k - 1, vals))
    )
    return residuals + [res7, res8]
