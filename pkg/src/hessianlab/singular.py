"""An explicit Lipschitz-but-not-C^{1,beta} solution family for k >= 4.

The family is

    u_sigma(x) = (1 + x_0^2) (sigma + x_1^2 + ... + x_{k-2}^2)^{alpha/2},
    alpha = 2 - 2/(k-1),

using 0-based coordinates (the distinguished axis is x_0; the singular
block is x_1..x_{k-2}; coordinates k-1..n-1 are inert).  Its Hessian rows
and columns beyond index k-2 vanish identically, so the rank never exceeds
k-1 and sigma_k of the Hessian is exactly zero, while sigma_{k-1} is a
positive smooth function on a small ball whose sigma-dependence cancels:
the prefactor exponent (k-1) alpha/2 - (k-2) is zero as a rational number.

The derivatives below come from differentiating the definition directly and
are audited against finite differences in the test suite rather than taken
from anywhere on trust.

As sigma -> 0 the family converges locally uniformly to a convex function
that is Lipschitz but fails C^{1,beta}: along singular-block directions the
Hessian norm scales like t^{alpha-2} = t^{-2/(k-1)}, which the Holder probe
measures as a log-log slope.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symfun import elementary_batch

__all__ = [
    "SingularFamilyParams",
    "eval_jet",
    "residual",
    "prefactor_exponent",
    "HolderProbe",
    "holder_probe",
    "probe_csv",
    "ConvergenceResult",
    "convergence_check",
    "draw_safe_points",
    "positivity_margin",
]


@dataclass(frozen=True)
class SingularFamilyParams:
    """Family parameters: dimension n >= 4, order 4 <= k <= n, sigma >= 0."""

    n: int
    k: int
    sigma: float = 0.0
    r: float = 0.5

    def __post_init__(self) -> None:
        if self.n < 4:
            raise ValueError(f"need n >= 4, got {self.n}")
        if not 4 <= self.k <= self.n:
            raise ValueError(f"need 4 <= k <= n, got k={self.k}, n={self.n}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.r <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def alpha(self) -> float:
        # strictly between 1 and 2 for every k >= 4
        return 2.0 - 2.0 / (self.k - 1)

    def block_radius_sq(self, x: np.ndarray) -> float:
        return float((x[1 : self.k - 1] ** 2).sum())


def prefactor_exponent(k: int) -> Fraction:
    """(k-1) alpha/2 - (k-2) in exact rational arithmetic (identically zero)."""
    if k < 4:
        raise ValueError(f"need k >= 4, got {k}")
    alpha = Fraction(2) - Fraction(2, k - 1)
    return (k - 1) * alpha / 2 - (k - 2)


def eval_jet(p: SingularFamilyParams, x):
    """(value, gradient, hessian) of u_sigma at a point.

    At sigma = 0 the point must stay off the singular set
    {x_1 = ... = x_{k-2} = 0}, where the jet does not exist.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.n,):
        raise ValueError(f"point must have shape ({p.n},), got {x.shape}")
    s = p.sigma + p.block_radius_sq(x)
    if s <= 0.0:
        raise ValueError(
            "jet undefined on the singular set (sigma = 0 and block coordinates 0)"
        )
    a = p.alpha
    w = 1.0 + x[0] ** 2
    s_a2 = s ** (a / 2.0)
    s_a2m1 = s ** (a / 2.0 - 1.0)
    s_a2m2 = s ** (a / 2.0 - 2.0)
    blk = slice(1, p.k - 1)

    value = w * s_a2
    grad = np.zeros(p.n)
    grad[0] = 2.0 * x[0] * s_a2
    grad[blk] = w * a * x[blk] * s_a2m1

    hess = np.zeros((p.n, p.n))
    hess[0, 0] = 2.0 * s_a2
    hess[0, blk] = 2.0 * a * x[0] * x[blk] * s_a2m1
    hess[blk, 0] = hess[0, blk]
    xb = x[blk]
    hess[blk, blk] = w * s_a2m2 * (
        a * (a - 2.0) * np.outer(xb, xb) + a * s * np.eye(xb.size)
    )
    return float(value), grad, hess


def residual(p: SingularFamilyParams, x):
    """(sigma_k, sigma_{k-1}) of the Hessian at a point of the ball B_r.

    sigma_k vanishes identically (the Hessian has rank <= k-1); sigma_{k-1}
    is the induced right-hand side, positive on a small enough ball.
    """
    x = np.asarray(x, dtype=np.float64)
    if float(x @ x) > p.r**2 * (1.0 + 1e-12):
        raise ValueError(f"point lies outside the ball of radius {p.r}")
    _, _, hess = eval_jet(p, x)
    lam = np.linalg.eigvalsh(hess)[::-1]
    e = elementary_batch(lam[None, :], p.k)[0]
    return float(e[p.k]), float(e[p.k - 1])


@dataclass(frozen=True)
class HolderProbe:
    """Scaling probe along a singular-block direction at sigma = 0.

    `slope` is the least-squares log-log slope of the Hessian norm against
    the distance t (expected -2/(k-1)); `max_gradient` witnesses the
    Lipschitz bound.  `rows` holds (t, |Du|, |D2u|_2) per probe point.
    """

    slope: float
    max_gradient: float
    rows: np.ndarray


def holder_probe(p: SingularFamilyParams, direction, t_grid) -> HolderProbe:
    """Fit the Hessian blow-up rate along a direction in the singular block."""
    if p.sigma != 0.0:
        raise ValueError("the Holder probe measures the sigma = 0 limit")
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise ValueError("t_grid must be strictly decreasing and positive")
    d_in = np.asarray(direction, dtype=np.float64)
    if d_in.shape != (p.n,):
        raise ValueError(f"direction must have shape ({p.n},)")
    if np.any(d_in[0:1] != 0.0) or np.any(d_in[p.k - 1 :] != 0.0):
        raise ValueError("direction must lie in the singular block span(e_1..e_{k-2})")
    norm = np.linalg.norm(d_in)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    d = d_in / norm
    rows = np.empty((t.size, 3))
    for i, ti in enumerate(t):
        _, grad, hess = eval_jet(p, ti * d)
        rows[i] = (ti, np.linalg.norm(grad), np.abs(np.linalg.eigvalsh(hess)).max())
    slope = float(np.polyfit(np.log(rows[:, 0]), np.log(rows[:, 2]), 1)[0])
    return HolderProbe(slope=slope, max_gradient=float(rows[:, 1].max()), rows=rows)


def probe_csv(probe: HolderProbe) -> str:
    """CSV rows (t, |Du|, |D2u|) for external plotting."""
    buf = io.StringIO()
    buf.write("t,grad_norm,hess_norm\n")
    for t, gn, hn in probe.rows:
        buf.write(f"{float(t)!r},{float(gn)!r},{float(hn)!r}\n")
    return buf.getvalue()


@dataclass(frozen=True)
class ConvergenceResult:
    """Locally uniform convergence of u_sigma to the singular limit.

    `deviations[i]` is max |u_sigma_i - u_0| over the sample points;
    `rate` is the measured log-log slope of deviation against sigma.
    """

    sigmas: np.ndarray
    deviations: np.ndarray
    rate: float


def _values_at(p: SingularFamilyParams, sigma: float, pts: np.ndarray) -> np.ndarray:
    s = sigma + (pts[:, 1 : p.k - 1] ** 2).sum(axis=1)
    return (1.0 + pts[:, 0] ** 2) * s ** (p.alpha / 2.0)


def convergence_check(
    p: SingularFamilyParams, sigma_sequence, sample_points
) -> ConvergenceResult:
    """Max deviation from the sigma = 0 limit, per sigma in the sequence."""
    sigmas = np.asarray(sigma_sequence, dtype=np.float64)
    if np.any(sigmas < 0):
        raise ValueError("sigma values must be >= 0")
    pts = np.atleast_2d(np.asarray(sample_points, dtype=np.float64))
    block = (pts[:, 1 : p.k - 1] ** 2).sum(axis=1)
    if np.any(block <= 0.0):
        raise ValueError("sample points must avoid the singular set")
    limit = _values_at(p, 0.0, pts)
    devs = np.array(
        [np.abs(_values_at(p, s, pts) - limit).max() for s in sigmas]
    )
    positive = (sigmas > 0) & (devs > 0)
    rate = (
        float(np.polyfit(np.log(sigmas[positive]), np.log(devs[positive]), 1)[0])
        if positive.sum() >= 2
        else 0.0
    )
    return ConvergenceResult(sigmas=sigmas, deviations=devs, rate=rate)


def draw_safe_points(
    p: SingularFamilyParams,
    count: int,
    seed: int = 0,
    radius: float | None = None,
    margin: float | None = None,
) -> np.ndarray:
    """Uniform points in the ball, at least `margin` from the singular set.

    The default margin 1e-6 * r only guards exponent evaluation; pass a
    larger one when the statistics should stay away from the blow-up region.
    """
    from . import sampling as _sampling

    r = p.r if radius is None else radius
    delta = 1e-6 * p.r if margin is None else margin
    rng = _sampling.chunk_rng(seed)
    out = np.empty((count, p.n))
    got = 0
    while got < count:
        m = max(4 * (count - got), 256)
        cand = rng.uniform(-r, r, size=(m, p.n))
        inside = (cand**2).sum(axis=1) <= r**2
        off_singular = (cand[:, 1 : p.k - 1] ** 2).sum(axis=1) > delta**2
        cand = cand[inside & off_singular]
        take = min(cand.shape[0], count - got)
        out[got : got + take] = cand[:take]
        got += take
    return out


def positivity_margin(
    p: SingularFamilyParams, count: int = 1000, seed: int = 0, max_shrink: int = 8
):
    """Smallest sigma_{k-1}(D^2 u) over the ball, shrinking r until positive.

    Returns (radius, margin): the first radius (halving from p.r) at which
    the sampled minimum of sigma_{k-1} is strictly positive, with that
    minimum as the margin.
    """
    r = p.r
    for _ in range(max_shrink):
        q = SingularFamilyParams(n=p.n, k=p.k, sigma=p.sigma, r=r)
        pts = draw_safe_points(q, count, seed=seed, radius=r)
        worst = np.inf
        for x in pts:
            _, low = residual(q, x)
            worst = min(worst, low)
        if worst > 0.0:
            return r, float(worst)
        r *= 0.5
    raise RuntimeError(
        f"sigma_(k-1) not positive down to radius {r} (k={p.k}, n={p.n}, sigma={p.sigma})"
    )
