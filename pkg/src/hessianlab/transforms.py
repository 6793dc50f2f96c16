"""Change of variables between quotient and sum equations, and grid transforms.

The quadratic shift v = u - (a/2)|x|^2 turns the normalized cubic quotient
equation sigma_3/sigma_l = C0 (l = 1, 2) into sigma_3 + c_l a sigma_2 = 1
with closed-form constants:

    l = 1:  a^3 = 3  / (n(n-1)(n-2)),  C0 = (n-1)(n-2) a^2 / 2,  c_1 = n-2
    l = 2:  a^3 = 12 / (n(n-1)(n-2)),  C0 = (n-2) a / 2,         c_2 = (n-2)/2

both satisfying n(n-1)(n-2) a^3/6 - C0 * sigma_{l}(a * ones)|_{const-term} = -1.
The shift identity is polynomial in the matrix, so its residual is a pure
float-arithmetic check: any violation is a bug.

Also here: the cubic -n(n-1)(n-2)K^3/6 + n(n-1)K^2/2 = c0 whose unique root
in (0, 2/(n-2)] feeds the semi-convexity rigidity condition, a brute-force
discrete Legendre transform of the semi-convexity shift u + (K1/2)|x|^2,
and the per-node uniform-ellipticity ratio field of the conjugated operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sampling
from .grid import GridFunction, gradient_interior, hessian_interior
from .reports import VerificationReport
from .symfun import (
    SymmetricMatrixValue,
    elementary_batch,
    sum_hessian_gradient_batch,
    _values,
)

__all__ = [
    "TransformConstants",
    "quotient_constants",
    "constant_term_residual",
    "shift_identity_residual",
    "admissibility_after_shift",
    "sample_quotient_level_set",
    "shift_admissibility_campaign",
    "RigidityData",
    "rigidity_threshold",
    "rigidity_root",
    "conjugate_grid",
    "legendre_lewy",
    "RatioField",
    "ellipticity_ratio_field",
]


# ---------------------------------------------------------------------------
# quotient -> sum constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformConstants:
    """Shift coefficient a and normalized quotient level C0 for l in {1, 2}."""

    n: int
    l: int
    a: float
    c0: float

    @property
    def sigma2_coefficient(self) -> float:
        """Coefficient c_l of a*sigma_2 in the shifted equation."""
        return float(self.n - 2) if self.l == 1 else (self.n - 2) / 2.0


def quotient_constants(n: int, l: int) -> TransformConstants:
    """Closed-form (a, C0) for the quotient level sigma_3/sigma_l = C0."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if l not in (1, 2):
        raise ValueError(f"l must be 1 or 2, got {l}")
    if l == 1:
        a = (3.0 / (n * (n - 1) * (n - 2))) ** (1.0 / 3.0)
        c0 = (9.0 * (n - 1) * (n - 2) / (8.0 * n**2)) ** (1.0 / 3.0)
    else:
        a = (12.0 / (n * (n - 1) * (n - 2))) ** (1.0 / 3.0)
        c0 = (3.0 * (n - 2) ** 2 / (2.0 * n * (n - 1))) ** (1.0 / 3.0)
    return TransformConstants(n=n, l=l, a=a, c0=c0)


def constant_term_residual(tc: TransformConstants) -> float:
    """Residual of the constant-term identity tying a and C0 to the level -1.

    l = 1: n(n-1)(n-2) a^3/6 - C0 n a = -1
    l = 2: n(n-1)(n-2) a^3/6 - C0 n(n-1) a^2/2 = -1
    """
    n, a, c0 = tc.n, tc.a, tc.c0
    cubic = n * (n - 1) * (n - 2) * a**3 / 6.0
    if tc.l == 1:
        return abs(cubic - c0 * n * a + 1.0)
    return abs(cubic - c0 * n * (n - 1) * a**2 / 2.0 + 1.0)


def shift_identity_residual(A, tc: TransformConstants) -> float:
    """|[sigma_3(A+aI) - C0 sigma_l(A+aI)] - [sigma_3(A) + c_l a sigma_2(A) - 1]|.

    A polynomial identity valid for every symmetric A; the residual is pure
    floating-point error and must stay below 1e-9 relative.
    """
    if not isinstance(A, SymmetricMatrixValue):
        A = SymmetricMatrixValue(np.asarray(A))
    if A.n != tc.n:
        raise ValueError(f"matrix is {A.n}x{A.n} but constants are for n={tc.n}")
    lam = A.eigenvalues().values
    e = elementary_batch(lam[None, :], 3)[0]
    e_shift = elementary_batch((lam + tc.a)[None, :], 3)[0]
    lhs = e_shift[3] - tc.c0 * e_shift[tc.l]
    rhs = e[3] + tc.sigma2_coefficient * tc.a * e[2] - 1.0
    return abs(float(lhs - rhs))


def admissibility_after_shift(lam_u, tc: TransformConstants, level_tol: float = 1e-8):
    """Admissibility margins of the shifted spectrum lam_u - a.

    Requires lam_u in Gamma_3 on the quotient level set sigma_3/sigma_l = C0
    (up to level_tol relative).  Returns (sigma_1 margin, mixed margin)

        m1 = sigma_1(lam - a)
        m2 = sigma_2(lam - a) + c_l * a * sigma_1(lam - a)

    whose joint positivity puts the shifted spectrum in the admissibility
    cone of the shifted equation.
    """
    vals = _values(lam_u)
    if vals.size != tc.n:
        raise ValueError(f"spectrum has n={vals.size}, constants need n={tc.n}")
    e = elementary_batch(vals[None, :], 3)[0]
    if not (e[1] > 0 and e[2] > 0 and e[3] > 0):
        raise ValueError(f"spectrum {vals.tolist()} is not in Gamma_3")
    ratio = e[3] / e[tc.l]
    if abs(ratio - tc.c0) > level_tol * tc.c0:
        raise ValueError(
            f"spectrum is off the quotient level set: sigma_3/sigma_{tc.l} = "
            f"{ratio:.6g}, expected {tc.c0:.6g}"
        )
    shifted = vals - tc.a
    es = elementary_batch(shifted[None, :], 2)[0]
    m1 = float(es[1])
    m2 = float(es[2] + tc.sigma2_coefficient * tc.a * es[1])
    return m1, m2


def sample_quotient_level_set(
    n: int, l: int, count: int, seed: int = 0, max_rounds: int = 200
) -> np.ndarray:
    """Spectra in Gamma_3 with sigma_3/sigma_l exactly on the C0 level.

    Directions are drawn in Gamma_3 (half from the positive orthant, half
    Gaussian with rejection) and scaled radially: the quotient is homogeneous
    of degree 3 - l > 0 along rays, so each direction meets the level set at
    the unique scale t = (C0 / ratio)^{1/(3-l)}.
    """
    tc = quotient_constants(n, l)
    rng = sampling.chunk_rng(seed)
    out = np.empty((count, n))
    got = 0
    for _ in range(max_rounds):
        if got >= count:
            break
        m = max(4 * (count - got), 512)
        half = m // 2
        cand = np.concatenate(
            [np.abs(rng.standard_normal((half, n))) + 1e-3,
             rng.standard_normal((m - half, n))]
        )
        e = elementary_batch(cand, 3)
        ok = (e[:, 1] > 0) & (e[:, 2] > 0) & (e[:, 3] > 0)
        cand, e = cand[ok], e[ok]
        ratio = e[:, 3] / e[:, l]
        t = (tc.c0 / ratio) ** (1.0 / (3 - l))
        cand = cand * t[:, None]
        take = min(cand.shape[0], count - got)
        out[got : got + take] = -np.sort(-cand[:take], axis=1)
        got += take
    if got < count:
        raise sampling.SamplingError(f"level-set sampler got {got}/{count} spectra")
    return out


def shift_admissibility_campaign(
    n: int, l: int, count: int = 10_000, seed: int = 0
) -> VerificationReport:
    """Batch admissibility margins over the quotient level set.

    Margin of a sample is min(m1, m2); the campaign asserts both stay
    strictly positive, i.e. the quadratic shift always lands in the
    admissibility cone of the shifted equation.
    """
    tc = quotient_constants(n, l)
    lams = sample_quotient_level_set(n, l, count, seed)
    shifted = lams - tc.a
    es = elementary_batch(shifted, 2)
    m1 = es[:, 1]
    m2 = es[:, 2] + tc.sigma2_coefficient * tc.a * es[:, 1]
    margins = np.minimum(m1, m2)
    i = int(np.argmin(margins))
    return VerificationReport(
        inequality_id="shift-admissibility",
        samples=count,
        violations=int((margins < 0.0).sum()),
        worst_margin=float(margins[i]),
        estimated_constant=float(margins[i]),
        witness={"spectrum": lams[i].tolist(), "m1": float(m1[i]), "m2": float(m2[i])},
        config={"n": n, "l": l, "count": count, "seed": seed,
                "a": tc.a, "C0": tc.c0},
    )


# ---------------------------------------------------------------------------
# rigidity cubic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityData:
    """Root data of -n(n-1)(n-2)K^3/6 + n(n-1)K^2/2 = c0 on (0, 2/(n-2)]."""

    n: int
    c0: float
    K0: float | None
    threshold: float


def rigidity_threshold(n: int) -> float:
    """Largest c0 for which the cubic has a root in (0, 2/(n-2)]."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return 2.0 * n * (n - 1) / (3.0 * (n - 2) ** 2)


def rigidity_root(n: int, c0: float) -> RigidityData:
    """Unique root K0 of the semi-convexity cubic, bisected to ~1e-14.

    The cubic is strictly increasing on [0, 2/(n-2)] (its derivative is
    n(n-1)K(2-(n-2)K)/2), so bisection on [1e-12, 2/(n-2)] is exact;
    above the threshold no root exists and K0 is absent.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if c0 <= 0:
        raise ValueError(f"c0 must be positive, got {c0}")
    threshold = rigidity_threshold(n)
    if c0 > threshold:
        return RigidityData(n=n, c0=c0, K0=None, threshold=threshold)

    def cubic(k: float) -> float:
        return -n * (n - 1) * (n - 2) * k**3 / 6.0 + n * (n - 1) * k**2 / 2.0 - c0

    lo, hi = 1e-12, 2.0 / (n - 2)
    if cubic(lo) >= 0.0:
        # c0 below the cubic's value at the bracket floor: root is at ~0
        return RigidityData(n=n, c0=c0, K0=lo, threshold=threshold)
    if cubic(hi) <= 0.0:
        # root sits at the endpoint (c0 at the threshold, a double root
        # bisection cannot pin against rounding noise)
        return RigidityData(n=n, c0=c0, K0=hi, threshold=threshold)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cubic(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    k0 = hi
    residual = abs(cubic(k0))
    if residual > 1e-12 * max(1.0, abs(c0)):
        raise ArithmeticError(
            f"rigidity root failed to certify: residual {residual:.3e} at K0={k0!r}"
        )
    return RigidityData(n=n, c0=c0, K0=k0, threshold=threshold)


# ---------------------------------------------------------------------------
# discrete Legendre transform
# ---------------------------------------------------------------------------

_CONJ_CHUNK = 2048


def conjugate_grid(g: GridFunction, out_box, out_resolution) -> GridFunction:
    """Convex conjugate sup_x (<x, y> - g(x)) over all grid nodes of g.

    Brute force O(N_x * N_y): correctness over speed at desk scale.  The
    output is the conjugate sampled on a fresh uniform grid.
    """
    pts = g.points()
    vals = g.values.ravel()
    out = GridFunction(box=tuple(out_box), values=np.zeros(tuple(out_resolution)))
    targets = out.points()
    w = np.empty(targets.shape[0])
    for start in range(0, targets.shape[0], _CONJ_CHUNK):
        block = targets[start : start + _CONJ_CHUNK]
        scores = pts @ block.T - vals[:, None]
        w[start : start + block.shape[0]] = scores.max(axis=0)
    return out.with_values(w)


def legendre_lewy(u: GridFunction, K1: float) -> GridFunction:
    """Convex conjugate of u + (K1/2)|x|^2 on the image grid of Du + K1 x.

    Requires the discrete Hessian of u to stay above -K1 at every interior
    node (so the shifted function is strictly convex); fails loudly with the
    worst node otherwise.  The output grid is the uniform box bounding the
    image points y(x) = Du(x) + K1 x of the interior, at the input
    resolution.
    """
    H = hessian_interior(u)
    eigs = np.linalg.eigvalsh(H.reshape(-1, u.n_dims, u.n_dims))
    worst = int(np.argmin(eigs[:, 0]))
    if eigs[worst, 0] + K1 <= 0.0:
        core_shape = tuple(r - 2 for r in u.resolution)
        node = np.unravel_index(worst, core_shape)
        node = tuple(int(i) + 1 for i in node)
        raise ValueError(
            f"shifted field is not convex: eigenvalue {eigs[worst, 0]:.6g} "
            f"at node {node} needs K1 > {-eigs[worst, 0]:.6g} (got {K1})"
        )
    mesh = u.mesh()
    shifted = u.values + 0.5 * K1 * (mesh**2).sum(axis=-1)
    y = gradient_interior(u) + K1 * u.interior_mesh()
    y_flat = y.reshape(-1, u.n_dims)
    y_box = tuple(
        (float(y_flat[:, a].min()), float(y_flat[:, a].max()))
        for a in range(u.n_dims)
    )
    shifted_grid = GridFunction(box=u.box, values=shifted)
    return conjugate_grid(shifted_grid, y_box, u.resolution)


# ---------------------------------------------------------------------------
# ellipticity ratio field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioField:
    """Per-node extremes of F^{ii}(K1 + lambda_i)^2 / (sigma_2 + sigma_1).

    Nodes whose Hessian spectrum leaves Gamma~_3 are excluded (NaN in the
    per-node grids) and counted.
    """

    node_min: np.ndarray
    node_max: np.ndarray
    admissible: np.ndarray
    global_min: float
    global_max: float
    excluded: int


def ellipticity_ratio_field(u: GridFunction, K1: float) -> RatioField:
    """Uniform-ellipticity ratio of the conjugated operator, node by node."""
    d = u.n_dims
    H = hessian_interior(u)
    core_shape = H.shape[:-2]
    lam = np.linalg.eigvalsh(H.reshape(-1, d, d))[:, ::-1]
    if lam[:, -1].min() + K1 <= 0.0:
        raise ValueError(
            f"need K1 > {-lam[:, -1].min():.6g} to keep K1 + lambda_i positive"
        )
    ok = sampling.gamma_tilde_mask(lam, 3)
    e = elementary_batch(lam, 2)
    s_prime = e[:, 2] + e[:, 1]
    node_min = np.full(lam.shape[0], np.nan)
    node_max = np.full(lam.shape[0], np.nan)
    if np.any(ok):
        G = sum_hessian_gradient_batch(lam[ok], 3)
        ratios = G * (K1 + lam[ok]) ** 2 / s_prime[ok, None]
        node_min[ok] = ratios.min(axis=1)
        node_max[ok] = ratios.max(axis=1)
    else:
        raise ValueError("no interior node is admissible; ratio field undefined")
    return RatioField(
        node_min=node_min.reshape(core_shape),
        node_max=node_max.reshape(core_shape),
        admissible=ok.reshape(core_shape),
        global_min=float(np.nanmin(node_min)),
        global_max=float(np.nanmax(node_max)),
        excluded=int((~ok).sum()),
    )
