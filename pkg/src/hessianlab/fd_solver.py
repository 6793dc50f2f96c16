"""Damped-Newton Dirichlet solver for sigma_3(D^2 u) + alpha sigma_2(D^2 u) = f.

The unknown is the full node vector on a uniform box grid: interior rows
carry the discretized operator residual (central second differences,
sigma_2/sigma_3 by principal minors in a fixed canonical order), boundary
rows carry the Dirichlet mismatch u - g.  Newton linearizes the operator
through the spectral decomposition of each node Hessian,

    dF = sum_ij F^{ij} d(D^2 u)_ij,   F^{ij} = sum_p T'_p q_p^i q_p^j,

with T'_p = sigma_{2;p} + alpha sigma_{1;p} evaluated at the node spectrum;
a step is accepted only if the residual max-norm strictly decreases and
every interior node stays strictly inside the admissibility cone
Gamma_2 & {sigma_3 + alpha sigma_2 > 0} (the ellipticity domain of the
operator — equal to Gamma~_3 when alpha = 1).  Backtracking halves the step
down to 2^-20; exhausting it ends the solve with an explicit
non-convergence status, never a silent partial answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import GridFunction, gradient_interior, hessian_interior
from .symfun import SymmetricMatrixValue

__all__ = [
    "SolveConfig",
    "SolveResult",
    "ProbeRow",
    "discrete_hessian",
    "hessian_sigmas",
    "residual_field",
    "admissible_interior_mask",
    "assemble_jacobian",
    "default_initial_guess",
    "solve",
    "interior_bound_probe",
    "pogorelov_profile",
]


@dataclass(frozen=True)
class SolveConfig:
    """Grid, operator, data, and damping parameters of one Dirichlet solve.

    `rhs` and `boundary` may be callables of the node coordinates (shape
    (..., d) -> values), GridFunctions on the same grid, or constants.
    """

    box: tuple
    resolution: tuple
    rhs: object
    boundary: object
    alpha: float = 1.0
    initial_step: float = 1.0
    backtrack: float = 0.5
    min_step: float = 2.0**-20
    max_iterations: int = 30
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        res = tuple(int(r) for r in self.resolution)
        if len(box) != len(res):
            raise ValueError("box and resolution dimensionality differ")
        if len(box) < 3:
            raise ValueError("the cubic operator needs n_dims >= 3")
        if any(r < 5 for r in res):
            raise ValueError(f"resolution must be >= 5 per axis, got {res}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtracking factor must be in (0, 1)")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "resolution", res)

    @property
    def n_dims(self) -> int:
        return len(self.box)

    def empty_grid(self) -> GridFunction:
        return GridFunction(box=self.box, values=np.zeros(self.resolution))

    @classmethod
    def from_file(cls, path) -> "SolveConfig":
        """Plain key = value config (format documented in docs/formats.md).

        Recognized keys: n_dims, box (lo:hi[,lo:hi...] or a single lo:hi for
        all axes), resolution (int or comma list), alpha, tolerance,
        max_iterations, rhs (constant), boundary (constant, `quadratic:c`
        for c|x|^2/2, or `pogorelov:K`).
        """
        raw: dict[str, str] = {}
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            raw[key.strip()] = val.strip()
        try:
            d = int(raw.get("n_dims", "3"))
            res_raw = raw.get("resolution", "17")
            res = [int(v) for v in res_raw.split(",")]
            if len(res) == 1:
                res = res * d
            box_raw = raw.get("box", "-1:1")
            pairs = [p for p in box_raw.split(",")]
            if len(pairs) == 1:
                pairs = pairs * d
            box = []
            for p in pairs:
                lo, hi = p.split(":")
                box.append((float(lo), float(hi)))
            rhs = float(raw.get("rhs", "4.0"))
            boundary = _parse_boundary(raw.get("boundary", "quadratic:1.0"))
            return cls(
                box=tuple(box),
                resolution=tuple(res),
                rhs=rhs,
                boundary=boundary,
                alpha=float(raw.get("alpha", "1.0")),
                tolerance=float(raw.get("tolerance", "1e-9")),
                max_iterations=int(raw.get("max_iterations", "30")),
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad solver config {path}: {exc}") from exc


def _parse_boundary(spec: str):
    if ":" in spec:
        kind, arg = spec.split(":", 1)
        if kind == "quadratic":
            c = float(arg)
            return lambda X: 0.5 * c * (X**2).sum(axis=-1)
        if kind == "pogorelov":
            return pogorelov_profile(float(arg))
        raise ValueError(f"unknown boundary family {kind!r}")
    return float(spec)


@dataclass
class SolveResult:
    """Solver outcome with full diagnostics.

    On success `converged` is True, `residual_inf <= tolerance`, and
    `admissible_fraction == 1.0`.  `max_lambda1` / `min_semiconvex_margin`
    are the extreme interior Hessian eigenvalues of the final iterate
    (log max_lambda1 is the quantity interior-bound probes track).
    """

    u: GridFunction
    residual_inf: float
    iterations: int
    converged: bool
    status: str
    admissible_fraction: float
    min_semiconvex_margin: float
    max_lambda1: float
    residual_history: list = field(default_factory=list)
    admissible_history: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# stencils and minors
# ---------------------------------------------------------------------------


def discrete_hessian(u: GridFunction, node) -> SymmetricMatrixValue:
    """Second-difference Hessian at one strictly interior node.

    Diagonal entries (u_+ - 2u_0 + u_-)/h^2; off-diagonal entries the
    four-point cross stencil / (4 h_a h_b).  Exact on quadratics.
    """
    node = tuple(int(i) for i in node)
    d = u.n_dims
    if len(node) != d:
        raise ValueError(f"node must have {d} indices")
    for a, (i, r) in enumerate(zip(node, u.resolution)):
        if not 1 <= i <= r - 2:
            raise ValueError(f"node {node} is not interior on axis {a}")
    h = u.spacing
    vals = u.values
    out = np.empty((d, d))

    def at(offset):
        idx = tuple(i + o for i, o in zip(node, offset))
        return vals[idx]

    zero = [0] * d
    for a in range(d):
        plus, minus = zero.copy(), zero.copy()
        plus[a], minus[a] = 1, -1
        out[a, a] = (at(plus) - 2.0 * at(zero) + at(minus)) / h[a] ** 2
    for a, b in combinations(range(d), 2):
        pp, pm, mp, mm = (zero.copy() for _ in range(4))
        pp[a], pp[b] = 1, 1
        pm[a], pm[b] = 1, -1
        mp[a], mp[b] = -1, 1
        mm[a], mm[b] = -1, -1
        out[a, b] = out[b, a] = (at(pp) - at(pm) - at(mp) + at(mm)) / (
            4.0 * h[a] * h[b]
        )
    return SymmetricMatrixValue(out)


def hessian_sigmas(H: np.ndarray):
    """(sigma_1, sigma_2, sigma_3) of symmetric matrices, shape (..., d, d).

    Principal minors accumulated in lexicographic index order with plain
    elementwise arithmetic; the evaluation order is part of the contract
    (the per-node recomputation oracle reproduces it bit for bit).
    """
    d = H.shape[-1]
    s1 = H[..., 0, 0].copy()
    for a in range(1, d):
        s1 = s1 + H[..., a, a]
    s2 = None
    for a, b in combinations(range(d), 2):
        term = H[..., a, a] * H[..., b, b] - H[..., a, b] * H[..., a, b]
        s2 = term if s2 is None else s2 + term
    s3 = None
    for a, b, c in combinations(range(d), 3):
        det3 = (
            H[..., a, a] * (H[..., b, b] * H[..., c, c] - H[..., b, c] * H[..., b, c])
            - H[..., a, b] * (H[..., a, b] * H[..., c, c] - H[..., b, c] * H[..., a, c])
            + H[..., a, c] * (H[..., a, b] * H[..., b, c] - H[..., b, b] * H[..., a, c])
        )
        s3 = det3 if s3 is None else s3 + det3
    return s1, s2, s3


def _field_values(spec_obj, g: GridFunction) -> np.ndarray:
    if isinstance(spec_obj, GridFunction):
        if spec_obj.resolution != g.resolution or spec_obj.box != g.box:
            raise ValueError("data grid does not match the solve grid")
        return spec_obj.values
    if callable(spec_obj):
        vals = np.asarray(spec_obj(g.mesh()), dtype=np.float64)
        if vals.shape != g.resolution:
            raise ValueError(
                f"data callable returned {vals.shape}, expected {g.resolution}"
            )
        return vals
    return np.full(g.resolution, float(spec_obj))


def _core(values: np.ndarray) -> np.ndarray:
    return values[tuple(slice(1, -1) for _ in range(values.ndim))]


def residual_field(u: GridFunction, cfg: SolveConfig) -> GridFunction:
    """Residual grid: operator - f at interior nodes, u - g on the boundary."""
    if u.resolution != cfg.resolution or u.box != cfg.box:
        raise ValueError("field does not live on the configured grid")
    f = _field_values(cfg.rhs, u)
    gb = _field_values(cfg.boundary, u)
    out = u.values - gb
    H = hessian_interior(u)
    _, s2, s3 = hessian_sigmas(H)
    core = tuple(slice(1, -1) for _ in range(u.n_dims))
    out[core] = s3 + cfg.alpha * s2 - _core(f)
    return GridFunction(box=u.box, values=out)


def admissible_interior_mask(u: GridFunction, alpha: float = 1.0) -> np.ndarray:
    """Strict admissibility of every interior node Hessian.

    The cone is Gamma_2 & {sigma_3 + alpha sigma_2 > 0}: under the scaling
    u -> u/alpha this is exactly Gamma~_3 membership, and it is where the
    linearized operator is positive definite.
    """
    H = hessian_interior(u)
    s1, s2, s3 = hessian_sigmas(H)
    return (s1 > 0.0) & (s2 > 0.0) & (s3 + alpha * s2 > 0.0)


# ---------------------------------------------------------------------------
# Newton linearization
# ---------------------------------------------------------------------------


def _interior_flat_indices(resolution) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(1, r - 1) for r in resolution], indexing="ij")
    multi = np.stack([g.ravel() for g in grids])
    return np.ravel_multi_index(multi, resolution)


def _gradient_coefficients(H: np.ndarray, alpha: float) -> np.ndarray:
    """F^{ij} = dF/dH_ij for F = sigma_3 + alpha sigma_2, batch (..., d, d).

    Spectral form: eigendecompose H = Q diag(lam) Q^T and push
    T'_p = sigma_{2;p}(lam) + alpha sigma_{1;p}(lam) back through Q.  The
    result is continuous across eigenvalue coalescence (equal eigenvalues
    share equal T'_p), so no pairwise divided differences are needed for
    this first-order linearization.
    """
    lam, Q = np.linalg.eigh(H)
    s1 = lam.sum(axis=-1, keepdims=True)
    s2 = np.zeros(lam.shape[:-1])
    d = lam.shape[-1]
    for a, b in combinations(range(d), 2):
        s2 = s2 + lam[..., a] * lam[..., b]
    # deleted functions: sigma_{1;p} = s1 - lam_p, sigma_{2;p} = s2 - lam_p*(s1 - lam_p)
    sig1_del = s1 - lam
    sig2_del = s2[..., None] - lam * sig1_del
    tprime = sig2_del + alpha * sig1_del
    return np.einsum("...ip,...p,...jp->...ij", Q, tprime, Q)


def assemble_jacobian(u: GridFunction, cfg: SolveConfig) -> sp.csr_matrix:
    """Sparse Jacobian of the residual over the full node vector."""
    res = cfg.resolution
    d = len(res)
    n_total = int(np.prod(res))
    h = u.spacing
    strides = np.array(
        [int(np.prod(res[a + 1 :], dtype=np.int64)) for a in range(d)], dtype=np.int64
    )
    interior = _interior_flat_indices(res)
    H = hessian_interior(u).reshape(-1, d, d)
    F = _gradient_coefficients(H, cfg.alpha)

    rows, cols, vals = [], [], []

    def add(col_offset: int, weight: np.ndarray) -> None:
        rows.append(interior)
        cols.append(interior + col_offset)
        vals.append(weight)

    center = np.zeros(interior.shape[0])
    for a in range(d):
        w = F[:, a, a] / h[a] ** 2
        add(strides[a], w)
        add(-strides[a], w)
        center -= 2.0 * w
    add(0, center)
    for a, b in combinations(range(d), 2):
        w = F[:, a, b] / (2.0 * h[a] * h[b])
        add(strides[a] + strides[b], w)
        add(-strides[a] - strides[b], w)
        add(strides[a] - strides[b], -w)
        add(-strides[a] + strides[b], -w)

    boundary = np.setdiff1d(np.arange(n_total), interior, assume_unique=False)
    rows.append(boundary)
    cols.append(boundary)
    vals.append(np.ones(boundary.shape[0]))

    J = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_total, n_total),
    )
    return J.tocsr()


def default_initial_guess(cfg: SolveConfig) -> GridFunction:
    """Convex paraboloid centered in the box, scaled to dominate the data.

    Curvature c makes binom(d,3) c^3 + alpha binom(d,2) c^2 comparable to
    max f, so the starting iterate sits well inside the admissibility cone.
    """
    g = cfg.empty_grid()
    f = _field_values(cfg.rhs, g)
    d = cfg.n_dims
    n3 = d * (d - 1) * (d - 2) / 6.0
    c = max(1.0, (float(f.max()) / n3) ** (1.0 / 3.0))
    center = np.array([(lo + hi) / 2.0 for lo, hi in cfg.box])
    mesh = g.mesh()
    vals = 0.5 * c * ((mesh - center) ** 2).sum(axis=-1)
    return GridFunction(box=cfg.box, values=vals)


def solve(cfg: SolveConfig, initial: GridFunction | None = None) -> SolveResult:
    """Damped Newton iteration on the discrete Dirichlet problem.

    Steps are accepted only when the residual max-norm strictly decreases
    and every interior node stays strictly admissible; the cone check is
    what keeps each linearization elliptic and the iteration well posed.
    """
    u = default_initial_guess(cfg) if initial is None else initial
    if u.resolution != cfg.resolution or u.box != cfg.box:
        raise ValueError("initial guess does not live on the configured grid")
    mask = admissible_interior_mask(u, cfg.alpha)
    if not bool(mask.all()):
        raise ValueError(
            f"initial guess is not admissible at {int((~mask).sum())} interior nodes"
        )

    r = residual_field(u, cfg)
    rnorm = float(np.abs(r.values).max())
    history = [rnorm]
    adm_history = [1.0]
    status = "converged"
    iterations = 0
    for _ in range(cfg.max_iterations):
        if rnorm <= cfg.tolerance:
            break
        J = assemble_jacobian(u, cfg)
        try:
            step = spla.spsolve(J.tocsc(), -r.values.ravel())
        except RuntimeError as exc:
            raise ArithmeticError(f"linear solve failed: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise ArithmeticError("linear solve produced non-finite step")
        t = cfg.initial_step
        accepted = False
        while t >= cfg.min_step:
            trial = GridFunction(
                box=cfg.box,
                values=u.values + t * step.reshape(cfg.resolution),
            )
            if bool(admissible_interior_mask(trial, cfg.alpha).all()):
                rt = residual_field(trial, cfg)
                rt_norm = float(np.abs(rt.values).max())
                if rt_norm < rnorm:
                    u, r, rnorm = trial, rt, rt_norm
                    accepted = True
                    break
            t *= cfg.backtrack
        iterations += 1
        if not accepted:
            status = "stalled"
            break
        history.append(rnorm)
        adm_history.append(1.0)
    else:
        if rnorm > cfg.tolerance:
            status = "max-iterations"

    converged = rnorm <= cfg.tolerance
    if not converged and status == "converged":
        status = "max-iterations"
    H = hessian_interior(u)
    eigs = np.linalg.eigvalsh(H.reshape(-1, cfg.n_dims, cfg.n_dims))
    mask = admissible_interior_mask(u, cfg.alpha)
    return SolveResult(
        u=u,
        residual_inf=rnorm,
        iterations=iterations,
        converged=converged,
        status=status,
        admissible_fraction=float(mask.mean()),
        min_semiconvex_margin=float(eigs[:, 0].min()),
        max_lambda1=float(eigs[:, -1].max()),
        residual_history=history,
        admissible_history=adm_history,
    )


# ---------------------------------------------------------------------------
# interior-bound probe
# ---------------------------------------------------------------------------


def pogorelov_profile(K: float, reg: float = 0.25, amplitude: float = 1.0):
    """Anisotropic boundary profile (1+x_0^2) sqrt(reg + |x'|^2) - (K/2)|x|^2.

    The first factor mimics the singular family's shape in its smooth,
    order-3 form; the quadratic pulldown drives the minimum Hessian
    eigenvalue of the data toward -K.
    """

    def g(X: np.ndarray) -> np.ndarray:
        x0 = X[..., 0]
        rho2 = (X[..., 1:] ** 2).sum(axis=-1)
        return amplitude * (1.0 + x0**2) * np.sqrt(reg + rho2) - 0.5 * K * (
            X**2
        ).sum(axis=-1)

    return g


@dataclass(frozen=True)
class ProbeRow:
    K: float
    max_lambda1: float
    log_lambda1: float
    sup_norm: float
    grad_norm: float
    iterations: int


def interior_bound_probe(cfg: SolveConfig, K_values, family=None) -> list:
    """Solve a boundary-data family over K and tabulate interior curvature.

    `family(K)` returns the boundary data for that K (default: the
    anisotropic profile above with f unchanged).  Rows report the largest
    interior Hessian eigenvalue, its log, and the discrete C^1 data of the
    solution; no monotonicity in K is asserted.  A non-convergent member
    raises with the solver status.
    """
    if family is None:
        family = pogorelov_profile
    rows = []
    for K in sorted(float(k) for k in K_values):
        cfg_k = SolveConfig(
            box=cfg.box,
            resolution=cfg.resolution,
            rhs=cfg.rhs,
            boundary=family(K),
            alpha=cfg.alpha,
            initial_step=cfg.initial_step,
            backtrack=cfg.backtrack,
            min_step=cfg.min_step,
            max_iterations=cfg.max_iterations,
            tolerance=cfg.tolerance,
        )
        result = solve(cfg_k)
        if not result.converged:
            raise RuntimeError(
                f"probe member K={K} did not converge: status={result.status}, "
                f"residual={result.residual_inf:.3e}"
            )
        grad = gradient_interior(result.u)
        rows.append(
            ProbeRow(
                K=K,
                max_lambda1=result.max_lambda1,
                log_lambda1=float(np.log(result.max_lambda1)),
                sup_norm=float(np.abs(result.u.values).max()),
                grad_norm=float(np.linalg.norm(grad, axis=-1).max()),
                iterations=result.iterations,
            )
        )
    return rows
