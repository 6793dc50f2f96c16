"""Randomized verification and constant estimation for S_k inequalities.

Each campaign draws spectra in Gamma~_k (entries >= -K, sorted descending),
evaluates a pointwise inequality on every sample, and reduces to a
VerificationReport: violation count, worst margin, extremal empirical
constant, and the witness of the worst case.  Campaigns that claim a
constant independent of the top eigenvalue also re-run per decade of
lambda_1 and report the log-log trend slope of the per-decade extremes;
a slope near zero is the boundedness signal.

Margin convention: every campaign defines a per-sample margin whose
negativity is a violation, so violations == 0 iff worst_margin >= 0.

All campaigns are bit-reproducible from (spec, seed): work is split into
fixed-size chunks with counter-derived RNG streams, and chunk results merge
in index order regardless of the worker count (HESSIANLAB_THREADS).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from . import sampling
from .reports import VerificationReport, fit_loglog_slope
from .symfun import (
    elementary_batch,
    sum_hessian_gradient_batch,
    sum_hessian_pair_hessian_batch,
    sum_hessian_value_batch,
)

__all__ = [
    "SampleSpec",
    "verify_lower_bound_small_j",
    "verify_lower_bound_large_j",
    "verify_tail_bound",
    "verify_concavity",
    "verify_key_inequality",
    "verify_ellipticity_ratio",
    "verify_log_concavity",
    "CAMPAIGNS",
]

CHUNK = 16_384
_GAMMA_CAP = 4.0


class _OutsideCone(ValueError):
    """Probe point left the cone where log S_k is defined."""


@dataclass(frozen=True)
class SampleSpec:
    """Parameters of one sampling campaign.

    `lambda1_range` bounds the top eigenvalue (log-uniform); `tail_mode`
    selects the shape of the remaining entries: "bounded" (tail below 10),
    "spiked-two" (second eigenvalue comparably large), or "general" (a
    mixture including an unconstrained wedge).  `s_level_range`, when set,
    projects every sample onto S_k = target with a log-uniform target in
    that range; campaigns about solutions with bounded right-hand side
    need it, pure cone statements do not.
    """

    n: int
    k: int = 3
    K: float = 1.0
    lambda1_range: tuple = (1e3, 1e6)
    tail_mode: str = "general"
    count: int = 100_000
    seed: int = 0
    s_level_range: tuple | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.K < 0:
            raise ValueError("K must be >= 0")
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def resolved(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# campaign engine
# ---------------------------------------------------------------------------


def _partition(count: int):
    sizes = []
    while count > 0:
        take = min(CHUNK, count)
        sizes.append(take)
        count -= take
    return list(enumerate(sizes))


def _map_chunks(spec: SampleSpec, fn, lambda1_range, chunk_base: int = 0):
    """Evaluate fn(lams, rng) on every chunk, in chunk order."""

    def one(part):
        ci, size = part
        rng = sampling.chunk_rng(spec.seed, chunk_base + ci)
        lams = sampling.draw_spectra(
            rng,
            size,
            spec.n,
            spec.k,
            spec.K,
            lambda1_range=lambda1_range,
            tail_mode=spec.tail_mode,
            s_level=spec.s_level_range,
        )
        return fn(lams, rng)

    parts = _partition(spec.count)
    workers = sampling.worker_count()
    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, parts))
    return [one(p) for p in parts]


def _decade_ranges(lo: float, hi: float):
    """Split [lo, hi] at powers of ten (at least one subrange)."""
    edges = [lo]
    e = 10.0 ** math.floor(math.log10(lo) + 1e-12)
    while e <= lo:
        e *= 10.0
    while e < hi * (1 - 1e-12):
        edges.append(e)
        e *= 10.0
    edges.append(hi)
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def _per_decade(spec: SampleSpec, fn, reduce_chunks):
    """Run fn per lambda_1 decade; returns (decade stats, merged totals)."""
    ranges = _decade_ranges(*spec.lambda1_range)
    per_count = max(spec.count // len(ranges), 1)
    decade_stats = []
    merged = None
    for d, rng_d in enumerate(ranges):
        sub = SampleSpec(**{**spec.resolved(), "count": per_count})
        chunks = _map_chunks(sub, fn, rng_d, chunk_base=1_000_000 * (d + 1))
        stats = reduce_chunks(chunks)
        stats["lambda1_lo"], stats["lambda1_hi"] = rng_d
        decade_stats.append(stats)
        merged = stats if merged is None else _merge_totals(merged, stats)
    return decade_stats, merged


def _merge_totals(a: dict, b: dict) -> dict:
    out = dict(b)
    out["samples"] = a["samples"] + b["samples"]
    out["violations"] = a["violations"] + b["violations"]
    out["skipped"] = a.get("skipped", 0) + b.get("skipped", 0)
    if a["worst_margin"] <= b["worst_margin"]:
        out["worst_margin"] = a["worst_margin"]
        out["witness"] = a["witness"]
    if "min_stat" in a:
        out["min_stat"] = min(a["min_stat"], b["min_stat"])
    if "max_stat" in a:
        out["max_stat"] = max(a["max_stat"], b["max_stat"])
    return out


def _trend_slope(decade_stats, key: str) -> float:
    centers = [math.sqrt(d["lambda1_lo"] * d["lambda1_hi"]) for d in decade_stats]
    stats = [d[key] for d in decade_stats]
    if len(centers) < 2 or any(s <= 0 for s in stats):
        return 0.0
    return fit_loglog_slope(centers, stats)


# ---------------------------------------------------------------------------
# gradient lower bounds (comparability constants c1, c2)
# ---------------------------------------------------------------------------


def verify_lower_bound_small_j(spec: SampleSpec) -> VerificationReport:
    """Campaign for F^{jj} >= c1 F / lambda_j over the leading indices j < k.

    Per-sample margin: min over j < k of F^{jj} lambda_j / F.  The estimated
    constant is the campaign minimum of that ratio (the best admissible c1);
    samples with a nonpositive lambda_j are skipped and counted (they cannot
    occur in Gamma~_k, so a nonzero count is itself a red flag).
    """
    if spec.k < 2:
        raise ValueError("lower bound over j < k needs k >= 2")

    def eval_chunk(lams, rng):
        F = sum_hessian_value_batch(lams, spec.k)
        G = sum_hessian_gradient_batch(lams, spec.k)
        lead = lams[:, : spec.k - 1]
        ok = np.all(lead > 0.0, axis=1)
        ratios = G[:, : spec.k - 1] * lead / F[:, None]
        margins = ratios.min(axis=1)
        margins[~ok] = np.inf
        kept = int(ok.sum())
        if kept == 0:
            return {
                "samples": 0, "skipped": int((~ok).sum()), "violations": 0,
                "worst_margin": np.inf, "min_stat": np.inf, "witness": {},
            }
        i = int(np.argmin(margins))
        j = int(np.argmin(ratios[i, :]))
        return {
            "samples": kept,
            "skipped": int((~ok).sum()),
            "violations": int((margins[ok] < 0.0).sum()),
            "worst_margin": float(margins[i]),
            "min_stat": float(margins[i]),
            "witness": {
                "spectrum": lams[i].tolist(),
                "j": j,
                "ratio": float(ratios[i, j]),
                "F": float(F[i]),
            },
        }

    decade_stats, total = _per_decade(spec, eval_chunk, _reduce_min)
    slope = _trend_slope(decade_stats, "min_stat")
    return VerificationReport(
        inequality_id="small-j",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=total["min_stat"],
        witness=total["witness"],
        skipped=total["skipped"],
        config=spec.resolved(),
        extras={"per_decade": _decade_table(decade_stats, "min_stat"),
                "trend_slope": slope},
    )


def verify_lower_bound_large_j(spec: SampleSpec) -> VerificationReport:
    """Campaign for F^{jj} >= c2 sum_i F^{ii} over the trailing indices j >= k.

    Per-sample margin: min over j >= k of F^{jj} / sum_i F^{ii}; the
    estimated constant is the campaign minimum (best admissible c2).
    """
    if spec.k >= spec.n:
        raise ValueError("lower bound over j >= k needs k < n")

    def eval_chunk(lams, rng):
        G = sum_hessian_gradient_batch(lams, spec.k)
        denom = G.sum(axis=1)
        ratios = G[:, spec.k - 1 :] / denom[:, None]
        margins = ratios.min(axis=1)
        i = int(np.argmin(margins))
        j = int(np.argmin(ratios[i, :])) + spec.k - 1
        return {
            "samples": lams.shape[0],
            "skipped": 0,
            "violations": int((margins < 0.0).sum()),
            "worst_margin": float(margins[i]),
            "min_stat": float(margins[i]),
            "witness": {"spectrum": lams[i].tolist(), "j": j,
                        "ratio": float(margins[i])},
        }

    decade_stats, total = _per_decade(spec, eval_chunk, _reduce_min)
    slope = _trend_slope(decade_stats, "min_stat")
    return VerificationReport(
        inequality_id="large-j",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=total["min_stat"],
        witness=total["witness"],
        skipped=total["skipped"],
        config=spec.resolved(),
        extras={"per_decade": _decade_table(decade_stats, "min_stat"),
                "trend_slope": slope},
    )


def verify_tail_bound(spec: SampleSpec, N1: float = 10.0) -> VerificationReport:
    """Boundedness of |lambda_i| for i >= k when S_k <= N1 and lambda >= -K.

    Samples are projected onto S_k levels in (0, N1]; the estimated constant
    is the campaign maximum of max_{i >= k} |lambda_i| (the empirical C3).
    The margin is the smaller of N1 - S_k and lambda_min + K, nonnegative by
    construction; the real check is the per-decade trend of the maximum,
    which must be flat for the bound to deserve the name.
    """
    if N1 <= 0:
        raise ValueError("N1 must be positive")
    if spec.k >= spec.n + 1:
        raise ValueError("tail bound needs k <= n")
    level = spec.s_level_range or (N1 * 1e-3, N1)
    if level[1] > N1:
        raise ValueError(f"s_level_range {level} exceeds N1={N1}")
    spec = SampleSpec(**{**spec.resolved(), "s_level_range": level})

    def eval_chunk(lams, rng):
        e = elementary_batch(lams, spec.k)
        s = e[:, spec.k] + e[:, spec.k - 1]
        tail = np.abs(lams[:, spec.k - 1 :]).max(axis=1)
        margins = np.minimum(N1 - s, lams.min(axis=1) + spec.K)
        iw = int(np.argmax(tail))
        im = int(np.argmin(margins))
        return {
            "samples": lams.shape[0],
            "skipped": 0,
            "violations": int((margins < 0.0).sum()),
            "worst_margin": float(margins[im]),
            "max_stat": float(tail[iw]),
            "witness": {"spectrum": lams[iw].tolist(),
                        "tail_max": float(tail[iw]), "S_k": float(s[iw])},
        }

    decade_stats, total = _per_decade(spec, eval_chunk, _reduce_max)
    slope = _trend_slope(decade_stats, "max_stat")
    return VerificationReport(
        inequality_id="tail-bound",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=total["max_stat"],
        witness=total["witness"],
        skipped=total["skipped"],
        config={**spec.resolved(), "N1": N1},
        extras={"per_decade": _decade_table(decade_stats, "max_stat"),
                "trend_slope": slope},
    )


# ---------------------------------------------------------------------------
# concavity campaign
# ---------------------------------------------------------------------------


def _concavity_margins(lams, F, G, H, xi, K):
    """Margin at gamma = 0 and the gamma-sensitivity term, per sample.

    margin0 = -xi'H xi / F + 2 (G.xi)^2 / F^2
              + 2 sum_{i>=2} F^{ii} xi_i^2 / ((lambda_1 + K + 1) F)
              - F^{11} xi_1^2 / (lambda_1 F)
    and the inequality at level gamma is margin0 >= gamma * r0 with
    r0 = F^{11} xi_1^2 / (lambda_1 F).
    """
    quad = np.einsum("mpq,mp,mq->m", H, xi, xi)
    grad_dot = np.einsum("mp,mp->m", G, xi)
    tail_sq = np.einsum("mp,mp->m", G[:, 1:], xi[:, 1:] ** 2)
    lam1 = lams[:, 0]
    r0 = G[:, 0] * xi[:, 0] ** 2 / (lam1 * F)
    margin0 = (
        -quad / F
        + 2.0 * grad_dot**2 / F**2
        + 2.0 * tail_sq / ((lam1 + K + 1.0) * F)
        - r0
    )
    return margin0, r0


def verify_concavity(spec: SampleSpec) -> VerificationReport:
    """Concavity-form campaign for S_k along descending spectra above -K.

    For each sample the quadratic-form inequality is evaluated at a random
    unit direction, at every coordinate axis, and along the normalized
    gradient of S_k (the directions where the form is most likely extremal).
    Violations are negative margins at gamma = 0.  The estimated constant is
    the largest gamma with no violation over the whole sample, capped at 4;
    it is reported as `gamma_star` and must come out strictly positive for
    the inequality to hold with room.
    """

    def eval_chunk(lams, rng):
        m, n = lams.shape
        F = sum_hessian_value_batch(lams, spec.k)
        G = sum_hessian_gradient_batch(lams, spec.k)
        H = sum_hessian_pair_hessian_batch(lams, spec.k)
        xis = [rng.standard_normal((m, n))]
        xis[0] /= np.linalg.norm(xis[0], axis=1, keepdims=True)
        for a in range(n):
            e = np.zeros((m, n))
            e[:, a] = 1.0
            xis.append(e)
        gnorm = np.linalg.norm(G, axis=1, keepdims=True)
        xis.append(G / np.where(gnorm > 0, gnorm, 1.0))
        worst = np.inf
        witness = {}
        violations = 0
        ratio_min = np.inf
        evaluated = 0
        for tag, xi in enumerate(xis):
            margin0, r0 = _concavity_margins(lams, F, G, H, xi, spec.K)
            evaluated += m
            violations += int((margin0 < 0.0).sum())
            i = int(np.argmin(margin0))
            if margin0[i] < worst:
                worst = float(margin0[i])
                witness = {
                    "spectrum": lams[i].tolist(),
                    "xi": xi[i].tolist(),
                    "margin": float(margin0[i]),
                    "direction": "random" if tag == 0 else
                    ("gradient" if tag == len(xis) - 1 else f"axis-{tag - 1}"),
                }
            active = r0 > 0.0
            if np.any(active):
                ratio_min = min(ratio_min, float((margin0[active] / r0[active]).min()))
        return {
            "samples": m,
            "skipped": 0,
            "violations": violations,
            "worst_margin": worst,
            "witness": witness,
            "ratio_min": ratio_min,
            "directions": evaluated,
        }

    chunks = _map_chunks(spec, eval_chunk, spec.lambda1_range)
    total = chunks[0]
    for c in chunks[1:]:
        merged = _merge_totals(total, c)
        merged["ratio_min"] = min(total["ratio_min"], c["ratio_min"])
        merged["directions"] = total["directions"] + c["directions"]
        total = merged
    gamma_star = float(np.clip(total["ratio_min"], 0.0, _GAMMA_CAP))
    return VerificationReport(
        inequality_id="concavity",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=gamma_star,
        witness=total["witness"],
        config=spec.resolved(),
        extras={
            "gamma_star": gamma_star,
            "gamma_cap": _GAMMA_CAP,
            "directions_evaluated": total["directions"],
        },
    )


# ---------------------------------------------------------------------------
# comparability of sigma_2 derivatives with F derivatives (k = 3)
# ---------------------------------------------------------------------------


def verify_key_inequality(spec: SampleSpec) -> VerificationReport:
    """Campaign for |sigma_2^{ii}|^2 <= C F^{ii} (sigma_2 + sigma_1), k = 3.

    Samples sit on bounded S_3 levels (the inequality is about solutions
    with positive bounded right-hand side; near the cone boundary S_3 -> 0
    the ratio genuinely blows up).  The estimated constant is the campaign
    maximum of the pointwise ratio; a nonpositive F^{ii} would be a cone
    membership failure and counts as a violation.  The companion vector form
      sum_i |a_i sigma_2^{ii}| <= C' (sum_i F^{ii} a_i^2 + sigma_2 + sigma_1)
    is checked with one random Gaussian vector per sample; its empirical
    constant and the bound n sqrt(C)/2 implied by the pointwise form are
    reported in extras.
    """
    if spec.k != 3:
        raise ValueError("the sigma_2 comparability campaign is specific to k = 3")
    if spec.s_level_range is None:
        spec = SampleSpec(**{**spec.resolved(), "s_level_range": (0.5, 2.0)})

    def eval_chunk(lams, rng):
        m, n = lams.shape
        from .symfun import deleted_one_batch

        d1 = deleted_one_batch(lams, 2)
        sigma1_del = d1[:, :, 1]
        G = d1[:, :, 2] + d1[:, :, 1]
        e = elementary_batch(lams, 2)
        s_prime = e[:, 2] + e[:, 1]
        margins = G.min(axis=1)
        ratios = sigma1_del**2 / (G * s_prime[:, None])
        ratio_max = ratios.max(axis=1)
        iw = int(np.argmax(ratio_max))
        im = int(np.argmin(margins))
        a = rng.standard_normal((m, n))
        vec_ratio = np.abs(a * sigma1_del).sum(axis=1) / (
            (G * a**2).sum(axis=1) + s_prime
        )
        return {
            "samples": m,
            "skipped": 0,
            "violations": int((margins < 0.0).sum()),
            "worst_margin": float(margins[im]),
            "max_stat": float(ratio_max[iw]),
            "vector_ratio_max": float(vec_ratio.max()),
            "witness": {
                "spectrum": lams[iw].tolist(),
                "i": int(np.argmax(ratios[iw])),
                "ratio": float(ratio_max[iw]),
            },
        }

    def reduce_chunks(chunks):
        total = _reduce_max(chunks)
        total["vector_ratio_max"] = max(c["vector_ratio_max"] for c in chunks)
        return total

    decade_stats, total = _per_decade(spec, eval_chunk, reduce_chunks)
    vector_ratio = max(d["vector_ratio_max"] for d in decade_stats)
    c_point = total["max_stat"]
    vector_bound = spec.n * math.sqrt(max(c_point, 0.0)) / 2.0
    return VerificationReport(
        inequality_id="key-inequality",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=c_point,
        witness=total["witness"],
        config=spec.resolved(),
        extras={
            "per_decade": _decade_table(decade_stats, "max_stat"),
            "trend_slope": _trend_slope(decade_stats, "max_stat"),
            "vector_ratio_max": vector_ratio,
            "vector_bound_from_pointwise": vector_bound,
            "vector_form_ok": bool(vector_ratio <= vector_bound + 1e-12),
        },
    )


def verify_ellipticity_ratio(spec: SampleSpec, K1: float | None = None) -> VerificationReport:
    """Two-sided bounds on F^{ii} (K1 + lambda_i)^2 / (sigma_2 + sigma_1), k = 3.

    This is the uniform-ellipticity ratio of the conjugated operator after
    the semi-convexity shift; K1 must exceed K so every factor K1 + lambda_i
    stays positive.  Samples sit on bounded S_3 levels.  Reports the campaign
    minimum and maximum of the ratio over all samples and indices (min in
    extras, max as the estimated constant) plus per-decade trends for both.
    """
    if spec.k != 3:
        raise ValueError("the ellipticity-ratio campaign is specific to k = 3")
    if K1 is None:
        K1 = spec.K + 1.0
    if K1 <= spec.K:
        raise ValueError(f"need K1 > K, got K1={K1}, K={spec.K}")
    if spec.s_level_range is None:
        spec = SampleSpec(**{**spec.resolved(), "s_level_range": (0.5, 2.0)})

    def eval_chunk(lams, rng):
        G = sum_hessian_gradient_batch(lams, 3)
        e = elementary_batch(lams, 2)
        s_prime = e[:, 2] + e[:, 1]
        ratios = G * (K1 + lams) ** 2 / s_prime[:, None]
        mins = ratios.min(axis=1)
        maxs = ratios.max(axis=1)
        ilo = int(np.argmin(mins))
        ihi = int(np.argmax(maxs))
        return {
            "samples": lams.shape[0],
            "skipped": 0,
            "violations": int((mins < 0.0).sum()),
            "worst_margin": float(mins[ilo]),
            "min_stat": float(mins[ilo]),
            "max_stat": float(maxs[ihi]),
            "witness": {
                "spectrum_min": lams[ilo].tolist(),
                "ratio_min": float(mins[ilo]),
                "spectrum_max": lams[ihi].tolist(),
                "ratio_max": float(maxs[ihi]),
            },
        }

    def reduce_chunks(chunks):
        total = _reduce_max(chunks)
        total["min_stat"] = min(c["min_stat"] for c in chunks)
        return total

    decade_stats, total = _per_decade(spec, eval_chunk, reduce_chunks)
    return VerificationReport(
        inequality_id="ellipticity-ratio",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=total["max_stat"],
        witness=total["witness"],
        config={**spec.resolved(), "K1": K1},
        extras={
            "ratio_min": total["min_stat"],
            "ratio_max": total["max_stat"],
            "per_decade_max": _decade_table(decade_stats, "max_stat"),
            "per_decade_min": _decade_table(decade_stats, "min_stat"),
            "trend_slope_max": _trend_slope(decade_stats, "max_stat"),
            "trend_slope_min": _trend_slope(decade_stats, "min_stat"),
        },
    )


def verify_log_concavity(spec: SampleSpec, step: float = 1e-3) -> VerificationReport:
    """Negative semidefiniteness of the finite-difference Hessian of log S_k.

    Direct second differences at sampled interior points; the margin of a
    sample is -(largest Hessian eigenvalue) + tol where tol is 1e-6 of the
    largest eigenvalue magnitude.  The relative step shrinks automatically
    when a probe stencil would leave the cone (log S_k is only defined
    inside); samples too close to the boundary for any step are skipped and
    counted.  Expensive per sample, so meant for spot checks (a few hundred
    points), not bulk campaigns.
    """
    from .oracles import fd_hessian_of_value
    from .symfun import sum_hessian

    def log_s(x: np.ndarray) -> float:
        value = sum_hessian(spec.k, x)
        if value <= 0.0:
            raise _OutsideCone
        return math.log(value)

    def fd_with_agreement(row):
        # accept only step-halving-stable stencils, judged on the top
        # eigenvalue (the asserted quantity): away from convergence it moves
        # by orders of magnitude under halving, once converged it freezes
        trial = step * (1.0 + np.abs(row))
        for _ in range(8):
            try:
                coarse = fd_hessian_of_value(log_s, row, trial)
                fine = fd_hessian_of_value(log_s, row, trial / 2.0)
            except _OutsideCone:
                trial = trial / 4.0
                continue
            ef = np.linalg.eigvalsh(fine)
            mc = float(np.linalg.eigvalsh(coarse)[-1])
            mf = float(ef[-1])
            if abs(mc - mf) <= max(0.05 * abs(mf), 1e-7 * float(np.abs(ef).max())):
                return fine
            trial = trial / 4.0
        return None

    def eval_chunk(lams, rng):
        worst = np.inf
        witness = {}
        violations = 0
        skipped = 0
        for row in lams:
            h = fd_with_agreement(row)
            if h is None:
                skipped += 1
                continue
            eigs = np.linalg.eigvalsh(h)
            tol = 1e-6 * float(np.abs(eigs).max() or 1.0)
            margin = -float(eigs[-1]) + tol
            if margin < 0:
                violations += 1
            if margin < worst:
                worst = margin
                witness = {"spectrum": row.tolist(), "max_eig": float(eigs[-1])}
        return {
            "samples": lams.shape[0] - skipped,
            "skipped": skipped,
            "violations": violations,
            "worst_margin": worst,
            "witness": witness,
        }

    chunks = _map_chunks(spec, eval_chunk, spec.lambda1_range)
    total = chunks[0]
    for c in chunks[1:]:
        total = _merge_totals(total, c)
    return VerificationReport(
        inequality_id="log-concavity",
        samples=total["samples"],
        violations=total["violations"],
        worst_margin=total["worst_margin"],
        estimated_constant=total["worst_margin"],
        witness=total["witness"],
        config={**spec.resolved(), "fd_step": step},
    )


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------


def _reduce_min(chunks):
    total = dict(chunks[0])
    for c in chunks[1:]:
        total = _merge_totals(total, c)
    return total


_reduce_max = _reduce_min  # _merge_totals handles both min_stat and max_stat


def _decade_table(decade_stats, key):
    return [
        {"lambda1_lo": d["lambda1_lo"], "lambda1_hi": d["lambda1_hi"], key: d[key]}
        for d in decade_stats
    ]


CAMPAIGNS = {
    "small-j": verify_lower_bound_small_j,
    "large-j": verify_lower_bound_large_j,
    "tail-bound": verify_tail_bound,
    "concavity": verify_concavity,
    "key-inequality": verify_key_inequality,
    "ellipticity-ratio": verify_ellipticity_ratio,
    "log-concavity": verify_log_concavity,
}
