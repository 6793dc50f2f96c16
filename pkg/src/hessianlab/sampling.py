"""Randomized spectrum generation inside the admissibility cones.

The sampler mixes the two regimes that matter for the inequalities under
test: a dominant top eigenvalue with a bounded tail, and two comparably
large eigenvalues with a bounded remainder.  A plain box mixture covers the
moderate regime.  Rejection keeps only spectra in the open cone
Gamma~_k = Gamma_{k-1} & {S_k > 0} with every entry >= -K.

Optionally the smallest entry is re-solved so that S_k lands exactly on a
prescribed level: S_k is affine in each single eigenvalue, so the projection
is one division.  This realizes "spectra of solutions with bounded
right-hand side" without rejection on a measure-zero set.

Streams are counter-derived: chunk c of a campaign with seed s draws from
Philox(key=s, counter=[0,0,0,c]), so results are independent of how chunks
are scheduled across workers.
"""

from __future__ import annotations

import os

import numpy as np

from .symfun import elementary_batch

__all__ = [
    "SamplingError",
    "chunk_rng",
    "worker_count",
    "gamma_prefix_mask",
    "gamma_tilde_mask",
    "draw_spectra",
]

TAIL_HI = 10.0
_BOX_SCALES = (10.0, 1e3, 1e6)


class SamplingError(RuntimeError):
    """Raised when the rejection sampler exhausts its retry budget."""


def chunk_rng(seed: int, chunk: int = 0) -> np.random.Generator:
    """Deterministic per-chunk generator (counter-derived Philox stream)."""
    bitgen = np.random.Philox(key=np.uint64(seed), counter=[0, 0, 0, np.uint64(chunk)])
    return np.random.Generator(bitgen)


def worker_count() -> int:
    """Worker cap from HESSIANLAB_THREADS (default 1)."""
    raw = os.environ.get("HESSIANLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def gamma_prefix_mask(lams: np.ndarray, upto: int) -> np.ndarray:
    """Rows with sigma_1..sigma_upto all strictly positive."""
    if upto <= 0:
        return np.ones(lams.shape[0], dtype=bool)
    e = elementary_batch(lams, upto)
    return np.all(e[:, 1 : upto + 1] > 0.0, axis=1)


def gamma_tilde_mask(lams: np.ndarray, k: int) -> np.ndarray:
    """Rows in Gamma~_k: sigma_1..sigma_{k-1} > 0 and S_k > 0 (strict)."""
    e = elementary_batch(lams, k)
    ok = np.all(e[:, 1:k] > 0.0, axis=1) if k >= 2 else np.ones(lams.shape[0], bool)
    return ok & (e[:, k] + e[:, k - 1] > 0.0)


def _candidates(
    rng: np.random.Generator,
    m: int,
    n: int,
    K: float,
    lambda1_range,
    tail_mode: str,
) -> np.ndarray:
    if lambda1_range is None:
        scale = rng.choice(_BOX_SCALES, size=(m, 1))
        return rng.uniform(0.0, 1.0, size=(m, n)) * (scale + K) - K
    lo, hi = lambda1_range
    if not (0 < lo <= hi):
        raise ValueError(f"lambda1 range must satisfy 0 < lo <= hi, got {lambda1_range}")
    lam1 = np.exp(rng.uniform(np.log(lo), np.log(hi), size=m))
    out = np.empty((m, n))
    out[:, 0] = lam1
    if tail_mode == "bounded":
        out[:, 1:] = rng.uniform(-K, TAIL_HI, size=(m, n - 1))
    elif tail_mode == "spiked-two":
        lam2_hi = np.maximum(lam1, TAIL_HI * 2)
        out[:, 1] = np.exp(rng.uniform(np.log(TAIL_HI), np.log(lam2_hi), size=m))
        out[:, 2:] = rng.uniform(-K, TAIL_HI, size=(m, n - 2))
    elif tail_mode == "general":
        kind = rng.integers(0, 3, size=m)
        out[:, 1:] = rng.uniform(-K, TAIL_HI, size=(m, n - 1))
        two = kind == 1
        if np.any(two):
            lam2_hi = np.maximum(lam1[two], TAIL_HI * 2)
            out[two, 1] = np.exp(
                rng.uniform(np.log(TAIL_HI), np.log(lam2_hi), size=int(two.sum()))
            )
        wedge = kind == 2
        if np.any(wedge):
            w = int(wedge.sum())
            out[np.ix_(wedge, np.arange(1, n))] = rng.uniform(
                -K, lam1[wedge][:, None], size=(w, n - 1)
            )
    else:
        raise ValueError(f"unknown tail mode {tail_mode!r}")
    return out


def _project_onto_level(
    lams: np.ndarray, k: int, targets: np.ndarray, K: float
) -> tuple[np.ndarray, np.ndarray]:
    """Re-solve the smallest entry so S_k equals the target exactly.

    Returns (projected rows, keep mask); rows where the affine coefficient is
    not safely positive, or where the solved entry leaves [-K, lam_1], are
    dropped.
    """
    head = lams[:, :-1]
    e = elementary_batch(head, k)
    coeff = e[:, k - 1] + (e[:, k - 2] if k >= 2 else np.ones(len(e)))
    const = e[:, k] + e[:, k - 1]
    keep = coeff > 1e-12
    last = np.full(lams.shape[0], np.nan)
    last[keep] = (targets[keep] - const[keep]) / coeff[keep]
    keep &= (last >= -K) & (last <= head[:, 0])
    out = np.concatenate([head, last[:, None]], axis=1)
    out = -np.sort(-out, axis=1)
    return out, keep


def draw_spectra(
    rng: np.random.Generator,
    count: int,
    n: int,
    k: int,
    K: float,
    lambda1_range=None,
    tail_mode: str = "general",
    s_level=None,
    max_rounds: int = 400,
) -> np.ndarray:
    """Draw `count` spectra in Gamma~_k, sorted descending, entries >= -K.

    With `s_level = (lo, hi)`, every row additionally satisfies
    S_k = target for a log-uniform target in [lo, hi].
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if K < 0:
        raise ValueError("semi-convexity bound K must be >= 0")
    accepted = np.empty((count, n))
    got = 0
    for _ in range(max_rounds):
        if got >= count:
            break
        m = max(4 * (count - got), 1024)
        cand = _candidates(rng, m, n, K, lambda1_range, tail_mode)
        cand = -np.sort(-cand, axis=1)
        ok = cand[:, -1] >= -K
        if s_level is not None:
            lo, hi = s_level
            if not (0 < lo <= hi):
                raise ValueError(f"S_k level range must satisfy 0 < lo <= hi, got {s_level}")
            targets = np.exp(rng.uniform(np.log(lo), np.log(hi), size=m))
            cand, keep = _project_onto_level(cand, k, targets, K)
            ok &= keep
        ok &= gamma_tilde_mask(cand, k)
        if lambda1_range is not None:
            lo1, hi1 = lambda1_range
            ok &= (cand[:, 0] >= lo1) & (cand[:, 0] <= hi1)
        take = min(int(ok.sum()), count - got)
        if take:
            accepted[got : got + take] = cand[ok][:take]
            got += take
    if got < count:
        raise SamplingError(
            f"cone sampler got {got}/{count} spectra "
            f"(n={n}, k={k}, K={K}, lambda1={lambda1_range}, "
            f"tail={tail_mode!r}, s_level={s_level})"
        )
    return accepted
