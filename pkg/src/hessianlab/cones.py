"""Membership tests for the cones Gamma_k and Gamma~_k, plus numeric probes.

Gamma_k is the open cone {sigma_1 > 0, ..., sigma_k > 0}; Gamma~_k is
Gamma_{k-1} cut with {S_k > 0} and is the ellipticity domain of the sum
operator S_k.  Membership is strict with zero tolerance; the raw sigma and
S values come back as margins so callers can apply their own slack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sampling
from .reports import VerificationReport
from .symfun import elementary_batch, sum_hessian_gradient_batch, _values

__all__ = [
    "ConeMembership",
    "classify",
    "ellipticity_check",
    "convexity_probe",
    "scaling_witness",
]


@dataclass(frozen=True)
class ConeMembership:
    """Cone memberships of one spectrum, for every order k = 1..n.

    `in_gamma[k-1]` is membership in Gamma_k (monotone decreasing in k by
    construction); `in_gamma_tilde[k-1]` is membership in Gamma~_k.
    `sigma_margins[j-1]` holds sigma_j and `sum_margins[j-1]` holds S_j,
    the quantities whose strict positivity defines the cones.
    """

    in_gamma: tuple
    in_gamma_tilde: tuple
    min_eigen: float
    semiconvex_margin: float
    sigma_margins: tuple
    sum_margins: tuple

    def gamma_index(self) -> int:
        """Largest k with lam in Gamma_k (0 if none)."""
        for k in range(len(self.in_gamma), 0, -1):
            if self.in_gamma[k - 1]:
                return k
        return 0


def classify(lam, K: float = 0.0) -> ConeMembership:
    """All cone memberships and margins of one spectrum.

    K >= 0 is the semi-convexity bound; `semiconvex_margin` is
    min(lam) + K, positive when the spectrum stays above -K.
    """
    if K < 0:
        raise ValueError(f"semi-convexity bound K must be >= 0, got {K}")
    vals = _values(lam)
    n = vals.size
    e = elementary_batch(vals[None, :], n)[0]
    sigmas = e[1 : n + 1]
    sums = e[1 : n + 1] + e[0:n]
    positive = sigmas > 0.0
    in_gamma = tuple(bool(np.all(positive[:k])) for k in range(1, n + 1))
    in_gamma_tilde = tuple(
        bool((k == 1 or in_gamma[k - 2]) and sums[k - 1] > 0.0) for k in range(1, n + 1)
    )
    lam_min = float(vals.min())
    return ConeMembership(
        in_gamma=in_gamma,
        in_gamma_tilde=in_gamma_tilde,
        min_eigen=lam_min,
        semiconvex_margin=lam_min + K,
        sigma_margins=tuple(float(s) for s in sigmas),
        sum_margins=tuple(float(s) for s in sums),
    )


def ellipticity_check(k: int, lam) -> float:
    """min_p S_k^{pp} over a spectrum in Gamma~_k (positive there).

    Raises if the spectrum is outside Gamma~_k, where the operator has no
    ellipticity guarantee.
    """
    vals = _values(lam)
    if not 1 <= k <= vals.size:
        raise ValueError(f"need 1 <= k <= {vals.size}, got k={k}")
    membership = classify(vals)
    if not membership.in_gamma_tilde[k - 1]:
        raise ValueError(
            f"spectrum {vals.tolist()} is not in Gamma~_{k}; "
            f"margins sigma={membership.sigma_margins} S={membership.sum_margins}"
        )
    return float(sum_hessian_gradient_batch(vals[None, :], k)[0].min())


_SEGMENT_TS = np.concatenate([[0.5], np.arange(1, 10) / 11.0])


def convexity_probe(
    k: int, samples: int, seed: int, *, n: int, K: float = 1.0
) -> VerificationReport:
    """Segment-membership campaign for convexity of Gamma~_k.

    Draws `samples` random endpoint pairs in Gamma~_k and checks the
    midpoint plus nine interior points of each segment for membership.
    The margin of a segment point is the smallest of its defining
    quantities (sigma_1..sigma_{k-1}, S_k); a violation is a nonpositive
    margin, and the worst margin over the whole campaign is reported.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = sampling.chunk_rng(seed)
    a = sampling.draw_spectra(rng, samples, n, k, K, lambda1_range=None)
    b = sampling.draw_spectra(rng, samples, n, k, K, lambda1_range=None)
    worst = np.inf
    witness: dict = {}
    violations = 0
    checked = 0
    for t in _SEGMENT_TS:
        mid = -np.sort(-((1.0 - t) * a + t * b), axis=1)
        e = elementary_batch(mid, k)
        quantities = np.concatenate(
            [e[:, 1:k], (e[:, k] + e[:, k - 1])[:, None]], axis=1
        )
        margins = quantities.min(axis=1)
        checked += margins.size
        bad = margins <= 0.0
        violations += int(bad.sum())
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst = float(margins[i])
            witness = {
                "endpoint_a": a[i].tolist(),
                "endpoint_b": b[i].tolist(),
                "t": float(t),
                "margin": float(margins[i]),
            }
    return VerificationReport(
        inequality_id="cone-convexity",
        samples=samples,
        violations=violations,
        worst_margin=worst,
        estimated_constant=worst,
        witness=witness,
        config={"k": k, "n": n, "K": K, "seed": seed, "segment_points": len(_SEGMENT_TS)},
        extras={"segment_checks": checked},
    )


def scaling_witness(lam, k: int, t_grid=None):
    """A scale t with t*lam outside Gamma~_k, or None.

    Gamma_k is a cone but Gamma~_k is not: sigma_k and sigma_{k-1} scale
    with different powers, so any spectrum with sigma_k < 0 < S_k leaves the
    set under enough magnification.  Scans t in 2^-10..2^10 by default.
    """
    vals = _values(lam)
    if t_grid is None:
        t_grid = 2.0 ** np.arange(-10, 11)
    for t in t_grid:
        scaled = np.sort(t * vals)[::-1]
        if not bool(sampling.gamma_tilde_mask(scaled[None, :], k)[0]):
            return float(t)
    return None
