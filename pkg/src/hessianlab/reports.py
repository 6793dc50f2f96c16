"""Campaign reports: a single result type plus canonical JSON serialization.

Reports must be byte-reproducible from (config, seed, build): serialization
sorts keys, uses shortest round-trip float repr (the json module default),
and embeds no timestamps.  The schema is documented in docs/formats.md.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["VerificationReport", "build_identifier", "fit_loglog_slope"]

_BUILD: str | None = None


def build_identifier() -> str:
    """git-describe of the working tree, falling back to the package version."""
    global _BUILD
    if _BUILD is not None:
        return _BUILD
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            _BUILD = out.stdout.strip()
            return _BUILD
    except (OSError, subprocess.SubprocessError):
        pass
    from . import __version__

    _BUILD = f"hessianlab-{__version__}"
    return _BUILD


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x); both must be positive."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 2:
        return 0.0
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log trend needs strictly positive data")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class VerificationReport:
    """Outcome of one randomized verification campaign.

    `worst_margin` is the most negative slack seen; `violations` counts
    samples with negative slack, so violations == 0 iff worst_margin >= 0.
    `estimated_constant` is the extremal empirical constant over exactly
    `samples` admitted draws (campaign docstrings say which extremum).
    `witness` records the spectrum and auxiliary data of the worst case.
    """

    inequality_id: str
    samples: int
    violations: int
    worst_margin: float
    estimated_constant: float
    witness: dict = field(default_factory=dict)
    skipped: int = 0
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    build: str = field(default_factory=build_identifier)

    def __post_init__(self) -> None:
        consistent = (self.violations == 0) == (self.worst_margin >= 0.0)
        if not consistent:
            raise ValueError(
                f"inconsistent report: violations={self.violations} "
                f"worst_margin={self.worst_margin}"
            )

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "samples": self.samples,
            "violations": self.violations,
            "skipped": self.skipped,
            "worst_margin": self.worst_margin,
            "estimated_constant": self.estimated_constant,
            "witness": _jsonable(self.witness),
            "config": _jsonable(self.config),
            "extras": _jsonable(self.extras),
            "build": self.build,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())
