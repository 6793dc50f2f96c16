"""Scalar fields on uniform box grids, with a byte-exact binary container.

A GridFunction stores values at the nodes of a tensor-product grid over a
box, row-major (C order), with spacing (hi - lo) / (resolution - 1) per
axis.  The on-disk layout is specified field by field in docs/formats.md;
`write_grid`/`read_grid` are the only code paths that touch it.

Also home to the shared second-order stencils: central first and second
differences on interior nodes, exact on quadratics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

__all__ = [
    "GridFunction",
    "gradient_interior",
    "hessian_interior",
    "write_grid",
    "read_grid",
    "MAGIC",
    "FORMAT_VERSION",
]

MAGIC = b"HLABGRID"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class GridFunction:
    """Node values of a scalar field on a uniform box grid."""

    box: tuple
    values: np.ndarray

    def __post_init__(self) -> None:
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if len(box) != vals.ndim:
            raise ValueError(f"box has {len(box)} axes but values have {vals.ndim}")
        for (lo, hi), r in zip(box, vals.shape):
            if not hi > lo:
                raise ValueError(f"degenerate box axis [{lo}, {hi}]")
            if r < 2:
                raise ValueError(f"resolution must be >= 2 per axis, got {r}")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "values", vals)

    @property
    def n_dims(self) -> int:
        return len(self.box)

    @property
    def resolution(self) -> tuple:
        return self.values.shape

    @property
    def spacing(self) -> np.ndarray:
        return np.array(
            [(hi - lo) / (r - 1) for (lo, hi), r in zip(self.box, self.resolution)]
        )

    def axes(self) -> tuple:
        return tuple(
            np.linspace(lo, hi, r) for (lo, hi), r in zip(self.box, self.resolution)
        )

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape (*resolution, n_dims)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def points(self) -> np.ndarray:
        """Node coordinates as a flat (N, n_dims) array, row-major."""
        return self.mesh().reshape(-1, self.n_dims)

    def interior_mesh(self) -> np.ndarray:
        core = tuple(slice(1, -1) for _ in range(self.n_dims))
        return self.mesh()[core]

    @classmethod
    def sample(cls, box, resolution, fn) -> "GridFunction":
        """Evaluate fn on the grid; fn maps (..., n_dims) coordinates to values."""
        probe = cls(box=tuple(box), values=np.zeros(tuple(resolution)))
        vals = np.asarray(fn(probe.mesh()), dtype=np.float64)
        if vals.shape != probe.resolution:
            raise ValueError(
                f"callable returned shape {vals.shape}, expected {probe.resolution}"
            )
        return cls(box=probe.box, values=vals)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(box=self.box, values=values.reshape(self.resolution))


def _block(values: np.ndarray, offset) -> np.ndarray:
    """Interior block shifted by `offset` (one entry per axis, each in -1..1)."""
    sl = []
    for o, s in zip(offset, values.shape):
        stop = s - 1 + o
        sl.append(slice(1 + o, stop if stop != 0 else None))
    return values[tuple(sl)]


def gradient_interior(g: GridFunction) -> np.ndarray:
    """Central first differences at interior nodes, shape (*interior, d)."""
    d = g.n_dims
    h = g.spacing
    core_shape = tuple(r - 2 for r in g.resolution)
    out = np.empty(core_shape + (d,))
    zero = [0] * d
    for a in range(d):
        plus, minus = zero.copy(), zero.copy()
        plus[a], minus[a] = 1, -1
        out[..., a] = (_block(g.values, plus) - _block(g.values, minus)) / (2.0 * h[a])
    return out


def hessian_interior(g: GridFunction) -> np.ndarray:
    """Central second differences at interior nodes, shape (*interior, d, d).

    Diagonal: (u_+ - 2 u_0 + u_-) / h^2.  Off-diagonal: the four-point cross
    stencil / (4 h_a h_b).  Exact on quadratics.
    """
    d = g.n_dims
    h = g.spacing
    core = _block(g.values, [0] * d)
    out = np.empty(core.shape + (d, d))
    zero = [0] * d
    for a in range(d):
        plus, minus = zero.copy(), zero.copy()
        plus[a], minus[a] = 1, -1
        out[..., a, a] = (
            _block(g.values, plus) - 2.0 * core + _block(g.values, minus)
        ) / h[a] ** 2
    for a, b in combinations(range(d), 2):
        pp, pm, mp, mm = (zero.copy() for _ in range(4))
        pp[a], pp[b] = 1, 1
        pm[a], pm[b] = 1, -1
        mp[a], mp[b] = -1, 1
        mm[a], mm[b] = -1, -1
        cross = (
            _block(g.values, pp)
            - _block(g.values, pm)
            - _block(g.values, mp)
            + _block(g.values, mm)
        ) / (4.0 * h[a] * h[b])
        out[..., a, b] = cross
        out[..., b, a] = cross
    return out


def write_grid(path, g: GridFunction) -> None:
    """Serialize to the HLABGRID container (layout in docs/formats.md)."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        np.array([FORMAT_VERSION], dtype="<u4").tofile(f)
        np.array([g.n_dims], dtype="<u4").tofile(f)
        f.write(bytes([1]))  # row-major flag
        f.write(b"\x00" * 7)
        np.asarray(g.resolution, dtype="<u8").tofile(f)
        np.asarray([b for pair in g.box for b in pair], dtype="<f8").tofile(f)
        g.values.astype("<f8").tofile(f)


def read_grid(path) -> GridFunction:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic {raw[:8]!r}")
    version = int(np.frombuffer(raw, "<u4", count=1, offset=8)[0])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    d = int(np.frombuffer(raw, "<u4", count=1, offset=12)[0])
    if raw[16] != 1:
        raise ValueError(f"{path}: only row-major grids are defined")
    off = 24
    res = np.frombuffer(raw, "<u8", count=d, offset=off).astype(int)
    off += 8 * d
    bounds = np.frombuffer(raw, "<f8", count=2 * d, offset=off)
    off += 16 * d
    n_values = int(np.prod(res))
    values = np.frombuffer(raw, "<f8", count=n_values, offset=off).reshape(tuple(res))
    box = tuple((bounds[2 * a], bounds[2 * a + 1]) for a in range(d))
    return GridFunction(box=box, values=values.copy())
