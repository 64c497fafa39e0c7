"""Uniform cube partition of [0, 1]^3 with fixed-radius neighbor queries.

The unit cube is split into q^3 cells of side 1/q.  Points are bucketed by
cell and stored as one permutation array ordered by (cell_w, cell_v, cell_u),
with begin/end offsets per cell, so a query inspects at most (2*i_star + 1)^3
cells and reads each (w, v)-run of cells as a single contiguous slice.

Choosing q = floor(1/radius) (never rounding up) keeps cube_side >= radius,
which is what makes the one-cell halo sufficient: every point within `radius`
of a query center lies in the center's cell or one of its 26 face/edge/corner
neighbors.  The rounded-up count is kept alongside for benchmark reporting.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGridWarning, RadiusTooLargeError
from .geometry import as_point_array, ensure_in_unit_cube


class CellId(NamedTuple):
    """1-based cell coordinates along x, y, z."""

    u: int
    v: int
    w: int


@dataclass(frozen=True)
class GridParams:
    cube_side: float
    q: int
    i_star: int = 1
    q_ceil: int | None = None  # rounded-up cell count, for table reporting only

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not self.cube_side > 0.0:
            raise ValueError(f"cube_side must be positive, got {self.cube_side}")
        if self.i_star < 1:
            raise ValueError(f"i_star must be >= 1, got {self.i_star}")


def grid_from_radius(radius):
    """Pick grid parameters so that a radius-`radius` query is answered by the
    (2*i_star + 1)^3 halo exactly.

    q = floor(1/radius), clamped to >= 1 and nudged down if floating-point
    rounding ever left 1/q below the radius.  A radius above 1 degenerates to
    a single cell (every query scans everything); that is legal but worth a
    warning.
    """
    radius = float(radius)
    if not (radius > 0.0 and math.isfinite(radius)):
        raise ValueError(f"radius must be positive and finite, got {radius}")
    inv = 1.0 / radius
    q = max(1, int(math.floor(inv + 1e-12)))
    while q > 1 and 1.0 / q < radius:
        q -= 1
    q_ceil = max(q, int(math.ceil(inv)))
    if radius > 1.0:
        warnings.warn(
            f"radius {radius} spans the whole unit cube; grid degenerates to one cell",
            DegenerateGridWarning,
            stacklevel=2,
        )
    return GridParams(cube_side=1.0 / q, q=q, i_star=1, q_ceil=q_ceil)


def _cells0(params, pts):
    """0-based integer cell coordinates for each row of pts (coordinate 1.0
    clamps into the last cell)."""
    scaled = np.floor(pts * params.q).astype(np.int64)
    return np.minimum(scaled, params.q - 1)


def cell_of(params, p):
    """The 1-based CellId containing a single point."""
    c = _cells0(params, as_point_array(p))[0]
    return CellId(int(c[0]) + 1, int(c[1]) + 1, int(c[2]) + 1)


def neighbor_cell_range(params, cell):
    """Inclusive (first, last) corners of the halo around `cell`, clamped to
    the grid."""
    q, i = params.q, params.i_star
    first = CellId(*(max(1, c - i) for c in cell))
    last = CellId(*(min(q, c + i) for c in cell))
    return first, last


@dataclass
class CubeIndex:
    """Cube-bucketed point set.  Treat all arrays as read-only after build."""

    params: GridParams
    points: np.ndarray        # (n, 3) float64
    permutation: np.ndarray   # (n,) original ids, grouped by cell in (w, v, u) order
    cell_offsets: np.ndarray  # (q^3 + 1,) begin/end positions per flattened cell

    def query(self, center, radius):
        return radius_query(self, center, radius)


def build(points, params):
    """Bucket `points` (validated to lie in the closed unit cube) by cell.

    The permutation is a stable sort on the flattened (w, v, u) cell rank, so
    ids inside a cell keep their original relative order and rebuilding from
    the same input reproduces the structure exactly.
    """
    pts = as_point_array(points)
    ensure_in_unit_cube(pts, "point")
    q = params.q
    cells = _cells0(params, pts)
    flat = (cells[:, 2] * q + cells[:, 1]) * q + cells[:, 0]
    perm = np.argsort(flat, kind="stable").astype(np.int64)
    counts = np.bincount(flat, minlength=q ** 3)
    offsets = np.zeros(q ** 3 + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return CubeIndex(params=params, points=pts, permutation=perm, cell_offsets=offsets)


def radius_query(index, center, radius):
    """Ids of all stored points within `radius` (inclusive) of `center`,
    ascending.

    Exactness requires the halo to reach the whole ball: either
    radius <= i_star * cube_side, or the clamped halo already spans every
    cell (the degenerate small-q case).  Anything else raises.
    """
    params = index.params
    if not (radius >= 0.0 and math.isfinite(radius)):
        raise ValueError(f"radius must be finite and >= 0, got {radius}")
    c = as_point_array(center)
    ensure_in_unit_cube(c, "query center")
    q = params.q
    c0 = _cells0(params, c)[0]
    lo = np.maximum(c0 - params.i_star, 0)
    hi = np.minimum(c0 + params.i_star, q - 1)
    if radius > params.i_star * params.cube_side:
        spans_all = (lo == 0).all() and (hi == q - 1).all()
        if not spans_all:
            raise RadiusTooLargeError(
                f"radius {radius} exceeds i_star * cube_side = "
                f"{params.i_star * params.cube_side}; halo would miss points"
            )

    offs = index.cell_offsets
    perm = index.permutation
    runs = []
    for w in range(lo[2], hi[2] + 1):
        for v in range(lo[1], hi[1] + 1):
            base = (w * q + v) * q
            runs.append(perm[offs[base + lo[0]]: offs[base + hi[0] + 1]])
    cand = np.concatenate(runs) if runs else np.empty(0, dtype=np.int64)
    if cand.size == 0:
        return cand
    diff = index.points[cand] - c[0]
    inside = (diff * diff).sum(axis=1) <= radius * radius
    out = cand[inside]
    out.sort()
    return out


def count_nonempty_cells(index):
    """How many cells hold at least one point."""
    return int((np.diff(index.cell_offsets) > 0).sum())


@dataclass
class BruteForceIndex:
    """Same query contract as CubeIndex, by scanning every stored point.

    Kept as the reference path for benchmarking the cube structure against,
    and as the plain-scan engine behind --no-cube.
    """

    points: np.ndarray

    def query(self, center, radius):
        if not (radius >= 0.0 and math.isfinite(radius)):
            raise ValueError(f"radius must be finite and >= 0, got {radius}")
        c = as_point_array(center)
        ensure_in_unit_cube(c, "query center")
        diff = self.points - c[0]
        inside = (diff * diff).sum(axis=1) <= radius * radius
        return np.flatnonzero(inside).astype(np.int64)


def brute_force_index(points):
    """Validate points and wrap them in a BruteForceIndex."""
    pts = as_point_array(points)
    ensure_in_unit_cube(pts, "point")
    return BruteForceIndex(points=pts)
