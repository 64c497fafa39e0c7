"""Small value types and helpers for points in the closed unit cube.

Everything downstream works on float64 arrays of shape (n, 3); the named
tuples here are the scalar-friendly faces of the same data for tests and
file IO.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OutOfDomainError


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class DataSite(NamedTuple):
    """A sample location together with the function value carried there."""

    position: Point3
    value: float


@dataclass(frozen=True)
class UnitCube:
    """Axis-aligned closed box; the default is Omega = [0, 1]^3."""

    lo: Point3 = Point3(0.0, 0.0, 0.0)
    hi: Point3 = Point3(1.0, 1.0, 1.0)


UNIT_CUBE = UnitCube()


def squared_distance(a, b):
    """Squared Euclidean distance between two point-like triples."""
    return (
        (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    )


def contains(cube, p):
    """True when p lies in the closed box (boundary included)."""
    return all(cube.lo[i] <= p[i] <= cube.hi[i] for i in range(3))


def as_point_array(points):
    """Coerce point-like input (lists, tuples, arrays) to a (k, 3) float64 array."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return pts.reshape(0, 3)
    if pts.ndim == 1:
        if pts.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {pts.shape}")
        pts = pts.reshape(1, 3)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array of points, got shape {pts.shape}")
    return pts


def ensure_in_unit_cube(pts, what="point"):
    """Validate that every row of pts is finite and inside [0, 1]^3.

    Raises OutOfDomainError naming the first offending row; returns pts
    unchanged so calls can be chained.
    """
    ok = np.isfinite(pts).all(axis=1) & (pts >= 0.0).all(axis=1) & (pts <= 1.0).all(axis=1)
    if not ok.all():
        i = int(np.argmin(ok))
        raise OutOfDomainError(
            f"{what} {i} = {tuple(pts[i])} is outside the closed unit cube"
        )
    return pts
