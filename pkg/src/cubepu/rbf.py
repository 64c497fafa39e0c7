"""Radial kernels and the dense local interpolation solves.

Three strictly positive definite radial families, each parametrized by a
single shape value a > 0 acting on r = ||x - y||_2:

    g   gaussian             exp(-(a r)^2)
    m4  matern, C^4 flavor   exp(-a r) ((a r)^2 + 3 a r + 3)        phi(0) = 3
    w4  wendland, C^4 flavor (1 - a r)_+^6 (35 (a r)^2 + 18 a r + 3) phi(0) = 3

The matern kernel is used unnormalized (phi(0) = 3 rather than 1); scaling a
kernel by a constant rescales the coefficients and leaves the interpolant
unchanged, so nothing downstream cares.  The wendland kernel has compact
support of radius 1/a.

Local systems solve phi(||x_i - x_k||) c = f with a Cholesky factorization
first (every family is positive definite, so symmetry is worth exploiting)
and a pivoted LU as the fallback when rounding has pushed a nearly singular
matrix off the cone.  One step of iterative refinement with the saved factor
tightens the residual at O(m^2) extra cost.  The condition estimate reuses
the factorization for a LAPACK 1-norm reciprocal-condition estimate: a cheap
diagnostic for flagging bad systems, not a guarantee.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import LinAlgWarning, cho_factor, cho_solve, lu_factor, lu_solve
from scipy.linalg.lapack import dgecon, dpocon
from scipy.spatial.distance import cdist

from .errors import SingularSystemError

KERNEL_FAMILIES = ("g", "m4", "w4")

# Factor-diagonal condition estimates at or above this count as ill-conditioned.
ILL_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class KernelSpec:
    family: str
    shape: float

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        if not self.shape > 0.0:
            raise ValueError(f"shape parameter must be positive, got {self.shape}")


def kernel_value(spec, r):
    """phi(r) for scalar or array r >= 0; shape of r is preserved."""
    r = np.asarray(r, dtype=np.float64)
    ar = spec.shape * r
    if spec.family == "g":
        out = np.exp(-(ar * ar))
    elif spec.family == "m4":
        out = np.exp(-ar) * (ar * ar + 3.0 * ar + 3.0)
    else:
        out = np.maximum(0.0, 1.0 - ar) ** 6 * (35.0 * ar * ar + 18.0 * ar + 3.0)
    return out if out.ndim else float(out)


def kernel_at_zero(spec):
    return kernel_value(spec, 0.0)


@dataclass(frozen=True)
class LocalSystem:
    """One subdomain's interpolation problem: m distinct sites with values."""

    points: np.ndarray  # (m, 3)
    values: np.ndarray  # (m,)
    kernel: KernelSpec

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ValueError(f"points must be (m, 3), got {self.points.shape}")
        if self.values.shape != (self.points.shape[0],):
            raise ValueError(
                f"values shape {self.values.shape} does not match {self.points.shape[0]} points"
            )
        if self.points.shape[0] < 1:
            raise ValueError("a local system needs at least one site")


@dataclass(frozen=True)
class LocalCoefficients:
    coefficients: np.ndarray
    condition_estimate: float


def assemble(system):
    """The m x m collocation matrix phi(||x_i - x_k||)."""
    return kernel_value(system.kernel, cdist(system.points, system.points))


def solve_local(system, subdomain_id=None):
    """Solve the collocation system, Cholesky first, pivoted LU on failure.

    Raises SingularSystemError when even the LU route yields a zero pivot or
    non-finite coefficients.  Ill-conditioned-but-solvable systems pass
    through; callers decide what to do with the condition estimate.
    """
    phi = assemble(system)
    m = phi.shape[0]
    f = system.values
    anorm = np.abs(phi).sum(axis=0).max()
    try:
        fac = cho_factor(phi, lower=False, check_finite=False)
        rcond, _ = dpocon(fac[0], anorm)  # uplo defaults to the upper factor
        solve = lambda rhs: cho_solve(fac, rhs, check_finite=False)
    except LinAlgError:
        with warnings.catch_warnings():
            # a zero pivot becomes our typed error below; the warning is noise
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(phi, check_finite=False)
        if np.abs(np.diag(lu)).min() == 0.0:
            raise SingularSystemError(subdomain_id, m) from None
        rcond, _ = dgecon(lu, anorm)  # 1-norm
        solve = lambda rhs: lu_solve((lu, piv), rhs, check_finite=False)
    cond = float(1.0 / rcond) if rcond > 0.0 else float("inf")
    coeffs = solve(f)
    coeffs = coeffs + solve(f - phi @ coeffs)  # one refinement step
    if not np.isfinite(coeffs).all():
        raise SingularSystemError(subdomain_id, m)
    return LocalCoefficients(coefficients=coeffs, condition_estimate=cond)


def evaluate_local_many(system, local, pts):
    """The local interpolant at each row of pts: phi-distances times coefficients.

    The row-wise reduction (not a BLAS matvec) keeps each row's result
    independent of how many other rows share the batch, so scalar and batch
    evaluation agree bit for bit.
    """
    k = kernel_value(system.kernel, cdist(pts, system.points))
    return (k * local.coefficients).sum(axis=1)


def evaluate_local(system, local, p):
    """The local interpolant at a single point."""
    return float(evaluate_local_many(system, local, np.asarray(p, dtype=np.float64).reshape(1, 3))[0])
