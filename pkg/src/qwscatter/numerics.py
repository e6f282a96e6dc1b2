"""Dense complex linear algebra for small matrices (dimension <= 64).

Thin contract layer over LAPACK (via numpy/scipy): explicit shape and
finiteness validation, an elimination-pivot singularity threshold, and
eigenvalue routines with a residual-level accuracy guarantee.  All
functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

MAX_EIG_DIM = 64
PIVOT_TOL = 1e-13


class SingularMatrixError(ArithmeticError):
    """Linear solve refused: an elimination pivot fell below tolerance."""

    def __init__(self, pivot: float):
        self.pivot = pivot
        super().__init__(
            f"matrix is singular to working precision "
            f"(pivot magnitude {pivot:.3e} <= {PIVOT_TOL:.0e})"
        )


class EigenvalueError(ArithmeticError):
    """Eigenvalue iteration did not converge."""


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def mat_mul(a, b) -> np.ndarray:
    """Matrix product A @ B in double precision."""
    a = as_cmatrix(a, "A")
    b = as_cmatrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def mat_power(a, k: int) -> np.ndarray:
    """A**k by repeated squaring.  A**0 is the identity, also for A = 0."""
    a = as_cmatrix(a, "A")
    _require_square(a, "A")
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    return np.linalg.matrix_power(a, k)


def solve(a, b) -> np.ndarray:
    """Solve A X = B by LU with partial pivoting.

    Refuses when any pivot magnitude falls at or below 1e-13, reporting the
    offending pivot; this distinguishes genuine singularity from
    conditioning noise for the resolvent systems this kernel serves.
    """
    a = as_cmatrix(a, "A")
    b = as_cmatrix(b, "B")
    _require_square(a, "A")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    with warnings.catch_warnings():
        # scipy warns on exactly-zero pivots; the explicit check below governs
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diagonal(lu))
    if pivots.size and float(pivots.min()) <= PIVOT_TOL:
        raise SingularMatrixError(float(pivots.min()))
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues with multiplicity, via Hessenberg + shifted QR (LAPACK).

    Backward stability of the reduction gives the contract-level residual
    bound ||(A - lambda I) v|| <= 1e-8 ||A|| for unit eigenvectors v.
    """
    a = as_cmatrix(a, "A")
    _require_square(a, "A")
    if a.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds limit {MAX_EIG_DIM}")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(str(exc)) from exc


def spectral_radius_of(a) -> float:
    """max |lambda| over the spectrum of A (0.0 for empty matrices)."""
    w = eigenvalues(a)
    return float(np.abs(w).max()) if w.size else 0.0
