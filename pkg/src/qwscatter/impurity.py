"""The impurity-block matrix: builder, entry powers, resolvent, spectrum.

E is the 2M x 2M principal compression of the walk onto the impurity
block, block tridiagonal with P above and Q below the diagonal in the
basis (0;L), (0;R), ..., (M-1;L), (M-1;R).  Its powers weight the paths
confined to the block; its spectral radius lies strictly inside the unit
disk whenever the coin transmits (a != 0), which is what makes every
closed-form series downstream converge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import numerics
from .walk import ImpurityModel

KERNEL_SVD_TOL = 1e-10
ZIGZAG_MARGIN = 1e-10


class ZigzagCoinError(ArithmeticError):
    """Spectral radius reached 1: the a = 0 purely reflective coin regime.

    Every step then reflects, the walk degenerates to a zigzag between
    neighbouring sites, and the resolvent series no longer converges; the
    closed forms are refused rather than silently diverging.
    """


@dataclass
class ImpurityMatrix:
    """E with its block length and the (site, chirality) index map."""

    M: int
    mat: np.ndarray = field(repr=False)

    def index(self, x: int, chirality: str) -> int:
        """Row/column of arc (x; J) in the computational basis."""
        if not 0 <= x < self.M:
            raise IndexError(f"site {x} outside block [0, {self.M - 1}]")
        if chirality == "L":
            return 2 * x
        if chirality == "R":
            return 2 * x + 1
        raise ValueError(f"chirality must be 'L' or 'R', got {chirality!r}")

    @cached_property
    def spectral_radius(self) -> float:
        return numerics.spectral_radius_of(self.mat)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return numerics.eigenvalues(self.mat)


@dataclass(frozen=True)
class KernelPair:
    """The two null vectors of E, supported on the block's end sites."""

    kappa_plus: np.ndarray
    kappa_minus: np.ndarray


def build_e(model: ImpurityModel) -> ImpurityMatrix:
    """Assemble E for the model; the 2x2 zero matrix when M = 1."""
    m = model.M
    p = model.coin.p
    q = model.coin.q
    mat = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for x in range(m):
        if x + 1 < m:
            mat[2 * x : 2 * x + 2, 2 * (x + 1) : 2 * (x + 1) + 2] = p
        if x - 1 >= 0:
            mat[2 * x : 2 * x + 2, 2 * (x - 1) : 2 * (x - 1) + 2] = q
    return ImpurityMatrix(m, mat)


def entry_power(
    e: ImpurityMatrix,
    k: int,
    source: tuple[int, str],
    target: tuple[int, str],
) -> complex:
    """Entry of E**k mapping arc ``source`` = (x'; J') to ``target`` = (x; J).

    This is the summed weight of all k-step paths confined to the block.
    """
    col = e.index(*source)
    row = e.index(*target)
    return complex(numerics.mat_power(e.mat, k)[row, col])


def require_contracting(e: ImpurityMatrix) -> None:
    """Raise ZigzagCoinError unless the spectrum is strictly contracting."""
    r = e.spectral_radius
    if r >= 1.0 - ZIGZAG_MARGIN:
        raise ZigzagCoinError(
            f"spectral radius {r:.12f} >= 1 - {ZIGZAG_MARGIN:.0e}: the coin "
            "reflects everything (a = 0 zigzag walk); scattering closed "
            "forms are undefined"
        )


def resolvent_g(e: ImpurityMatrix, xi: float) -> np.ndarray:
    """G(xi) = (I - (e^{-i xi} E)^2)^{-1}, the even-excursion generating matrix."""
    require_contracting(e)
    dim = 2 * e.M
    a = np.eye(dim, dtype=np.complex128) - np.exp(-2j * xi) * (e.mat @ e.mat)
    return numerics.solve(a, np.eye(dim, dtype=np.complex128))


def spectral_radius(e: ImpurityMatrix) -> float:
    """Largest eigenvalue modulus r of E (the kernel-tail decay rate)."""
    return e.spectral_radius


def kernel_vectors(e: ImpurityMatrix) -> KernelPair:
    """The two-dimensional kernel of E, one vector per block end.

    kappa_plus carries (conj a, conj b) on ((0;L), (0;R)) and kappa_minus
    carries (conj c, conj d) on ((M-1;L), (M-1;R)); the conjugates make
    E kappa = 0 exactly the row-orthogonality of the unitary coin, for
    every complex coin.  Requires M >= 2 (for M = 1 the kernel is all of
    C^2 since E = 0).
    """
    if e.M < 2:
        raise ValueError("kernel vectors are defined for M >= 2 (E = 0 when M = 1)")
    top_row = e.mat[0, 2:4]  # (a, b) from the P block feeding (0;L)
    coin_row = e.mat[3, 0:2]  # (c, d) from the Q block feeding (1;R)
    kp = np.zeros(2 * e.M, dtype=np.complex128)
    km = np.zeros(2 * e.M, dtype=np.complex128)
    kp[0] = np.conj(top_row[0])
    kp[1] = np.conj(top_row[1])
    km[2 * (e.M - 1)] = np.conj(coin_row[0])
    km[2 * (e.M - 1) + 1] = np.conj(coin_row[1])
    return KernelPair(kp, km)


def kernel_dimension(e: ImpurityMatrix, threshold: float = KERNEL_SVD_TOL) -> int:
    """Numeric kernel dimension: singular values below ``threshold``."""
    sv = np.linalg.svd(e.mat, compute_uv=False)
    return int(np.sum(sv < threshold))
