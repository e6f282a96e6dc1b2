"""Coin validation and exact time evolution of the impurity walk.

The lattice state is a finitely supported map from sites to C^2 amplitude
pairs, stored over a contiguous window.  Chirality order is (L, R) with
|L> = [1, 0]^T moving toward -inf and |R> = [0, 1]^T moving toward +inf.
One step of the walk is

    (U psi)(x) = P_{x+1} psi(x+1) + Q_{x-1} psi(x-1),

where P_y = |L><L| C_y and Q_y = |R><R| C_y, the coin C_y equals the
impurity coin on sites {0, ..., M-1} and the identity elsewhere.  The free
walk U0 (identity coin everywhere) is a pure translation of each chirality
channel, and is implemented exactly as such.

All evolution functions are pure: states are never mutated in place, so a
state may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITARITY_TOL = 1e-12

_CHANNELS = {"L": 0, "R": 1}


class CoinError(ValueError):
    """Coin matrix failed the unitarity check."""


def _channel(chirality: str) -> int:
    try:
        return _CHANNELS[chirality]
    except KeyError:
        raise ValueError(f"chirality must be 'L' or 'R', got {chirality!r}") from None


@dataclass(frozen=True)
class Coin:
    """A 2x2 unitary [[a, b], [c, d]]: a, d transmit and b, c reflect.

    Construct through :func:`validate_coin`, which enforces unitarity.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def delta(self) -> complex:
        """Determinant ad - bc (unit modulus for a unitary coin)."""
        return self.a * self.d - self.b * self.c

    @property
    def mat(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def p(self) -> np.ndarray:
        """Left-moving weight P = |L><L| C."""
        return np.array([[self.a, self.b], [0.0, 0.0]], dtype=np.complex128)

    @property
    def q(self) -> np.ndarray:
        """Right-moving weight Q = |R><R| C."""
        return np.array([[0.0, 0.0], [self.c, self.d]], dtype=np.complex128)


def validate_coin(a: complex, b: complex, c: complex, d: complex) -> Coin:
    """Build a Coin, refusing unless C†C = I entrywise to 1e-12.

    The error message lists every violated Gram entry.
    """
    m = np.array([[a, b], [c, d]], dtype=np.complex128)
    if not np.all(np.isfinite(m)):
        raise CoinError("coin entries must be finite complex numbers")
    gram = m.conj().T @ m
    err = np.abs(gram - np.eye(2))
    if err.max() > UNITARITY_TOL:
        bad = ", ".join(
            f"(C†C)[{i},{j}] off by {err[i, j]:.3e}"
            for i in range(2)
            for j in range(2)
            if err[i, j] > UNITARITY_TOL
        )
        raise CoinError(f"coin is not unitary: {bad}")
    return Coin(complex(a), complex(b), complex(c), complex(d))


def hadamard_coin() -> Coin:
    """The Hadamard coin (1/sqrt 2) [[1, 1], [1, -1]]."""
    s = 1.0 / np.sqrt(2.0)
    return validate_coin(s, s, s, -s)


def free_coin() -> Coin:
    """The identity coin; the walk is then the free walk everywhere."""
    return validate_coin(1.0, 0.0, 0.0, 1.0)


def random_coin(rng: np.random.Generator | None = None) -> Coin:
    """Haar-random 2x2 unitary coin (QR of a complex Ginibre sample)."""
    rng = rng or np.random.default_rng()
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * np.exp(-1j * np.angle(np.diag(r)))[None, :]
    return validate_coin(q[0, 0], q[0, 1], q[1, 0], q[1, 1])


@dataclass(frozen=True)
class ImpurityModel:
    """Impurity coin on the block {0, ..., M-1}, identity coin elsewhere."""

    coin: Coin
    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"block length M must be >= 1, got {self.M}")


@dataclass(frozen=True)
class WaveState:
    """Finitely supported C^2-valued state on a contiguous site window.

    ``amps[i]`` holds (psi_L, psi_R) at site ``x_min + i``; sites outside
    the window are implicitly zero.  Shape is (n, 2) for a single state;
    trailing axes are permitted and treated as independent batch columns.
    Treated as immutable: every operation returns a new instance.
    """

    x_min: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=np.complex128)
        if a.ndim < 2 or a.shape[1] != 2 or a.shape[0] < 1:
            raise ValueError(f"amps must have shape (n>=1, 2, ...), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amps", a)

    @property
    def x_max(self) -> int:
        return self.x_min + self.amps.shape[0] - 1

    @property
    def window(self) -> tuple[int, int]:
        return (self.x_min, self.x_max)

    def norm(self):
        """l2 norm over sites and chirality (per batch column, if batched)."""
        return np.sqrt(np.sum(np.abs(self.amps) ** 2, axis=(0, 1)))

    def amplitude(self, x: int, chirality: str):
        """Amplitude at site x in the given channel; zero outside the window."""
        ch = _channel(chirality)
        if self.x_min <= x <= self.x_max:
            return self.amps[x - self.x_min, ch]
        return np.zeros(self.amps.shape[2:], dtype=np.complex128) if self.amps.ndim > 2 else 0j

    def trim(self, threshold: float = 0.0) -> "WaveState":
        """Drop window margins whose per-site weight |psi|^2 is <= threshold.

        Off by default in all evolution routines; oracle runs keep the full
        causal window.
        """
        w = np.sum(np.abs(self.amps) ** 2, axis=tuple(range(1, self.amps.ndim)))
        keep = np.nonzero(w > threshold)[0]
        if keep.size == 0:
            return WaveState(self.x_min, self.amps[:1] * 0.0)
        lo, hi = int(keep[0]), int(keep[-1])
        return WaveState(self.x_min + lo, self.amps[lo : hi + 1].copy())


def delta_state(x: int, chirality: str) -> WaveState:
    """The unit state delta_x |J> concentrated on one site and channel."""
    amps = np.zeros((1, 2), dtype=np.complex128)
    amps[0, _channel(chirality)] = 1.0
    return WaveState(x, amps)


def max_abs_diff(s1: WaveState, s2: WaveState) -> float:
    """Largest entrywise |s1 - s2| over the union of the two windows."""
    lo = min(s1.x_min, s2.x_min)
    hi = max(s1.x_max, s2.x_max)
    shape = (hi - lo + 1,) + s1.amps.shape[1:]
    a = np.zeros(shape, dtype=np.complex128)
    b = np.zeros(shape, dtype=np.complex128)
    a[s1.x_min - lo : s1.x_min - lo + s1.amps.shape[0]] = s1.amps
    b[s2.x_min - lo : s2.x_min - lo + s2.amps.shape[0]] = s2.amps
    d = np.abs(a - b)
    return float(d.max()) if d.size else 0.0


def step_u(state: WaveState, model: ImpurityModel) -> WaveState:
    """One forward step of the impurity walk U.

    The window widens by one site on each side; the norm is preserved to
    rounding (U is unitary).
    """
    amps = state.amps
    n = amps.shape[0]
    new = np.zeros((n + 2,) + amps.shape[1:], dtype=np.complex128)
    # free translation: L is fed from the right neighbour, R from the left
    new[:n, 0] = amps[:, 0]
    new[2:, 1] = amps[:, 1]
    # impurity coin replaces the feed from block sites
    coin = model.coin
    for y in range(max(0, state.x_min), min(model.M - 1, state.x_max) + 1):
        i = y - state.x_min
        l_amp = amps[i, 0]
        r_amp = amps[i, 1]
        new[i, 0] = coin.a * l_amp + coin.b * r_amp  # lands on site y - 1
        new[i + 2, 1] = coin.c * l_amp + coin.d * r_amp  # lands on site y + 1
    return WaveState(state.x_min - 1, new)


def step_u_adj(state: WaveState, model: ImpurityModel) -> WaveState:
    """One step of U† (the inverse walk, by unitarity).

    (U† phi)(x) = C_x† [phi_L(x-1), phi_R(x+1)]^T; with the identity coin
    this reduces to the inverse free step.
    """
    amps = state.amps
    n = amps.shape[0]
    new = np.zeros((n + 2,) + amps.shape[1:], dtype=np.complex128)
    # gather pass: L from the left neighbour, R from the right
    new[2:, 0] = amps[:, 0]
    new[:n, 1] = amps[:, 1]
    coin = model.coin
    x_lo = state.x_min - 1
    for y in range(max(0, x_lo), min(model.M - 1, state.x_max + 1) + 1):
        i = y - x_lo
        gl = new[i, 0].copy()
        gr = new[i, 1].copy()
        new[i, 0] = np.conj(coin.a) * gl + np.conj(coin.c) * gr
        new[i, 1] = np.conj(coin.b) * gl + np.conj(coin.d) * gr
    return WaveState(x_lo, new)


def _shift_free(state: WaveState, n: int) -> WaveState:
    """U0**n for any integer n, applied as an exact per-channel translation."""
    if n == 0:
        return state
    k = abs(n)
    amps = state.amps
    m = amps.shape[0]
    new = np.zeros((m + 2 * k,) + amps.shape[1:], dtype=np.complex128)
    if n > 0:  # L moves left by k, R moves right by k
        new[:m, 0] = amps[:, 0]
        new[2 * k :, 1] = amps[:, 1]
    else:  # inverse free walk: L right, R left
        new[2 * k :, 0] = amps[:, 0]
        new[:m, 1] = amps[:, 1]
    return WaveState(state.x_min - k, new)


def step_u0(state: WaveState) -> WaveState:
    """One free step: psi_L(x) <- psi_L(x+1), psi_R(x) <- psi_R(x-1)."""
    return _shift_free(state, 1)


def step_u0_inv(state: WaveState) -> WaveState:
    """Inverse free step: psi_L(x) <- psi_L(x-1), psi_R(x) <- psi_R(x+1).

    Exact round trip: step_u0_inv(step_u0(s)) equals s bit for bit.
    """
    return _shift_free(state, -1)


def evolve(state: WaveState, model: ImpurityModel, n: int, generator: str = "U") -> WaveState:
    """Apply n steps of U or U0; negative n applies the inverse |n| times."""
    if generator == "U0":
        return _shift_free(state, n)
    if generator != "U":
        raise ValueError(f"generator must be 'U' or 'U0', got {generator!r}")
    step = step_u if n >= 0 else step_u_adj
    for _ in range(abs(n)):
        state = step(state, model)
    return state
