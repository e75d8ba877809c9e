"""Finite Kuramoto model with evenly spaced natural frequencies.

The oscillators are indexed ``0 .. n-1`` (``n = 2*n0 + 1``) and the middle
one, index ``n0``, serves as the phase reference of the reduced system.  The
reduced state ``v`` has ``2*n0`` components, ``v[i] = u[i] - u[n0]`` for
``i < n0`` and ``v[i] = u[i+1] - u[n0]`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_odd_n, check_positive, check_vector

TWO_PI = 2.0 * np.pi


def wrap_angle(x):
    """Map angles to the half-open interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)


@dataclass(frozen=True)
class ModelConfig:
    """Node count ``n``, frequency slope ``a`` and coupling ``K``.

    ``a = 0`` (identical oscillators) is allowed for simulation; everything
    that divides by ``a/K`` requires ``a > 0``.
    """

    n: int
    a: float = 1.0
    K: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "n", check_odd_n(self.n))
        object.__setattr__(self, "a", check_nonnegative("a", self.a))
        object.__setattr__(self, "K", check_positive("K", self.K))

    @classmethod
    def from_ratio(cls, n: int, ratio: float, a: float = 1.0) -> "ModelConfig":
        """Build a config from the coupling ratio ``K/a``."""
        a = check_positive("a", a)
        return cls(n=n, a=a, K=check_positive("K/a", ratio) * a)

    @property
    def n0(self) -> int:
        return (self.n - 1) // 2

    @property
    def nu(self) -> float:
        return self.a / self.n

    @property
    def beta(self) -> float:
        """Dimensionless control ratio a/K."""
        return self.a / self.K

    @property
    def ratio(self) -> float:
        return self.K / self.a

    def with_K(self, K: float) -> "ModelConfig":
        return ModelConfig(self.n, self.a, K)


@dataclass(frozen=True)
class FrequencyProfile:
    omegas: np.ndarray
    Omega_D: float


def frequency_profile(cfg: ModelConfig) -> FrequencyProfile:
    """Natural frequencies ``a(2i - n - 1)/(2n)`` for ``i = 1..n``."""
    i = np.arange(1, cfg.n + 1)
    omegas = cfg.a * (2 * i - cfg.n - 1) / (2.0 * cfg.n)
    return FrequencyProfile(omegas=omegas, Omega_D=float(np.mean(omegas)))


def reduced_offsets(n0: int) -> np.ndarray:
    """Integer offsets of the non-reference oscillators from the middle one.

    Entry ``i`` is ``-n0..-1`` for the left half and ``1..n0`` for the right
    half; it multiplies ``nu`` in the reduced field and ``xi/n0`` inside the
    arcsin of the equilibrium formula.
    """
    left = np.arange(-n0, 0)
    return np.concatenate([left, -left[::-1]])


def reduce_state(u, n: int | None = None) -> np.ndarray:
    """Phase differences relative to the middle oscillator (unwrapped)."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1] if n is None else n
    check_odd_n(n)
    check_vector("u", u, n)
    n0 = (n - 1) // 2
    ref = u[..., n0 : n0 + 1]
    return np.concatenate([u[..., :n0], u[..., n0 + 1 :]], axis=-1) - ref


def lift_state(v, theta: float = 0.0) -> np.ndarray:
    """Full phase vector with the middle oscillator at ``theta``."""
    v = np.asarray(v, dtype=float)
    m = v.shape[-1]
    if m % 2 or m < 2:
        raise ValueError(f"reduced state must have an even, positive length, got {m}")
    n0 = m // 2
    mid = np.zeros(v.shape[:-1] + (1,))
    return np.concatenate([v[..., :n0], mid, v[..., n0:]], axis=-1) + theta


def km_vector_field(u, cfg: ModelConfig, freq: FrequencyProfile | None = None) -> np.ndarray:
    """Right-hand side ``omega_i + (K/n) sum_j sin(u_j - u_i)``.

    Accepts a single state of length ``n`` or a stack ``(..., n)``.  Uses the
    mean-field identity so the cost is O(n) per state.
    """
    u = check_vector("u", u, cfg.n)
    if freq is None:
        freq = frequency_profile(cfg)
    s, c = np.sin(u), np.cos(u)
    S = s.sum(axis=-1, keepdims=True)
    C = c.sum(axis=-1, keepdims=True)
    return freq.omegas + (cfg.K / cfg.n) * (c * S - s * C)


def reduced_vector_field(v, cfg: ModelConfig) -> np.ndarray:
    """Right-hand side of the reduced system for the ``2*n0`` phase differences.

    Evaluated term by term::

        dv_i/dt = k_i nu - (K/n) (2 sin v_i + sum_{j != i} (sin v_j - sin(v_j - v_i)))

    with ``k_i`` the frequency offset from :func:`reduced_offsets`.
    """
    v = check_vector("v", v, cfg.n - 1)
    k = reduced_offsets(cfg.n0)
    sv = np.sin(v)
    pair = np.sin(v[..., None, :] - v[..., :, None])  # [..., i, j] = sin(v_j - v_i)
    off = sv[..., None, :] - pair
    idx = np.arange(v.shape[-1])
    off[..., idx, idx] = 0.0
    return k * cfg.nu - (cfg.K / cfg.n) * (2.0 * sv + off.sum(axis=-1))


def km_jacobian(v, cfg: ModelConfig) -> np.ndarray:
    """Jacobian of the full field at the lift of ``v`` (``n x n``, symmetric).

    Row/column ``n0`` is the reference oscillator.  Off-diagonal entries are
    ``(K/n) cos(u_j - u_i)``; the diagonal makes every row sum vanish.
    """
    v = check_vector("v", v, cfg.n - 1)
    u = lift_state(v)
    M = (cfg.K / cfg.n) * np.cos(u[..., None, :] - u[..., :, None])
    upper = np.triu(M, 1)
    A = upper + np.swapaxes(upper, -1, -2)
    idx = np.arange(cfg.n)
    A[..., idx, idx] = -A.sum(axis=-1)
    return A


def reduced_jacobian(v, cfg: ModelConfig) -> np.ndarray:
    """Jacobian of :func:`reduced_vector_field` (``2*n0 x 2*n0``)."""
    A = km_jacobian(v, cfg)
    n0 = cfg.n0
    keep = np.r_[0:n0, n0 + 1 : cfg.n]
    # d(u_k - u_ref)/dt projected onto the directions that move u_k alone
    rows = A[..., keep, :] - A[..., n0 : n0 + 1, :]
    return rows[..., :, keep]
