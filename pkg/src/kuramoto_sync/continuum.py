"""Stationary profiles of the continuum-limit model and their discretizations.

With the linear frequency function ``a (x - 1/2)`` on [0, 1], a stationary
profile has the form ``U(x) = arcsin(a (x - 1/2) / (K C))`` away from a flip
set, and the reflected branch (``pi - U`` on the right half, ``-U - pi`` on
the left half) on it.  Writing ``eta = a / (2 K |C|)`` the self-consistency
condition for ``C`` becomes the scalar equation ``|Phi(eta)| = a/K`` with::

    Phi(eta) = int_{-eta}^{eta} s(y) sqrt(1 - y^2) dy

where ``s = -1`` on the (rescaled) flip set and ``+1`` elsewhere.  Both the
integrand and the arcsin profile have elementary antiderivatives, so all
integrals here are evaluated in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .equilibria import SignSequence
from .model import ModelConfig, wrap_angle

MAX_INTERVALS = 64
THRESHOLD_SLACK = 1e-11
CONTINUOUS = "continuous-stable"
MIRROR = "continuous-mirror"
DISCONTINUOUS = "discontinuous"


def phi(eta):
    """``arcsin(eta) + eta sqrt(1 - eta^2)``, increasing from 0 to pi/2 on [0, 1]."""
    e = np.asarray(eta, dtype=float)
    return np.arcsin(e) + e * np.sqrt(np.clip(1.0 - e * e, 0.0, None))


def _G(y):
    # antiderivative of sqrt(1 - y^2)
    return 0.5 * phi(y)


def _arcsin_antiderivative(t):
    t = np.asarray(t, dtype=float)
    return t * np.arcsin(t) + np.sqrt(np.clip(1.0 - t * t, 0.0, None))


# ----------------------------------------------------------------------------
# flip sets

@dataclass(frozen=True)
class FlipSet:
    """Sorted disjoint closed intervals, each inside [0, 1/2] or [1/2, 1]."""

    intervals: tuple = ()

    def __post_init__(self):
        parts = []
        for lo, hi in self.intervals:
            lo, hi = float(lo), float(hi)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"flip interval [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1")
            if lo < 0.5 < hi:
                parts += [(lo, 0.5), (0.5, hi)]
            else:
                parts.append((lo, hi))
        parts.sort()
        for (a0, b0), (a1, b1) in zip(parts[:-1], parts[1:]):
            if a1 < b0:
                raise ValueError(f"flip intervals [{a0}, {b0}] and [{a1}, {b1}] overlap")
        if len(parts) > MAX_INTERVALS:
            raise ValueError(f"at most {MAX_INTERVALS} flip intervals are supported, got {len(parts)}")
        object.__setattr__(self, "intervals", tuple(parts))

    @classmethod
    def full(cls) -> "FlipSet":
        return cls(((0.0, 0.5), (0.5, 1.0)))

    @property
    def proper(self) -> tuple:
        """Intervals with non-empty interior (the only ones that matter)."""
        return tuple((lo, hi) for lo, hi in self.intervals if hi > lo)

    @property
    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def is_full(self) -> bool:
        return abs(self.measure - 1.0) < 1e-15

    def indicator(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.proper:
            out |= (x >= lo) & (x <= hi)
        return out

    def signed_integral(self, eta):
        """``Phi(eta)``: the flip-signed integral of sqrt(1 - y^2) over [-eta, eta]."""
        e = np.asarray(eta, dtype=float)
        total = phi(e)
        for lo, hi in self.proper:
            total = total - 2.0 * (_G(2 * e * (hi - 0.5)) - _G(2 * e * (lo - 0.5)))
        return total


# ----------------------------------------------------------------------------
# solutions

@dataclass
class ContinuumSolution:
    """Stationary profile data.

    ``C`` carries a sign: a negative value means the unflipped part of the
    profile is ``arcsin`` reflected through the origin.  ``eta`` is
    ``a/(2 K |C|)`` and never exceeds 1.
    """

    kind: str
    C: float
    eta: float
    a: float
    K: float
    flip_set: FlipSet = field(default_factory=FlipSet)
    note: str = ""

    @property
    def beta(self) -> float:
        return self.a / self.K

    def _arg(self, x):
        return np.clip(self.a * (np.asarray(x, dtype=float) - 0.5) / (self.K * self.C), -1.0, 1.0)

    def profile_lifted(self, x) -> np.ndarray:
        """Profile on the real line with the flip branch taken literally."""
        x = np.asarray(x, dtype=float)
        U = np.arcsin(self._arg(x))
        flipped = np.where(U > 0, np.pi - U, -U - np.pi)
        return np.where(self.flip_set.indicator(x), flipped, U)

    def profile(self, x) -> np.ndarray:
        return wrap_angle(self.profile_lifted(x))

    def consistency_residual(self) -> float:
        """``|C - int s(x) sqrt(1 - arg(x)^2) dx|`` evaluated in closed form."""
        return abs(self.C - float(self.flip_set.signed_integral(self.eta)) / (2.0 * self.eta))


def solve_eta(beta: float) -> float | None:
    """Unique ``eta`` in (0, 1] with ``phi(eta) = beta``, or None above pi/2."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    top = np.pi / 2
    if beta > top * (1.0 + THRESHOLD_SLACK):
        return None
    if beta >= top:
        return 1.0
    return brentq(lambda e: phi(e) - beta, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def solve_C_continuous(beta: float) -> float | None:
    """Order-parameter constant of the continuous family, or None if it does not exist."""
    eta = solve_eta(beta)
    return None if eta is None else beta / (2.0 * eta)


def continuous_solution(a: float, K: float) -> ContinuumSolution | None:
    beta = a / K
    eta = solve_eta(beta)
    if eta is None:
        return None
    return ContinuumSolution(CONTINUOUS, beta / (2.0 * eta), eta, a, K)


def discontinuous_roots(flip_set: FlipSet, beta: float, grid: int = 4096) -> list:
    """All ``eta`` in (0, 1] with ``|Phi(eta)| = beta``, ascending."""
    es = np.linspace(0.0, 1.0, grid + 1)[1:]
    f = lambda e: abs(float(flip_set.signed_integral(e))) - beta
    fx = np.abs(flip_set.signed_integral(es)) - beta
    roots = []
    prev_e, prev_f = 0.0, -beta
    for e, fe in zip(es, fx):
        if fe == 0.0:
            roots.append(float(e))
        elif prev_f * fe < 0.0 and prev_f != 0.0:
            roots.append(brentq(f, prev_e, e, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        prev_e, prev_f = e, fe
    return roots


def _kind(flip_set: FlipSet) -> tuple:
    if flip_set.measure == 0.0:
        note = "flip set has measure zero; treated as the continuous family" if flip_set.intervals else ""
        return CONTINUOUS, note
    if flip_set.is_full:
        return MIRROR, ""
    return DISCONTINUOUS, ""


def build_discontinuous(flip_set, beta: float, a: float = 1.0, root: int = 0) -> ContinuumSolution | None:
    """Stationary profile with the given flip set at ``a/K = beta``.

    ``root`` selects among multiple solutions by increasing ``eta`` (root 0
    has the largest ``|C|``).  Returns None if there is no solution.
    """
    if not isinstance(flip_set, FlipSet):
        flip_set = FlipSet(tuple(flip_set))
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    kind, note = _kind(flip_set)
    if not flip_set.proper:
        eta = solve_eta(beta)
        roots = [] if eta is None else [eta]
    else:
        roots = discontinuous_roots(flip_set, beta)
    if root >= len(roots):
        return None
    eta = roots[root]
    sign = 1.0 if flip_set.signed_integral(eta) > 0 else -1.0
    K = a / beta
    return ContinuumSolution(kind, sign * beta / (2.0 * eta), float(eta), a, K, flip_set, note)


# ----------------------------------------------------------------------------
# discretization and distances

@dataclass
class StepFunctionState:
    """Piecewise-constant angles on the uniform partition of [0, 1]."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    def norm(self) -> float:
        return float(np.sqrt(np.mean(np.asarray(self.values) ** 2)))


def _piece_mean(sol: ContinuumSolution, lo: float, hi: float, flipped: bool) -> tuple:
    """Mean of the lifted profile on [lo, hi] and its end values."""
    s = sol.a / (sol.K * sol.C)
    t1, t2 = s * (lo - 0.5), s * (hi - 0.5)
    if hi > lo:
        mean_u = (_arcsin_antiderivative(t2) - _arcsin_antiderivative(t1)) / (t2 - t1)
    else:
        mean_u = float(np.arcsin(t1))
    ends = np.arcsin(np.clip([t1, t2], -1, 1))
    if not flipped:
        return float(mean_u), ends
    # pieces never straddle 1/2, so U has one sign on the piece
    mid = np.arcsin(np.clip(s * (0.5 * (lo + hi) - 0.5), -1, 1))
    if mid > 0 or (mid == 0 and hi > 0.5):
        return float(np.pi - mean_u), np.pi - ends
    return float(-mean_u - np.pi), -ends - np.pi


def discretize(sol: ContinuumSolution, n: int) -> StepFunctionState:
    """Cell averages ``n * int_{I_i} u(x) dx`` on ``n`` uniform cells.

    Each cell is split at 1/2 and at flip boundaries.  Neighbouring pieces
    are joined continuously modulo 2 pi before averaging, so a flipped run
    crossing 1/2 (where the branch wraps from -pi to pi) is not torn apart.
    """
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be a positive odd integer, got {n}")
    cuts = sorted({0.5, *(x for iv in sol.flip_set.proper for x in iv)})
    out = np.empty(n)
    for i in range(n):
        lo, hi = i / n, (i + 1) / n
        pts = [lo] + [c for c in cuts if lo < c < hi] + [hi]
        total, prev_end = 0.0, None
        for p, q in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (p + q)
            flipped = bool(sol.flip_set.indicator(mid))
            m, ends = _piece_mean(sol, p, q, flipped)
            if prev_end is not None:
                k = np.round((prev_end - ends[0]) / (2 * np.pi))
                m += 2 * np.pi * k
                ends = ends + 2 * np.pi * k
            total += (q - p) * m
            prev_end = ends[1]
        out[i] = total * n
    return StepFunctionState(wrap_angle(out))


def sample_profile(sol: ContinuumSolution, n: int) -> StepFunctionState:
    """Profile values at the cell midpoints (a cheaper alternative to averaging)."""
    x = (np.arange(n) + 0.5) / n
    return StepFunctionState(sol.profile(x))


def _dist(dx, theta):
    return float(np.sqrt(np.mean(wrap_angle(dx - theta) ** 2)))


def family_distance(x, y, coarse: int = 64) -> float:
    """``min_theta`` of the L2 norm of the wrapped difference ``x - y - theta``."""
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    if xv.shape != yv.shape:
        raise ValueError(f"states must have equal size, got {xv.shape} and {yv.shape}")
    dx = wrap_angle(xv - yv)
    seed = float(np.angle(np.mean(np.exp(1j * dx)))) if np.any(dx) else 0.0
    thetas = np.concatenate([[seed], np.linspace(-np.pi, np.pi, coarse, endpoint=False)])
    vals = [_dist(dx, t) for t in thetas]
    best = thetas[int(np.argmin(vals))]
    h = 2 * np.pi / coarse
    res = minimize_scalar(lambda t: _dist(dx, t), bounds=(best - h, best + h), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, min(vals)))


def family_distance_to_states(states, ref) -> np.ndarray:
    """Family distance of each row of ``states`` to ``ref`` (vectorized seed + refine)."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    return np.array([family_distance(s, ref) for s in states])


# ----------------------------------------------------------------------------
# discrete <-> continuum

def sigma_flip_set(sigma: SignSequence) -> FlipSet:
    """Flip set whose cells reproduce the -1 entries of ``sigma``.

    Entry ``i`` (1-based) belongs to oscillator ``i`` for ``i <= n0`` and to
    ``i + 1`` beyond, whose cell is ``[(j-1)/n, j/n]``.  Runs touching the
    reference cell are extended to 1/2, so the all-minus sequence gives the
    full flip.
    """
    n0 = sigma.n0
    n = 2 * n0 + 1
    osc = [i if i <= n0 else i + 1 for i in range(1, 2 * n0 + 1)]
    intervals = []
    run = None
    for j, s in zip(osc, sigma.values):
        if s == -1:
            if run is not None and j == run[1] + 1:
                run[1] = j
            else:
                if run is not None:
                    intervals.append(run)
                run = [j, j]
        elif run is not None:
            intervals.append(run)
            run = None
    if run is not None:
        intervals.append(run)
    out = []
    for j1, j2 in intervals:
        lo, hi = (j1 - 1) / n, j2 / n
        if j2 == n0:
            hi = 0.5
        if j1 == n0 + 2:
            lo = 0.5
        out.append((lo, hi))
    return FlipSet(tuple(out))


def match_discrete_to_continuum(sigma: SignSequence, cfg: ModelConfig, root: int = 0) -> ContinuumSolution | None:
    """Continuum profile whose flip pattern matches ``sigma`` at the coupling of ``cfg``."""
    if sigma.n0 != cfg.n0:
        raise ValueError("sign sequence does not match the node count")
    return build_discontinuous(sigma_flip_set(sigma), cfg.beta, a=cfg.a, root=root)
