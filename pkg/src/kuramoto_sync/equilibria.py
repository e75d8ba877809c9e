"""Sign-sequence equilibria and the scalar consistency function chi.

Every synchronized equilibrium of the evenly spaced model is labelled by a
sign sequence ``sigma`` in {-1, +1}^(2 n0) and a scale ``xi`` in (0, 1]
solving ``a/K = |chi_sigma(xi)|`` where::

    chi_sigma(xi) = (xi/n0) * (1 + sum_i sigma_i sqrt(1 - (k_i xi/n0)^2))

and ``k_i`` are the integer frequency offsets of :func:`model.reduced_offsets`.
Only indices whose sign agrees with their mirror partner survive the sum
(opposite pairs cancel), which gives the cheaper and better conditioned
"paired" form used for derivatives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from ._validation import ConsistencyError
from .model import ModelConfig, reduced_offsets, reduced_vector_field, wrap_angle

MAX_N0 = 12
GRID_POINTS = 4096
ZERO_CHI = 1e-10
SAME_STATE_TOL = 1e-9


def _parse_sign_char(ch: str, pos: int) -> int:
    if ch == "+":
        return 1
    if ch in "-−":
        return -1
    raise ValueError(f"invalid character {ch!r} at position {pos} of sign string (use '+' or '-')")


@dataclass(frozen=True)
class SignSequence:
    """A choice of arcsin branch for each of the ``2*n0`` non-reference oscillators."""

    values: tuple

    def __post_init__(self):
        vals = tuple(int(s) for s in self.values)
        if not vals or len(vals) % 2:
            raise ValueError(f"sign sequence needs an even, positive length, got {len(vals)}")
        if any(s not in (-1, 1) for s in vals):
            raise ValueError(f"sign sequence entries must be -1 or +1, got {vals}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_string(cls, text: str) -> "SignSequence":
        return cls(tuple(_parse_sign_char(ch, i + 1) for i, ch in enumerate(text)))

    @classmethod
    def all_ones(cls, n0: int) -> "SignSequence":
        return cls((1,) * (2 * n0))

    @property
    def n0(self) -> int:
        return len(self.values) // 2

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.values if s == 1)

    @property
    def n_minus(self) -> int:
        return len(self.values) - self.n_plus

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    @property
    def is_all_ones(self) -> bool:
        return self.n_minus == 0

    @property
    def label(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.values)

    @property
    def index(self) -> int:
        """Position in the lexicographic enumeration (-1 before +1)."""
        idx = 0
        for s in self.values:
            idx = 2 * idx + (s == 1)
        return idx

    @property
    def paired(self) -> tuple:
        """``(m, sign)`` for every mirror pair with equal signs.

        ``m = n0 + 1 - i`` is the common offset magnitude of the pair
        ``(i, 2 n0 - i + 1)`` (1-based).  This tuple fixes chi completely.
        """
        n0 = self.n0
        out = []
        for i in range(n0):
            s, t = self.values[i], self.values[2 * n0 - 1 - i]
            if s == t:
                out.append((n0 - i, s))
        return tuple(sorted(out))

    def flip_pair(self, i: int) -> "SignSequence":
        """Swap the signs of the 1-based mirror pair ``(i, 2 n0 - i + 1)``."""
        vals = list(self.values)
        j = 2 * self.n0 - i
        vals[i - 1], vals[j] = vals[j], vals[i - 1]
        return SignSequence(tuple(vals))

    def __str__(self):
        return self.label


def enumerate_sequences(n0: int) -> list:
    """All ``2**(2 n0)`` sign sequences in lexicographic order."""
    if int(n0) != n0 or not 1 <= n0 <= MAX_N0:
        raise ValueError(f"n0 must be an integer in [1, {MAX_N0}] for exhaustive enumeration, got {n0}")
    return [SignSequence(v) for v in itertools.product((-1, 1), repeat=2 * int(n0))]


# ----------------------------------------------------------------------------
# chi and its derivatives

def _check_xi(xi, lo_open=False, hi_open=False):
    x = np.asarray(xi, dtype=float)
    bad = (x < 0.0) | (x > 1.0) | ~np.isfinite(x)
    if lo_open:
        bad |= x <= 0.0
    if hi_open:
        bad |= x >= 1.0
    if np.any(bad):
        lo = "(" if lo_open else "["
        hi = ")" if hi_open else "]"
        raise ValueError(f"xi must lie in {lo}0, 1{hi}, got {xi!r}")
    return x


def _one_minus_sq(s):
    # (1 - s)(1 + s) keeps precision as s -> 1
    return np.clip((1.0 - s) * (1.0 + s), 0.0, None)


def chi_eval(sigma: SignSequence, xi):
    """chi_sigma(xi) from the full sum over all ``2 n0`` indices."""
    x = _check_xi(xi)
    n0 = sigma.n0
    k = reduced_offsets(n0)
    s = np.multiply.outer(x, np.abs(k)) / n0
    out = (x / n0) * (1.0 + (sigma.array * np.sqrt(_one_minus_sq(s))).sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def _paired_arrays(sigma: SignSequence):
    pairs = sigma.paired
    if not pairs:
        return np.zeros(0), np.zeros(0)
    m, sg = zip(*pairs)
    return np.array(m, dtype=float) / sigma.n0, np.array(sg, dtype=float)


def chi_paired(sigma: SignSequence, xi):
    """chi_sigma(xi) from the reduced sum over equal-sign mirror pairs."""
    x = _check_xi(xi)
    r, sg = _paired_arrays(sigma)
    s = np.multiply.outer(x, r)
    out = (x / sigma.n0) * (1.0 + 2.0 * (sg * np.sqrt(_one_minus_sq(s))).sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def chi_derivative(sigma: SignSequence, xi):
    """d chi_sigma / d xi; returns +-inf at xi = 1 when index 1 is paired."""
    x = _check_xi(xi)
    r, sg = _paired_arrays(sigma)
    s = np.multiply.outer(x, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = sg * (1.0 - 2.0 * s * s) / np.sqrt(_one_minus_sq(s))
    out = (1.0 + 2.0 * terms.sum(axis=-1)) / sigma.n0
    return float(out) if out.ndim == 0 else out


def h_sigma(sigma: SignSequence, xi):
    """Auxiliary function with d chi/d xi = chi/xi - h xi^2 on (0, 1)."""
    x = _check_xi(xi, lo_open=True, hi_open=True)
    r, sg = _paired_arrays(sigma)
    s = np.multiply.outer(x, r)
    out = (2.0 / sigma.n0) * (sg * r * r / np.sqrt(_one_minus_sq(s))).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def chi_taylor_at_one(sigma: SignSequence, order: int) -> np.ndarray:
    """Taylor coefficients of ``chi_sigma(1 + t)`` up to ``t**order``.

    Only defined when the outermost pair is not paired (otherwise chi has a
    square-root singularity at 1).  Each ``sqrt(1 - r^2 (1+t)^2)`` is
    expanded with the power-series square-root recurrence.
    """
    r, sg = _paired_arrays(sigma)
    if np.any(r >= 1.0):
        raise ValueError("chi is not smooth at xi = 1 when the outermost mirror pair has equal signs")
    inner = np.zeros(order + 1)
    inner[0] = 1.0
    for rk, sk in zip(r, sg):
        q = np.zeros(order + 1)
        q[0] = 1.0 - rk * rk
        if order >= 1:
            q[1] = -2.0 * rk * rk
        if order >= 2:
            q[2] = -rk * rk
        g = np.zeros(order + 1)
        g[0] = math.sqrt(q[0])
        for j in range(1, order + 1):
            g[j] = (q[j] - np.dot(g[1:j], g[j - 1 : 0 : -1])) / (2.0 * g[0])
        inner += 2.0 * sk * g
    # multiply by (1 + t)/n0
    coef = inner.copy()
    coef[1:] += inner[:-1]
    return coef / sigma.n0


def chi_derivatives_at_one(sigma: SignSequence, max_order: int) -> np.ndarray:
    """``[chi(1), chi'(1), ..., chi^(max_order)(1)]`` for a smooth-at-one sigma."""
    coef = chi_taylor_at_one(sigma, max_order)
    return coef * np.array([math.factorial(k) for k in range(max_order + 1)], dtype=float)


# ----------------------------------------------------------------------------
# extrema, zeros, roots

@dataclass(frozen=True)
class Extremum:
    xi: float
    value: float
    kind: str  # "max" or "min" of chi (not |chi|)

    @property
    def abs_kind(self) -> str:
        """Kind of extremum of |chi|."""
        if self.value >= 0:
            return self.kind
        return "min" if self.kind == "max" else "max"


def _grid():
    return np.linspace(0.0, 1.0, GRID_POINTS + 2)[1:-1]


def _sign_change_roots(f, xs, fx, end_value, tol, b_end):
    roots = []
    for i in range(len(xs) - 1):
        if fx[i] == 0.0:
            roots.append(float(xs[i]))
        elif fx[i] * fx[i + 1] < 0.0:
            roots.append(brentq(f, xs[i], xs[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    if fx[-1] == 0.0:
        roots.append(float(xs[-1]))
    elif fx[-1] * end_value < 0.0:
        roots.append(brentq(f, xs[-1], b_end, xtol=tol, rtol=4 * np.finfo(float).eps))
    return roots


def chi_extrema(sigma: SignSequence, tol: float = 1e-12) -> list:
    """Local extrema of chi on the open interval (0, 1).

    Dense sampling of the derivative followed by Brent refinement.  Candidates
    where |chi| < 1e-10 are zero crossings, not extrema, and are dropped.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    xs = _grid()
    d = chi_derivative(sigma, xs)
    b_end = 1.0 - 1e-14
    d_end = chi_derivative(sigma, b_end)
    f = lambda x: chi_derivative(sigma, x)
    out = []
    for x in _sign_change_roots(f, xs, d, d_end, tol, b_end):
        if not 0.0 < x < 1.0:
            continue
        val = chi_paired(sigma, x)
        if abs(val) < ZERO_CHI:
            continue
        left = chi_derivative(sigma, max(x - 1e-7, 1e-15))
        out.append(Extremum(float(x), float(val), "max" if left > 0 else "min"))
    return out


def chi_zeros(sigma: SignSequence, tol: float = 1e-12) -> list:
    """Zero crossings of chi on the open interval (0, 1)."""
    xs = _grid()
    # chi/xi has the same zeros on (0, 1] and no trivial zero at 0
    g = lambda x: chi_paired(sigma, x) / x
    gx = chi_paired(sigma, xs) / xs
    roots = _sign_change_roots(g, xs, gx, g(1.0), tol, 1.0)
    return [float(x) for x in roots if 0.0 < x < 1.0]


def solve_xi(sigma: SignSequence, beta: float, tol: float = 1e-12, extrema=None, zeros=None) -> list:
    """All roots of ``|chi_sigma(xi)| = beta`` on (0, 1], ascending."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if extrema is None:
        extrema = chi_extrema(sigma)
    if zeros is None:
        zeros = chi_zeros(sigma)
    cuts = sorted({0.0, 1.0, *(e.xi for e in extrema), *zeros})
    f = lambda x: abs(chi_paired(sigma, x)) - beta
    roots = []
    for p, q in zip(cuts[:-1], cuts[1:]):
        fp, fq = f(p), f(q)
        if fq == 0.0:
            roots.append(q)
        elif fp == 0.0:
            roots.append(p)
        elif fp * fq < 0.0:
            roots.append(brentq(f, p, q, xtol=tol, rtol=4 * np.finfo(float).eps))
    roots = sorted(r for r in roots if r > 0.0)
    out = []
    for r in roots:
        if not out or r - out[-1] > 10 * tol:
            out.append(float(r))
    return out


@dataclass
class ChiCurve:
    """chi for one sign sequence with cached extrema and zeros."""

    sigma: SignSequence
    tol: float = 1e-12

    def value(self, xi):
        return chi_paired(self.sigma, xi)

    def derivative(self, xi):
        return chi_derivative(self.sigma, xi)

    def h(self, xi):
        return h_sigma(self.sigma, xi)

    @cached_property
    def extrema(self) -> list:
        return chi_extrema(self.sigma, self.tol)

    @cached_property
    def zeros(self) -> list:
        return chi_zeros(self.sigma, self.tol)

    @cached_property
    def value_at_one(self) -> float:
        return chi_paired(self.sigma, 1.0)

    def roots(self, beta: float) -> list:
        return solve_xi(self.sigma, beta, self.tol, self.extrema, self.zeros)

    def thresholds(self) -> list:
        """Values of K/a at which the number of roots changes."""
        vals = [1.0 / abs(e.value) for e in self.extrema]
        if abs(self.value_at_one) > ZERO_CHI:
            vals.append(1.0 / abs(self.value_at_one))
        return sorted(vals)


# ----------------------------------------------------------------------------
# equilibria

@dataclass
class Equilibrium:
    sigma: SignSequence
    xi: float
    chi_sign: int
    v: np.ndarray
    c_hat: float
    K: float
    multiplicity: int = 1
    aliases: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.v) + 1


def equilibrium_phases(sigma: SignSequence, xi: float, chi_sign: int) -> np.ndarray:
    """Reduced phase vector for a given branch choice and scale."""
    n0 = sigma.n0
    k = reduced_offsets(n0)
    phi = chi_sign * np.arcsin(np.clip(k * xi / n0, -1.0, 1.0))
    flipped = np.where(phi > 0, np.pi - phi, -phi - np.pi)
    return wrap_angle(np.where(sigma.array > 0, phi, flipped))


def build_equilibrium(sigma: SignSequence, xi: float, cfg: ModelConfig, rtol: float = 1e-8) -> Equilibrium:
    """Materialize the equilibrium for ``(sigma, xi)`` at the coupling in ``cfg``."""
    if sigma.n0 != cfg.n0:
        raise ValueError(f"sign sequence length {2 * sigma.n0} does not match n - 1 = {cfg.n - 1}")
    xi = float(_check_xi(xi, lo_open=True))
    chi = chi_paired(sigma, xi)
    if abs(abs(chi) - cfg.beta) > rtol * max(1.0, cfg.beta):
        raise ConsistencyError(
            f"|chi({xi:.15g})| = {abs(chi):.15g} does not match a/K = {cfg.beta:.15g} for sigma {sigma.label}"
        )
    sign = 1 if chi > 0 else -1
    v = equilibrium_phases(sigma, xi, sign)
    c_hat = sign * cfg.n0 * cfg.a / (cfg.n * cfg.K * xi)
    return Equilibrium(sigma=sigma, xi=xi, chi_sign=sign, v=v, c_hat=c_hat, K=cfg.K)


def equilibria_for(sigma: SignSequence, cfg: ModelConfig, curve: ChiCurve | None = None) -> list:
    curve = curve or ChiCurve(sigma)
    return [build_equilibrium(sigma, xi, cfg) for xi in curve.roots(cfg.beta)]


def residual(eq: Equilibrium, cfg: ModelConfig) -> float:
    return float(np.max(np.abs(reduced_vector_field(eq.v, cfg))))


def _same_state(v, w, tol=SAME_STATE_TOL) -> bool:
    return bool(np.max(np.abs(wrap_angle(np.asarray(v) - np.asarray(w)))) < tol)


def group_identical(eqs: list, tol: float = SAME_STATE_TOL) -> list:
    """Merge equilibria whose phase vectors agree within ``tol``.

    The first representative (in input order) is kept; its ``multiplicity``
    counts the merged entries and ``aliases`` lists their sign sequences.
    """
    out = []
    for eq in eqs:
        for rep in out:
            if _same_state(rep.v, eq.v, tol):
                rep.multiplicity += 1
                rep.aliases.append(eq.sigma)
                break
        else:
            out.append(
                Equilibrium(eq.sigma, eq.xi, eq.chi_sign, eq.v.copy(), eq.c_hat, eq.K, 1, [eq.sigma])
            )
    return out


def all_equilibria(cfg: ModelConfig, sequences=None) -> list:
    """Every sign-sequence equilibrium at ``cfg`` (not merged)."""
    seqs = enumerate_sequences(cfg.n0) if sequences is None else sequences
    out = []
    for sigma in seqs:
        out.extend(equilibria_for(sigma, cfg))
    return out


def dedup_chi_classes(n0: int) -> dict:
    """Partition the sign sequences by the paired data that determines chi."""
    classes: dict = {}
    for sigma in enumerate_sequences(n0):
        classes.setdefault(sigma.paired, []).append(sigma)
    return classes


def c_hat_curve(sigma: SignSequence, n: int, xi) -> tuple:
    """Parametric ``(K/a, C_hat)`` curve traced by ``xi``.

    Points where chi vanishes have no finite coupling and are returned as NaN.
    """
    x = _check_xi(xi, lo_open=True)
    chi = np.atleast_1d(chi_paired(sigma, x))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(chi) > ZERO_CHI, 1.0 / np.abs(chi), np.nan)
        c_hat = np.where(np.abs(chi) > ZERO_CHI, sigma.n0 * chi / (n * np.atleast_1d(x)), np.nan)
    return ratio, c_hat


def all_ones_constants(n0: int) -> dict:
    """Fold and branch-point constants of the all-ones family.

    ``xi0``: location of the maximum of chi; ``kappa0``: K/a at the fold;
    ``C_D0``: order-parameter constant at the fold; ``C_D1`` and ``kappa1``:
    the same at xi = 1.
    """
    sigma = SignSequence.all_ones(n0)
    n = 2 * n0 + 1
    (ext,) = chi_extrema(sigma)
    chi1 = chi_paired(sigma, 1.0)
    return {
        "xi0": ext.xi,
        "kappa0": 1.0 / ext.value,
        "C_D0": n0 * ext.value / (n * ext.xi),
        "C_D1": n0 * chi1 / n,
        "kappa1": 1.0 / chi1,
    }


def all_ones_C_D(n: int, ratio: float) -> list:
    """Constants C_D of the all-ones family at K/a = ``ratio`` (one per root)."""
    cfg = ModelConfig.from_ratio(n, ratio)
    sigma = SignSequence.all_ones(cfg.n0)
    return [cfg.n0 * cfg.a / (cfg.n * cfg.K * xi) for xi in solve_xi(sigma, cfg.beta)]
