"""Spectral stability of the synchronized equilibria.

The Jacobian of the full model is symmetric, so its spectrum is real and
computed with LAPACK's symmetric solver.  An equilibrium is counted as
asymptotically stable *as a family* when the only non-negative eigenvalue
is the simple zero coming from the global phase shift.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_symmetric
from .equilibria import (
    Equilibrium,
    SignSequence,
    all_ones_constants,
    chi_paired,
    equilibrium_phases,
    h_sigma,
)
from .model import ModelConfig, km_jacobian

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"
MARGINAL_BAND = 1e-6

__all__ = [
    "StabilityReport",
    "spectrum",
    "spectra",
    "equilibrium_report",
    "LimitMatrixSpec",
    "limit_matrix",
    "limit_matrix_spec",
    "limit_matrix_check",
    "predicted_verdict",
    "n3_closed_form_stability",
    "h_sigma",
]


@dataclass
class StabilityReport:
    eigenvalues: np.ndarray
    l_plus: int
    l_zero: int
    l_minus: int
    verdict: str
    zero_tol: float
    eigenvectors: np.ndarray | None = field(default=None, repr=False)


def _verdict(l_plus, l_zero):
    if l_plus >= 1:
        return UNSTABLE
    if l_zero >= 2:
        return MARGINAL
    return STABLE


def default_zero_tol(eigenvalues) -> float:
    rho = float(np.max(np.abs(eigenvalues))) if np.size(eigenvalues) else 0.0
    return 1e-8 * max(1.0, rho)


def spectrum(A, zero_tol: float | None = None, vectors: bool = False) -> StabilityReport:
    """Sorted real spectrum of a symmetric matrix with signed counts."""
    A = check_symmetric(A)
    if A.ndim != 2:
        raise ValueError("spectrum() expects a single matrix; use spectra() for stacks")
    if vectors:
        w, V = np.linalg.eigh(A)
    else:
        w, V = np.linalg.eigvalsh(A), None
    tol = default_zero_tol(w) if zero_tol is None else float(zero_tol)
    l_zero = int(np.sum(np.abs(w) < tol))
    l_plus = int(np.sum(w >= tol))
    l_minus = int(np.sum(w <= -tol))
    return StabilityReport(w, l_plus, l_zero, l_minus, _verdict(l_plus, l_zero), tol, V)


def spectra(As, zero_tol: float | None = None):
    """Vectorized counts for a stack of symmetric matrices.

    Returns ``(eigenvalues, l_plus, l_zero, l_minus, verdicts)`` with the
    leading dimensions of ``As``.
    """
    As = check_symmetric(As)
    w = np.linalg.eigvalsh(As)
    if zero_tol is None:
        tol = 1e-8 * np.maximum(1.0, np.max(np.abs(w), axis=-1, keepdims=True))
    else:
        tol = zero_tol
    l_zero = np.sum(np.abs(w) < tol, axis=-1)
    l_plus = np.sum(w >= tol, axis=-1)
    l_minus = np.sum(w <= -tol, axis=-1)
    verdicts = np.where(l_plus >= 1, UNSTABLE, np.where(l_zero >= 2, MARGINAL, STABLE))
    return w, l_plus, l_zero, l_minus, verdicts


def equilibrium_report(eq: Equilibrium, cfg: ModelConfig, vectors: bool = False) -> StabilityReport:
    return spectrum(km_jacobian(eq.v, cfg), vectors=vectors)


# ----------------------------------------------------------------------------
# small-xi limit matrix

@dataclass(frozen=True)
class LimitMatrixSpec:
    n_plus: int
    n_minus: int

    @property
    def n0(self) -> int:
        return (self.n_plus + self.n_minus) // 2

    @property
    def n(self) -> int:
        return self.n_plus + self.n_minus + 1

    @property
    def n_hat(self) -> int:
        return self.n0 - self.n_plus

    @property
    def predicted(self) -> dict:
        """Eigenvalue -> multiplicity."""
        n, nh = self.n, self.n_hat
        if self.n_minus == 0:
            return {0: 1, -n: n - 1}
        pred = Counter({0: 1, n: 1})
        pred[2 * nh - 1] += self.n_plus
        pred[1 - 2 * nh] += self.n_minus - 1
        return {k: v for k, v in sorted(pred.items()) if v}

    @property
    def predicted_positive(self) -> int:
        return min(self.n_minus, self.n_plus + 1)


def limit_matrix_spec(sigma: SignSequence) -> LimitMatrixSpec:
    return LimitMatrixSpec(sigma.n_plus, sigma.n_minus)


def limit_matrix(n_plus: int, n_minus: int) -> np.ndarray:
    """Integer matrix the scaled Jacobian ``(n/K) A`` tends to as xi -> 0.

    Oscillators are ordered with the ``n_plus + 1`` in-phase ones (including
    the reference) first.  Entries are +1 within a group, -1 across groups,
    and the diagonal makes rows sum to zero.
    """
    if n_plus < 0 or n_minus < 0 or (n_plus + n_minus) % 2:
        raise ValueError("n_plus + n_minus must be a non-negative even number")
    p = n_plus + 1
    g = np.r_[np.ones(p), -np.ones(n_minus)]
    A0 = np.outer(g, g)
    np.fill_diagonal(A0, 0.0)
    np.fill_diagonal(A0, -A0.sum(axis=1))
    return A0


@dataclass
class LimitCheck:
    spec: LimitMatrixSpec
    computed: dict
    matches: bool
    small_xi_counts: tuple
    limit_counts: tuple
    counts_match: bool


def _multiset(w, digits=8):
    rounded = np.round(w).astype(int)
    if np.max(np.abs(w - rounded)) > 10.0 ** (-digits):
        return None
    return dict(sorted(Counter(rounded.tolist()).items()))


def limit_matrix_check(sigma: SignSequence, cfg: ModelConfig | None = None, xi: float = 1e-3) -> LimitCheck:
    """Compare the limit matrix spectrum with the predicted integer spectrum,
    and the true Jacobian at small ``xi`` with the limit sign counts."""
    spec = limit_matrix_spec(sigma)
    cfg = cfg or ModelConfig(2 * sigma.n0 + 1)
    A0 = limit_matrix(spec.n_plus, spec.n_minus)
    w0 = np.linalg.eigvalsh(A0)
    computed = _multiset(w0)
    rep0 = spectrum(A0)
    sign = 1 if chi_paired(sigma, xi) > 0 else -1
    rep = spectrum(km_jacobian(equilibrium_phases(sigma, xi, sign), cfg))
    c_small = (rep.l_plus, rep.l_zero)
    c_lim = (rep0.l_plus, rep0.l_zero)
    return LimitCheck(spec, computed, computed == spec.predicted, c_small, c_lim, c_small == c_lim)


# ----------------------------------------------------------------------------
# predictions and closed forms

def predicted_verdict(sigma: SignSequence, xi: float, xi0: float | None = None) -> str:
    """Predicted verdict: stable only on the all-ones branch below its fold."""
    if not sigma.is_all_ones:
        return UNSTABLE
    if xi0 is None:
        xi0 = all_ones_constants(sigma.n0)["xi0"]
    if abs(xi - xi0) < MARGINAL_BAND:
        return MARGINAL
    return STABLE if xi < xi0 else UNSTABLE


def n3_closed_form_quantities(v1, v2):
    c1, c2, c12 = np.cos(v1), np.cos(v2), np.cos(v2 - v1)
    q1 = -c1 - c2 - c12
    q2 = c1 * c2 + (c1 + c2) * c12
    return q1, q2


def n3_closed_form_stability(v1: float, v2: float, tol: float = 1e-12) -> str:
    """Verdict for a three-oscillator equilibrium from trace/determinant signs."""
    q1, q2 = n3_closed_form_quantities(v1, v2)
    if q1 > tol or q2 < -tol:
        return UNSTABLE
    if q1 < -tol and q2 > tol:
        return STABLE
    return MARGINAL
