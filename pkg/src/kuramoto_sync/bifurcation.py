"""Saddle-node and pitchfork events read off the geometry of chi.

Folds sit at interior extrema of |chi_sigma|.  Branch points sit at xi = 1,
where the four sequences that differ only in their outermost pair produce
the same phase vector.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibria import (
    ZERO_CHI,
    ChiCurve,
    SignSequence,
    build_equilibrium,
    chi_derivatives_at_one,
    chi_paired,
    enumerate_sequences,
)
from .model import ModelConfig, km_jacobian
from .stability import spectra

SADDLE_NODE = "saddle-node"
PITCHFORK = "pitchfork"
SUPER = "supercritical"
SUB = "subcritical"
INDETERMINATE = "indeterminate"
MAX_DEGENERACY = 4
DERIV_ZERO = 1e-10


@dataclass
class BifurcationEvent:
    kind: str
    K_star: float
    xi_star: float
    criticality: str
    participants: list
    degeneracy_order: int = 1
    chi_value: float = float("nan")
    a: float = 1.0

    @property
    def ratio(self) -> float:
        return self.K_star / self.a


def detect_saddle_nodes(sigma: SignSequence, cfg: ModelConfig | None = None, curve: ChiCurve | None = None) -> list:
    """One fold per local extremum of |chi| on (0, 1); a local max is supercritical."""
    a = 1.0 if cfg is None else cfg.a
    curve = curve or ChiCurve(sigma)
    out = []
    for e in curve.extrema:
        out.append(
            BifurcationEvent(
                kind=SADDLE_NODE,
                K_star=a / abs(e.value),
                xi_star=e.xi,
                criticality=SUPER if e.abs_kind == "max" else SUB,
                participants=[sigma],
                chi_value=e.value,
                a=a,
            )
        )
    return out


def quadruples(n0: int) -> list:
    """Group sign sequences into quadruples that share indices 2..2 n0 - 1.

    Each entry maps ``"++", "+-", "-+", "--"`` (signs of the first and last
    index) to its sequence.  Ordered by the shared middle, lexicographically.
    """
    out = {}
    for sigma in enumerate_sequences(n0):
        v = sigma.values
        key = "".join("+" if s == 1 else "-" for s in (v[0], v[-1]))
        out.setdefault(v[1:-1], {})[key] = sigma
    return [out[k] for k in sorted(out)]


def pitchfork_criticality(sigma_pm: SignSequence, chi1: float, max_degeneracy: int = MAX_DEGENERACY):
    """Sign of chi(1) times the first non-vanishing derivative at 1.

    Returns ``(criticality, order)``; ``order`` is the derivative order used
    (1 in the generic case).  Gives up after ``max_degeneracy + 1``.
    """
    d = chi_derivatives_at_one(sigma_pm, max_degeneracy + 1)
    scale = max(1.0, float(np.max(np.abs(d))))
    for order in range(1, max_degeneracy + 2):
        if abs(d[order]) > DERIV_ZERO * scale:
            return (SUPER if chi1 * d[order] > 0 else SUB), order
    return INDETERMINATE, max_degeneracy + 1


def detect_pitchforks(quad: dict, cfg: ModelConfig | None = None):
    """Branch point of a quadruple at xi = 1, or None if chi(1) vanishes."""
    if set(quad) != {"++", "+-", "-+", "--"}:
        raise ValueError("quadruple must contain the keys '++', '+-', '-+', '--'")
    middles = {q.values[1:-1] for q in quad.values()}
    if len(middles) != 1:
        raise ValueError("quadruple members must agree away from the first and last index")
    a = 1.0 if cfg is None else cfg.a
    chi1 = chi_paired(quad["+-"], 1.0)
    if abs(chi1) < ZERO_CHI:
        return None
    crit, order = pitchfork_criticality(quad["+-"], chi1)
    return BifurcationEvent(
        kind=PITCHFORK,
        K_star=a / abs(chi1),
        xi_star=1.0,
        criticality=crit,
        participants=[quad["++"], quad["+-"], quad["-+"], quad["--"]],
        degeneracy_order=order,
        chi_value=chi1,
        a=a,
    )


def events_for(n0: int, a: float = 1.0, sequences=None) -> list:
    """All folds and branch points, ordered by coupling then kind."""
    cfg = ModelConfig(2 * n0 + 1, a=a)
    seqs = enumerate_sequences(n0) if sequences is None else sequences
    wanted = {s.values for s in seqs}
    out = []
    for sigma in seqs:
        out.extend(detect_saddle_nodes(sigma, cfg))
    for quad in quadruples(n0):
        if not any(q.values in wanted for q in quad.values()):
            continue
        ev = detect_pitchforks(quad, cfg)
        if ev is not None:
            out.append(ev)
    out.sort(key=lambda e: (round(e.K_star, 12), e.kind, e.participants[0].index))
    return out


# ----------------------------------------------------------------------------
# exhaustive counting

@dataclass
class EventCounts:
    n0: int
    families_distinct: int
    families_coarse: int
    saddle_nodes: int
    saddle_super: int
    saddle_sub: int
    pitchforks: int
    pitchfork_super: int
    pitchfork_sub: int
    pitchfork_indeterminate: int
    bounds: dict = field(default_factory=dict)


def pitchfork_lower_bound(n0: int) -> int:
    # 2^(2 n0 - 3) + 2^(n0 - 2) n0, written over a common denominator
    return (4**n0 + 2 ** (n0 + 1) * n0) // 8


def _is_prime(k: int) -> bool:
    return k >= 2 and all(k % d for d in range(2, int(k**0.5) + 1))


def _sigma_summary(values):
    sigma = SignSequence(values)
    curve = ChiCurve(sigma)
    kinds = [e.abs_kind for e in curve.extrema]
    exists = bool(kinds) or abs(curve.value_at_one) > ZERO_CHI or len(curve.zeros) > 0
    return exists, kinds.count("max"), kinds.count("min")


def count_events(n0: int, workers: int | None = None) -> EventCounts:
    """Exhaustive event and family counts over every sign sequence."""
    seqs = enumerate_sequences(n0)
    vals = [s.values for s in seqs]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_sigma_summary, vals, chunksize=64))
    else:
        summaries = [_sigma_summary(v) for v in vals]
    distinct = sum(1 for s in summaries if s[0])
    sn_super = sum(s[1] for s in summaries)
    sn_sub = sum(s[2] for s in summaries)
    pf = [detect_pitchforks(q) for q in quadruples(n0)]
    pf = [e for e in pf if e is not None]
    by_crit = {c: sum(1 for e in pf if e.criticality == c) for c in (SUPER, SUB, INDETERMINATE)}
    bounds = {
        "families_distinct": 4**n0,
        "families_coarse": 3 * 4 ** (n0 - 1),
        "saddle_nodes_min": 4 ** (n0 - 1),
        "pitchforks_min": pitchfork_lower_bound(n0),
    }
    if _is_prime(n0):
        bounds["pitchforks_min_prime"] = 4 ** (n0 - 1)
    return EventCounts(
        n0=n0,
        families_distinct=distinct,
        # through each branch point the ++ family continues into the -- family
        families_coarse=distinct - len(pf),
        saddle_nodes=sn_super + sn_sub,
        saddle_super=sn_super,
        saddle_sub=sn_sub,
        pitchforks=len(pf),
        pitchfork_super=by_crit[SUPER],
        pitchfork_sub=by_crit[SUB],
        pitchfork_indeterminate=by_crit[INDETERMINATE],
        bounds=bounds,
    )


# ----------------------------------------------------------------------------
# branch diagrams

@dataclass
class DiagramPoint:
    sigma: SignSequence
    K: float
    root: int
    xi: float
    c_hat: float
    v: np.ndarray
    verdict: str


def branch_diagram(n0: int, K_range: tuple, samples: int, a: float = 1.0, sequences=None) -> list:
    """Equilibria and spectral verdicts on a uniform grid of couplings.

    Rows are ordered by (sequence index, K, root index).
    """
    K_lo, K_hi = float(K_range[0]), float(K_range[1])
    if not (0 < K_lo <= K_hi):
        raise ValueError(f"K range must be positive and ordered, got {K_range}")
    if int(samples) < 2:
        raise ValueError("samples must be at least 2")
    Ks = np.linspace(K_lo, K_hi, int(samples))
    n = 2 * n0 + 1
    seqs = enumerate_sequences(n0) if sequences is None else sequences
    points = []
    for sigma in seqs:
        curve = ChiCurve(sigma)
        for K in Ks:
            cfg = ModelConfig(n, a=a, K=K)
            for r, xi in enumerate(curve.roots(cfg.beta)):
                eq = build_equilibrium(sigma, xi, cfg)
                points.append(DiagramPoint(sigma, float(K), r, xi, eq.c_hat, eq.v, ""))
    if points:
        jac = np.stack([km_jacobian(p.v, ModelConfig(n, a=a, K=p.K)) for p in points])
        verdicts = spectra(jac)[4]
        for p, verdict in zip(points, verdicts):
            p.verdict = str(verdict)
    return points
