"""Brute-force equilibrium search by multistart damped Newton on the reduced field.

This is deliberately independent of the sign-sequence construction and is
used to check that the enumeration misses nothing.
"""

from __future__ import annotations

import itertools

import numpy as np

from .model import ModelConfig, reduced_jacobian, reduced_vector_field, wrap_angle


def torus_grid(dim: int, per_axis: int, offset: float = 0.1) -> np.ndarray:
    axis = np.linspace(-np.pi, np.pi, per_axis, endpoint=False) + offset
    return np.array(list(itertools.product(axis, repeat=dim)))


def damped_newton(V, cfg: ModelConfig, max_iter: int = 100, tol: float = 1e-11, halvings: int = 12):
    """Run damped Newton from every row of ``V``; returns ``(V, converged)``."""
    V = np.array(V, dtype=float)
    F = reduced_vector_field(V, cfg)
    res = np.max(np.abs(F), axis=-1)
    for _ in range(max_iter):
        active = res >= tol
        if not np.any(active):
            break
        Va, Fa = V[active], F[active]
        step = -np.einsum("bij,bj->bi", np.linalg.pinv(reduced_jacobian(Va, cfg)), Fa)
        lam = np.ones(len(Va))
        ra = res[active]
        best_V, best_r = Va.copy(), ra.copy()
        todo = np.ones(len(Va), dtype=bool)
        for _ in range(halvings):
            trial = Va[todo] + lam[todo, None] * step[todo]
            rt = np.max(np.abs(reduced_vector_field(trial, cfg)), axis=-1)
            ok = rt < ra[todo]
            idx = np.flatnonzero(todo)
            best_V[idx[ok]] = trial[ok]
            best_r[idx[ok]] = rt[ok]
            todo[idx[ok]] = False
            lam[todo] *= 0.5
            if not np.any(todo):
                break
        # entries that never improved take a small full step to escape plateaus
        stuck = np.flatnonzero(todo)
        best_V[stuck] = Va[stuck] + lam[stuck, None] * step[stuck]
        V[active] = wrap_angle(best_V)
        F = reduced_vector_field(V, cfg)
        res = np.max(np.abs(F), axis=-1)
    return V, res < tol


def unique_states(V, tol: float = 1e-8) -> np.ndarray:
    out = []
    for v in V:
        if not any(np.max(np.abs(wrap_angle(v - w))) < tol for w in out):
            out.append(v)
    return np.array(out)


def multistart_equilibria(cfg: ModelConfig, per_axis: int = 8, **kw) -> np.ndarray:
    """Distinct zeros of the reduced field reached from a uniform grid of starts."""
    V, ok = damped_newton(torus_grid(cfg.n - 1, per_axis), cfg, **kw)
    return unique_states(V[ok])
