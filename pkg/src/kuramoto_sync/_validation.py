"""Small argument checks shared across modules."""

from __future__ import annotations

import numpy as np


class ConsistencyError(ValueError):
    """Raised when (sigma, xi) data does not satisfy a/K = |chi(xi)|."""


class NumericalFailure(RuntimeError):
    """Raised when an integration or solve produces non-finite values."""


def check_odd_n(n) -> int:
    n_int = int(n)
    if n_int != n or n_int < 3 or n_int % 2 == 0:
        raise ValueError(f"node count must be an odd integer >= 3, got {n!r}")
    return n_int


def check_positive(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_nonnegative(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be a non-negative finite number, got {value!r}")
    return value


def check_vector(name: str, x, size: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (size,):
        raise ValueError(f"{name} must have trailing dimension {size}, got shape {arr.shape}")
    return arr


def check_symmetric(A, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    asym = float(np.max(np.abs(A - np.swapaxes(A, -1, -2)))) if A.size else 0.0
    if asym > tol * scale:
        raise ValueError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
    return A
