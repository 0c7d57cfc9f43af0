"""Componentwise orders on objective space.

``leq`` is the order induced by the nonnegative orthant and ``lt`` the
strict order induced by its interior.  Both reject NaN outright: a NaN
objective value is a bug upstream, never an "incomparable" result.
"""

from __future__ import annotations

import numpy as np

from .errors import EvaluationError, OrderDimensionError

#: Default slack used by the solver when testing level-set membership.
FEAS_TOL = 1e-12


def as_objective(values) -> np.ndarray:
    """Return ``values`` as a finite 1-D float array (an objective vector)."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise OrderDimensionError(f"objective vector must be 1-D and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"objective vector has non-finite entries: {arr!r}")
    return arr


def _pair(a, b):
    a = as_objective(a)
    b = as_objective(b)
    if a.shape != b.shape:
        raise OrderDimensionError(f"cannot compare vectors of length {a.size} and {b.size}")
    return a, b


def leq(a, b) -> bool:
    """``a ⪯ b``: every component of ``a`` is at most the matching one of ``b``."""
    a, b = _pair(a, b)
    return bool(np.all(a <= b))


def lt(a, b) -> bool:
    """``a ≺ b``: every component of ``a`` is strictly below that of ``b``."""
    a, b = _pair(a, b)
    return bool(np.all(a < b))


def dominates(a, b) -> bool:
    """Pareto dominance: ``a ⪯ b`` with at least one strict component."""
    a, b = _pair(a, b)
    return bool(np.all(a <= b) and np.any(a < b))


def in_level_set(problem, x, x_ref, feas_tol: float = FEAS_TOL) -> bool:
    """Test ``F(x) ⪯ F(x_ref) + feas_tol`` componentwise."""
    if feas_tol < 0:
        raise ValueError("feas_tol must be nonnegative")
    fx = problem.evaluate(x)
    fref = problem.evaluate(x_ref)
    return leq(fx, fref + feas_tol)


def nondominated_mask(values) -> np.ndarray:
    """Boolean mask of the rows of ``values`` not dominated by any other row."""
    pts = np.asarray(values, dtype=float)
    mask = np.ones(len(pts), dtype=bool)
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            if i != j and np.all(q <= p) and np.any(q < p):
                mask[i] = False
                break
    return mask
