"""Certificates of (approximate) Pareto-Clarke criticality.

A point is critical when no direction decreases every objective to first
order.  For smooth problems this holds exactly when 0 lies in the convex
hull of the gradients, so the min-norm element of that hull is the
residual.  Otherwise directions are sampled and every component's Clarke
directional derivative is estimated from below; a sampled test can refute
criticality but only supports it statistically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MethodMismatchError
from .minnorm import min_norm_element
from .problem import Problem, as_point, clarke_dir_deriv_estimate

SMOOTH_TOL = 1e-5
SAMPLED_TOL = 1e-3
PROBE_STEPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class CriticalityReport:
    residual: float
    method: str  # "smooth-qp" or "sampled-directions"
    critical: bool
    n_directions: int
    witness_direction: tuple[float, ...] | None = None
    tolerance: float = 0.0


def smooth_criticality_residual(problem: Problem, x, qp_iters: int = 200,
                                crit_tol: float = SMOOTH_TOL, qp_method: str = "auto") -> CriticalityReport:
    """Norm of the min-norm convex combination of the gradients at ``x``.

    When the residual exceeds ``crit_tol`` the negated combination is a
    common descent direction and is returned as the witness.
    """
    if not problem.smooth:
        raise MethodMismatchError(f"{problem.name} is not smooth; use the sampled test")
    x = as_point(x, problem.n)
    _, v = min_norm_element(problem.jacobian(x), method=qp_method, max_iter=qp_iters)
    residual = float(np.linalg.norm(v))
    critical = bool(residual <= crit_tol)
    witness = None if critical else tuple(float(c) for c in -v)
    return CriticalityReport(residual, "smooth-qp", critical, 0, witness, crit_tol)


def _directions(rng: np.random.Generator, n: int, n_dirs: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    base = rng.standard_normal(((n_dirs + 1) // 2, n))
    base /= np.linalg.norm(base, axis=1, keepdims=True)
    dirs = np.empty((2 * len(base), n))
    dirs[0::2] = base
    dirs[1::2] = -base
    return dirs[:n_dirs]


def sampled_pareto_clarke_test(problem: Problem, x, n_dirs: int = 64, h_min: float = 1e-6,
                               n_samples: int = 4, crit_tol: float = SAMPLED_TOL,
                               seed: int = 0) -> CriticalityReport:
    """Sampled check that every direction has a component with ``F_i°(x; d) >= -crit_tol``.

    Directions come in antithetic pairs ``(d, -d)``; in one dimension only
    ``+1`` and ``-1`` are tested.  The residual is the minimum over
    directions of the largest component estimate.
    """
    if n_dirs < 1 or not h_min > 0 or not crit_tol > 0:
        raise ValueError("need n_dirs >= 1 and positive tolerances")
    x = as_point(x, problem.n)
    rng = np.random.default_rng(seed)
    dirs = _directions(rng, problem.n, n_dirs)
    seeds = np.random.SeedSequence(seed).generate_state(len(dirs) * problem.m)
    residual, witness = math.inf, None
    for k, d in enumerate(dirs):
        worst = max(
            clarke_dir_deriv_estimate(problem, i, x, d, h_min, n_samples, int(seeds[k * problem.m + i]))
            for i in range(problem.m)
        )
        if worst < residual:
            residual, witness = worst, d
    critical = bool(residual >= -crit_tol)
    wd = None if critical else tuple(float(c) for c in witness)
    return CriticalityReport(float(residual), "sampled-directions", critical, len(dirs), wd, crit_tol)


def check_criticality(problem: Problem, x, method: str = "auto", seed: int = 0,
                      crit_tol: float | None = None, n_dirs: int = 64) -> CriticalityReport:
    """Dispatch to the smooth test for smooth problems, the sampled test otherwise."""
    if method == "auto":
        method = "smooth" if problem.smooth else "sampled"
    if method == "smooth":
        return smooth_criticality_residual(problem, x, crit_tol=crit_tol or SMOOTH_TOL)
    if method == "sampled":
        return sampled_pareto_clarke_test(problem, x, n_dirs=n_dirs, crit_tol=crit_tol or SAMPLED_TOL, seed=seed)
    raise ValueError(f"unknown criticality method {method!r}")


def probe_descent(problem: Problem, x, d, steps=PROBE_STEPS) -> float | None:
    """Return the first step ``t`` with ``F(x + t d) ≺ F(x)``, or ``None``."""
    x = as_point(x, problem.n)
    d = as_point(d, problem.n)
    fx = problem.evaluate(x)
    for t in steps:
        if np.all(problem.evaluate(x + t * d) < fx):
            return t
    return None
