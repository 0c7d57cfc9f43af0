"""Vector objectives with per-component value and Clarke-subgradient oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConstructionError, EvaluationError, OrderDimensionError

ValueFn = Callable[[np.ndarray], float]
SubgradFn = Callable[[np.ndarray], np.ndarray]

# log(max float) with a little headroom; exp above this overflows.
EXP_LIMIT = 709.0


def as_point(x, n: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite point of R^n and return it as a float array."""
    if type(x) is np.ndarray and x.dtype == np.float64 and x.ndim == 1 and x.size == n:
        if not np.isfinite(x).all():
            raise EvaluationError(f"point has non-finite coordinates: {x!r}")
        return x
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise OrderDimensionError(f"point must be a non-empty 1-D vector, got shape {arr.shape}")
    if n is not None and arr.size != n:
        raise OrderDimensionError(f"point has dimension {arr.size}, problem expects {n}")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"point has non-finite coordinates: {arr!r}")
    return arr


@dataclass(frozen=True)
class ComponentOracle:
    """One objective component: its value and one Clarke subgradient per point."""

    value: ValueFn
    subgradient: SubgradFn
    label: str = ""


@dataclass(frozen=True)
class Problem:
    """A vector objective ``F: R^n -> R^m``.

    Flags are claims made by whoever built the problem: ``smooth`` means
    every subgradient oracle returns the exact gradient; ``positive`` means
    ``0 ≺ F`` everywhere; ``convex`` means every component is convex.
    Components are indexed from zero.
    """

    name: str
    n: int
    m: int
    components: tuple[ComponentOracle, ...]
    smooth: bool = False
    claimed_quasiconvex: bool = True
    positive: bool = False
    convex: bool = False
    # Set by exp_transform so callers holding both problems can evaluate once.
    exp_of: "Problem | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConstructionError(f"problem {self.name!r}: need n >= 1 and m >= 1")
        if len(self.components) != self.m:
            raise ConstructionError(
                f"problem {self.name!r}: {len(self.components)} components for m={self.m}"
            )

    def component_value(self, i: int, x) -> float:
        x = as_point(x, self.n)
        v = float(self.components[i].value(x))
        if not math.isfinite(v):
            raise EvaluationError(f"{self.name}: component {i} is non-finite at {x.tolist()}", component=i)
        return v

    def evaluate(self, x) -> np.ndarray:
        """Return ``(F_1(x), ..., F_m(x))``."""
        x = as_point(x, self.n)
        out = np.empty(self.m)
        for i, comp in enumerate(self.components):
            v = float(comp.value(x))
            if not math.isfinite(v):
                raise EvaluationError(
                    f"{self.name}: component {i} is non-finite at {x.tolist()}", component=i
                )
            out[i] = v
        return out

    def subgradient(self, i: int, x) -> np.ndarray:
        """Return one element of the Clarke subdifferential of component ``i`` at ``x``."""
        if not 0 <= i < self.m:
            raise IndexError(f"component index {i} out of range for m={self.m}")
        x = as_point(x, self.n)
        g = np.asarray(self.components[i].subgradient(x), dtype=float).reshape(-1)
        if g.size != self.n or not np.all(np.isfinite(g)):
            raise EvaluationError(
                f"{self.name}: component {i} subgradient invalid at {x.tolist()}: {g!r}", component=i
            )
        return g

    def jacobian(self, x) -> np.ndarray:
        """Stack the subgradient selections of all components, shape ``(m, n)``."""
        return np.vstack([self.subgradient(i, x) for i in range(self.m)])


def exp_transform(problem: Problem) -> Problem:
    """Return the problem with components ``exp(F_i)``.

    Pareto, weak Pareto and critical sets are unchanged because ``exp`` is
    strictly increasing.  Component values above ~709 overflow and raise
    :class:`EvaluationError`; rescale the problem first if that happens.
    """

    def wrap(i: int, comp: ComponentOracle) -> ComponentOracle:
        def value(x):
            v = float(comp.value(x))
            if not v <= EXP_LIMIT:
                raise EvaluationError(
                    f"exp transform overflow: component {i} has value {v} at {np.asarray(x).tolist()}",
                    component=i,
                )
            return math.exp(v)

        def subgradient(x):
            v = float(comp.value(x))
            if not v <= EXP_LIMIT:
                raise EvaluationError(f"exp transform overflow in component {i}", component=i)
            return math.exp(v) * np.asarray(comp.subgradient(x), dtype=float)

        return ComponentOracle(value, subgradient, label=f"exp({comp.label or i})")

    comps = tuple(wrap(i, c) for i, c in enumerate(problem.components))
    # exp of a convex function is convex, so every flag except positivity carries over.
    return replace(problem, name=f"exp({problem.name})", components=comps, positive=True, exp_of=problem)


def central_difference(f: ValueFn, x, d, h: float) -> float:
    """Central-difference estimate of the directional derivative of ``f``."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    return (f(x + h * d) - f(x - h * d)) / (2.0 * h)


def _ball_sample(rng: np.random.Generator, center: np.ndarray, radius: float) -> np.ndarray:
    n = center.size
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    return center + radius * rng.random() ** (1.0 / n) * u


def step_grid(h_min: float, n_levels: int = 10, t_max: float = 1e-1) -> np.ndarray:
    """Geometric grid ``h_min * 2**j`` truncated at ``t_max`` (at least one level)."""
    grid = h_min * 2.0 ** np.arange(n_levels)
    grid = grid[grid <= t_max]
    return grid if grid.size else np.array([h_min])


def clarke_dir_deriv_estimate(
    problem: Problem,
    i: int,
    x,
    d,
    h_min: float = 1e-6,
    n_samples: int = 4,
    seed: int = 0,
    n_levels: int = 10,
    t_max: float = 1e-1,
) -> float:
    """Sampled lower estimate of the Clarke directional derivative ``F_i°(x; d)``.

    For each step ``t`` on a geometric grid starting at ``h_min`` the base
    point ``y`` is drawn uniformly from the ball of radius ``t`` around ``x``
    and the quotient ``(F_i(y + t d) - F_i(y)) / t`` is recorded; the maximum
    over all draws is returned.  Sample 0 at every level is ``y = x`` itself.
    Draws are generated sample-major, so for a fixed seed the draws used with
    ``n_samples = k`` are a prefix of those used with ``k + 1`` and the
    estimate is nondecreasing in ``n_samples``.

    The grid is capped at ``n_levels`` levels because on smooth components
    the quotient is biased upward by O(largest t).
    """
    x = as_point(x, problem.n)
    d = as_point(d, problem.n)
    if not np.linalg.norm(d) > 0:
        raise ValueError("direction must be nonzero")
    if not h_min > 0 or n_samples < 1:
        raise ValueError("need h_min > 0 and n_samples >= 1")
    f = problem.components[i].value
    grid = step_grid(h_min, n_levels, t_max)
    rng = np.random.default_rng(seed)
    best = -math.inf
    for s in range(n_samples):
        for t in grid:
            y = x if s == 0 else _ball_sample(rng, x, t)
            q = (float(f(y + t * d)) - float(f(y))) / t
            if not math.isfinite(q):
                raise EvaluationError(f"non-finite difference quotient in component {i}", component=i)
            best = max(best, q)
    return best


def make_problem(
    name: str,
    n: int,
    values: Sequence[ValueFn],
    subgradients: Sequence[SubgradFn],
    **flags,
) -> Problem:
    """Convenience constructor from parallel lists of value and subgradient callables."""
    if len(values) != len(subgradients):
        raise ConstructionError("values and subgradients must have equal length")
    comps = tuple(ComponentOracle(v, g) for v, g in zip(values, subgradients))
    return Problem(name=name, n=n, m=len(comps), components=comps, **flags)
