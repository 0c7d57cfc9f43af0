"""Outer proximal loop: scalarize, solve over the level set, test for a stop."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .criticality import CriticalityReport, check_criticality
from .errors import ParameterError
from .problem import Problem, as_point, exp_transform
from .scalarizer import RegularizedObjective, ScalarizationParams, beta
from .subproblem import InnerOptions, solve_subproblem

TERMINATIONS = ("step-tol", "critical", "max-iters", "stalled")
ASSUMPTIONS = (
    "completeness of the initial level set: assumed, not checked",
)


@dataclass(frozen=True)
class DriverParams:
    """Settings of one run.

    ``schedule`` is a single :class:`ScalarizationParams` used at every
    iteration, a sequence whose last entry repeats once exhausted, or
    ``None`` for uniform weights with ``alpha = 1``.  ``apply_exp_transform``
    of ``None`` means: transform exactly when the problem is not known to
    be positive.  ``x0`` of ``None`` draws a start uniformly from
    ``[-5, 5]^n`` with ``seed``.
    """

    max_outer_iters: int = 500
    step_tol: float = 1e-6
    schedule: ScalarizationParams | tuple[ScalarizationParams, ...] | None = None
    inner: InnerOptions = field(default_factory=InnerOptions)
    apply_exp_transform: bool | None = None
    seed: int = 0
    x0: tuple[float, ...] | None = None
    crit_method: str = "auto"
    crit_tol: float | None = None
    crit_n_dirs: int = 64

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ParameterError("max_outer_iters must be at least 1")
        if not self.step_tol > 0:
            raise ParameterError("step_tol must be positive")
        if isinstance(self.schedule, (list, tuple)):
            if not self.schedule:
                raise ParameterError("schedule must not be empty")
            object.__setattr__(self, "schedule", tuple(self.schedule))
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(float(v) for v in np.atleast_1d(self.x0)))

    def params_for(self, k: int, m: int) -> ScalarizationParams:
        if self.schedule is None:
            sp = ScalarizationParams.default(m)
        elif isinstance(self.schedule, ScalarizationParams):
            sp = self.schedule
        else:
            sp = self.schedule[min(k, len(self.schedule) - 1)]
        if sp.m != m:
            raise ParameterError(f"scalarization weights have length {sp.m}, problem has m={m}")
        return sp


@dataclass(frozen=True)
class IterateRecord:
    k: int
    x: tuple[float, ...]
    F_x: tuple[float, ...]
    step_norm: float
    beta: float
    inner_residual: float
    inner_iters: int


@dataclass(frozen=True)
class RunRecord:
    problem_name: str
    params: DriverParams
    history: tuple[IterateRecord, ...]
    termination: str
    final_criticality: CriticalityReport
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> IterateRecord:
        return self.history[-1]

    @property
    def x_final(self) -> np.ndarray:
        return np.asarray(self.history[-1].x)


def check_stop(prev, nxt, step_tol: float, crit: CriticalityReport | None = None) -> str:
    """Return ``"critical"``, ``"step-tol"`` or ``"continue"`` (criticality wins)."""
    prev = np.asarray(prev, dtype=float)
    nxt = np.asarray(nxt, dtype=float)
    if prev.shape != nxt.shape:
        raise ParameterError("points must have the same dimension")
    if crit is not None and crit.critical:
        return "critical"
    if float(np.linalg.norm(nxt - prev)) <= step_tol:
        return "step-tol"
    return "continue"


def initial_point(problem: Problem, params: DriverParams) -> np.ndarray:
    if params.x0 is not None:
        return as_point(params.x0, problem.n)
    return np.random.default_rng(params.seed).uniform(-5.0, 5.0, problem.n)


def _record(k, x, fx, step, b, res, iters) -> IterateRecord:
    return IterateRecord(k, tuple(float(v) for v in x), tuple(float(v) for v in fx), float(step),
                         float(b), float(res), int(iters))


def run_sppm(problem: Problem, params: DriverParams | None = None) -> RunRecord:
    """Run the scalarized proximal point loop on ``problem``.

    Every iterate stays in the level set of its predecessor, so the recorded
    objective values (always of the untransformed problem) descend
    componentwise.  Criticality is tested only at stop candidates, i.e.
    when the step is at most ``10 * step_tol`` or the inner solver stalls.
    """
    params = params or DriverParams()
    use_exp = (not problem.positive) if params.apply_exp_transform is None else params.apply_exp_transform
    work = exp_transform(problem) if use_exp else problem
    seeds = np.random.SeedSequence(params.seed).generate_state(params.max_outer_iters)

    def criticality(x):
        return check_criticality(problem, x, method=params.crit_method, seed=params.seed,
                                 crit_tol=params.crit_tol, n_dirs=params.crit_n_dirs)

    x = initial_point(problem, params)
    history = [_record(0, x, problem.evaluate(x), 0.0, 0.0, 0.0, 0)]
    termination = "max-iters"
    report = None
    for k in range(params.max_outer_iters):
        sp = params.params_for(k, problem.m)
        reg = RegularizedObjective(work, sp, x, level_problem=problem)
        res = solve_subproblem(reg, params.inner, seed=int(seeds[k]))
        step = float(np.linalg.norm(res.x_next - x))
        history.append(_record(k + 1, res.x_next, problem.evaluate(res.x_next), step, beta(sp),
                               res.residual, res.inner_iters))
        report = None
        if res.stalled or step <= 10.0 * params.step_tol:
            report = criticality(res.x_next)
        decision = check_stop(x, res.x_next, params.step_tol, report)
        x = res.x_next
        if decision == "critical":
            termination = "critical"
            break
        if decision == "step-tol":
            termination = "stalled" if res.stalled else "step-tol"
            break
    if report is None:
        report = criticality(x)
    metadata = {
        "exp_transform": bool(use_exp),
        "assumptions": "; ".join(ASSUMPTIONS),
        "inner_policy": "feasible descent; residual records inexactness",
    }
    return RunRecord(problem.name, params, tuple(history), termination, report, metadata)


def weight_grid(grid: int, eps: float = 1e-6) -> list[tuple[float, np.ndarray]]:
    """Unit weights ``(t, 1 - t) / ||.||`` for ``t = 0, 1/grid, ..., 1``.

    Endpoints use ``(eps, 1 - eps)`` so no weight is exactly zero.
    """
    if grid < 2:
        raise ParameterError("sweep grid must be at least 2")
    out = []
    for i in range(grid + 1):
        t = i / grid
        w = np.array([min(max(t, eps), 1.0 - eps), 1.0 - min(max(t, eps), 1.0 - eps)])
        out.append((t, w / np.linalg.norm(w)))
    return out


def run_sweep(problem: Problem, params: DriverParams, grid: int, jobs: int = 1,
              alpha: float = 1.0) -> list[tuple[float, RunRecord]]:
    """One run per weight of :func:`weight_grid`; results ordered by weight index."""
    if problem.m != 2:
        raise ParameterError(f"weight sweeps support m = 2 only, {problem.name} has m={problem.m}")
    weights = weight_grid(grid)
    configs = [
        replace(params, schedule=ScalarizationParams.default(2, alpha=alpha, z=w)) for _, w in weights
    ]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        runs = list(pool.map(lambda p: run_sppm(problem, p), configs))
    return [(t, run) for (t, _), run in zip(weights, runs)]


def sweep_rows(results: Sequence[tuple[float, RunRecord]]):
    """Rows ``(t, x_final, F_final, nondominated)`` for a sweep."""
    from .order import nondominated_mask

    finals = np.array([run.final.F_x for _, run in results])
    mask = nondominated_mask(finals)
    return [(t, run.final.x, run.final.F_x, bool(nd)) for (t, run), nd in zip(results, mask)]
