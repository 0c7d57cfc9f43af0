"""Inner solver: approximately minimize ``phi_k`` over the level set of the center.

Iterates never leave the level set, which stands in for the normal-cone term
of the optimality inclusion.  Each inner iteration backtracks along a few
candidate directions:

* the subgradient selection of ``phi`` at the current point;
* on nonsmooth problems, the min-norm element of subgradients sampled in a
  ball of radius ``eps`` (gradient sampling), which keeps descending where
  the plain selection jams at a kink;
* when a step was cut short and some constraint is nearly active, the
  min-norm element of ``phi``'s subgradients together with the active
  constraints' subgradients, plus an arc that takes the plain step and
  pulls it back onto the level set with Newton corrections.

Among accepted trials whose ``phi`` ties the best up to roundoff, the
longest step wins; the loop stops when no candidate moves farther than
``inner_tol``.  For nonconvex problems this is a local method; a few extra
feasible starts hedge against poor local structure but nothing certifies a
global minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ParameterError
from .minnorm import min_norm_element
from .problem import EXP_LIMIT
from .scalarizer import RegularizedObjective, phi_subgradient

_NOISE = 1e-14


@dataclass(frozen=True)
class InnerOptions:
    max_inner_iters: int = 1000
    step_init: float = 1.0
    armijo_c: float = 1e-4
    backtrack_ratio: float = 0.5
    inner_tol: float = 1e-12
    feas_tol: float = 1e-12
    max_backtracks: int = 80
    n_starts: int = 3
    sample_radius: float = 1e-2
    min_sample_radius: float = 1e-9
    active_tol: float = 1e-8

    def __post_init__(self):
        if self.max_inner_iters < 1 or self.max_backtracks < 1 or self.n_starts < 1:
            raise ParameterError("iteration, backtrack and start counts must be positive")
        if not 0 < self.armijo_c < 1 or not 0 < self.backtrack_ratio < 1:
            raise ParameterError("armijo_c and backtrack_ratio must lie strictly inside (0, 1)")
        for name in ("step_init", "inner_tol", "sample_radius", "min_sample_radius"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.feas_tol < 0 or self.active_tol < 0:
            raise ParameterError("feas_tol and active_tol must be nonnegative")


@dataclass(frozen=True)
class InnerResult:
    x_next: np.ndarray
    phi_final: float
    residual: float
    inner_iters: int
    feasible: bool
    stalled: bool = False


class _Context:
    """Evaluation helper bound to one regularized objective."""

    def __init__(self, reg: RegularizedObjective, opts: InnerOptions):
        self.reg = reg
        self.opts = opts
        self.z = reg.z
        self.beta = reg.beta
        self.shared = reg.level_problem is reg.base
        self.exp_shared = reg.base.exp_of is reg.level_problem
        self.level_center = reg.level_problem.evaluate(reg.center)
        self.level_bound = self.level_center + opts.feas_tol
        self.smooth = reg.base.smooth and reg.level_problem.smooth
        self.convex = reg.base.convex

    def trial(self, x):
        """Return ``(phi(x), level values at x, feasible)``."""
        if self.exp_shared:
            fl = self.reg.level_problem.evaluate(x)
            if np.any(fl > EXP_LIMIT):
                raise EvaluationError("exp transform overflow", component=int(np.argmax(fl)))
            fb = np.exp(fl)
        else:
            fb = self.reg.base.evaluate(x)
            fl = fb if self.shared else self.reg.level_problem.evaluate(x)
        diff = x - self.reg.center
        phi = float(fb @ self.z) + 0.5 * self.beta * float(diff @ diff)
        return phi, fl, bool(np.all(fl <= self.level_bound))

    def active(self, fl):
        tol = self.opts.active_tol * (1.0 + np.abs(self.level_center))
        return np.flatnonzero(fl >= self.level_center - tol)


def _accept(ctx: _Context, x, y, phi_x, phi_y, g) -> bool:
    """Sufficient decrease of ``phi`` from ``x`` to ``y``, with ``g = grad phi(x)``."""
    p = y - x
    a = float(g @ p)
    if not a < 0:
        return False
    noise = _NOISE * (1.0 + abs(phi_x))
    if phi_x - phi_y > noise:
        return phi_y <= phi_x + ctx.opts.armijo_c * a
    if not ctx.smooth or phi_y > phi_x + noise:
        return False
    # Below roundoff the Armijo test passes or fails at random, so use
    # slopes.  For convex phi, b = <grad phi(y), y - x> < 0 certifies
    # phi(y) < phi(x); otherwise fall back to a two-sided Wolfe test.
    b = float(phi_subgradient(ctx.reg, y) @ p)
    if ctx.convex:
        return b < 0
    return 0.9 * a <= b <= -0.8 * a


def _backtrack(ctx: _Context, x, phi_x, g, trace=None):
    """Largest ``t = step_init * ratio**j`` passing Armijo and the level-set test.

    Halving stops once the step no longer moves ``x`` beyond roundoff.

    Returns ``(point, phi, t, cut)``; ``cut`` reports whether a step that
    passed Armijo was rejected for leaving the level set.
    """
    opts = ctx.opts
    gg = float(g @ g)
    if not gg > 0 or not math.isfinite(gg):
        return x, phi_x, 0.0, False
    t = opts.step_init
    floor = 1e-16 * (1.0 + float(np.linalg.norm(x))) / math.sqrt(gg)
    cut = False
    for _ in range(opts.max_backtracks):
        if t < floor:
            break
        y = x - t * g
        try:
            phi_y, _, feas = ctx.trial(y)
        except ArithmeticError:
            phi_y, feas = math.inf, False
        if _accept(ctx, x, y, phi_x, phi_y, g):
            if feas:
                if trace is not None:
                    trace.append(y)
                return y, phi_y, t, cut
            cut = True
        t *= opts.backtrack_ratio
    return x, phi_x, 0.0, cut


def _restore(ctx: _Context, y, aim, max_steps: int = 20):
    """Pull ``y`` back into the level set by least-norm Newton corrections.

    Constraints above the bound are linearized and moved onto ``aim``, the
    level of the point the step started from; this keeps restored points on
    the same level surface instead of trading the ``feas_tol`` slack for
    ``phi``.  Returns ``None`` if not feasible after ``max_steps``.
    """
    lp = ctx.reg.level_problem
    prev = math.inf
    for _ in range(max_steps + 1):
        fl = lp.evaluate(y)
        over = fl - ctx.level_bound
        idx = np.flatnonzero(over > 0)
        if idx.size == 0:
            return y
        worst = float(over.max())
        if worst > 0.5 * prev:  # not converging; let the caller shorten the step
            return None
        prev = worst
        r = fl[idx] - aim[idx]
        if idx.size == 1:
            a = lp.subgradient(int(idx[0]), y)
            aa = float(a @ a)
            if not aa > 0:
                return None
            y = y - (r[0] / aa) * a
        else:
            J = np.vstack([lp.subgradient(i, y) for i in idx])
            y = y - J.T @ np.linalg.lstsq(J @ J.T, r, rcond=None)[0]
    return None


def _arc_backtrack(ctx: _Context, x, phi_x, g):
    """Backtrack along the restored path ``t -> restore(x - t g)``."""
    opts = ctx.opts
    gg = float(g @ g)
    if not gg > 0 or not math.isfinite(gg):
        return x, phi_x, 0.0, False
    fl_x = ctx.reg.level_problem.evaluate(x)
    margin = 4.0 * np.finfo(float).eps * (1.0 + np.abs(ctx.level_center))
    aim = np.minimum(np.maximum(fl_x, ctx.level_center), ctx.level_bound) - margin
    t = opts.step_init
    floor = 1e-16 * (1.0 + float(np.linalg.norm(x))) / math.sqrt(gg)
    for _ in range(opts.max_backtracks):
        if t < floor:
            break
        try:
            y = _restore(ctx, x - t * g, aim)
            if y is not None:
                phi_y, _, feas = ctx.trial(y)
                if feas and _accept(ctx, x, y, phi_x, phi_y, g):
                    return y, phi_y, t, False
        except (ArithmeticError, np.linalg.LinAlgError):
            pass
        t *= opts.backtrack_ratio
    return x, phi_x, 0.0, False


def feasible_backtrack(reg: RegularizedObjective, x, g, opts: InnerOptions):
    """Backtrack from ``x`` along ``-g``; returns ``(x - t g, t)`` or ``(x, 0)``."""
    ctx = _Context(reg, opts)
    x = np.asarray(x, dtype=float)
    phi_x, _, _ = ctx.trial(x)
    y, _, t, _ = _backtrack(ctx, x, phi_x, np.asarray(g, dtype=float))
    return y, t


def _ball(rng, x, radius, count):
    n = x.size
    u = rng.standard_normal((count, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / n)
    return x + r[:, None] * u


def _local_descent(ctx: _Context, x0, rng, budget, trace=None):
    reg, opts = ctx.reg, ctx.opts
    x = np.asarray(x0, dtype=float)
    phi_x, fl, _ = ctx.trial(x)
    eps = opts.sample_radius
    iters = 0
    residual = math.inf
    recent = []
    while iters < budget:
        iters += 1
        if not ctx.smooth:
            # Nonsmooth stall: phi gained under 1e3 roundoff units in ten
            # iterations.  Refine the sampling radius, then give up.
            recent.append(phi_x)
            if len(recent) > 10:
                recent.pop(0)
                if recent[0] - phi_x <= 1e3 * _NOISE * (1.0 + abs(phi_x)):
                    if eps <= opts.min_sample_radius:
                        break
                    eps *= 0.1
                    recent = [phi_x]
        g_sel = phi_subgradient(reg, x)
        pool = [g_sel]
        samples = ()
        if not ctx.smooth:
            samples = _ball(rng, x, eps, x.size + 1)
            pool += [phi_subgradient(reg, y) for y in samples]
        cands = [_backtrack(ctx, x, phi_x, g_sel, trace)]
        g_main = g_sel
        if not ctx.smooth:
            g_main = min_norm_element(pool)[1]
            cands.append(_backtrack(ctx, x, phi_x, g_main, trace))
        residual = float(np.linalg.norm(g_main))
        act = ctx.active(fl)
        if act.size and any(c[3] or c[2] == 0.0 for c in cands):
            cons = [reg.level_problem.subgradient(i, x) for i in act]
            for y in samples:
                cons += [reg.level_problem.subgradient(i, y) for i in act]
            g_c = min_norm_element(pool + cons)[1]
            residual = min(residual, float(np.linalg.norm(g_c)))
            cands.append(_backtrack(ctx, x, phi_x, g_c, trace))
            cands.append(_arc_backtrack(ctx, x, phi_x, g_main))
            if trace is not None and cands[-1][2] > 0:
                trace.append(cands[-1][0])
        # Every accepted candidate decreases phi; among those within
        # roundoff of the best value take the longest step.
        moved = [(c[1], float(np.linalg.norm(c[0] - x)), c[0]) for c in cands if c[2] > 0]
        # Stop only when no candidate moves: a tiny step that spends the
        # feas_tol slack can win on phi while another candidate still travels.
        step = max((m[1] for m in moved), default=0.0)
        if moved:
            low = min(m[0] for m in moved) + _NOISE * (1.0 + abs(phi_x))
            phi_y, _, y = max((m for m in moved if m[0] <= low), key=lambda m: m[1])
            x, phi_x = y, phi_y
            _, fl, _ = ctx.trial(x)
        if step <= opts.inner_tol:
            if not ctx.smooth and eps > opts.min_sample_radius:
                eps *= 0.1
                continue
            break
        if not ctx.smooth and residual <= eps and eps > opts.min_sample_radius:
            eps *= 0.1
    return x, phi_x, residual, iters


def _pull_into_level_set(ctx: _Context, start, max_halvings=30):
    center = ctx.reg.center
    y = np.asarray(start, dtype=float)
    for _ in range(max_halvings):
        try:
            if ctx.trial(y)[2]:
                return y
        except ArithmeticError:
            pass
        y = center + 0.5 * (y - center)
    return None


def solve_subproblem(reg: RegularizedObjective, opts: InnerOptions | None = None, seed: int = 0,
                     trace: list | None = None) -> InnerResult:
    """Approximately solve ``min phi(x)`` subject to ``G(x) ⪯ G(center)``.

    Returns the best feasible point found.  When no start moves off the
    center, the center is returned with ``stalled=True`` and residual 0.
    Pass a list as ``trace`` to collect every accepted trial point.
    """
    opts = opts or InnerOptions()
    ctx = _Context(reg, opts)
    rng = np.random.default_rng(seed)
    center = reg.center.copy()
    starts = [center]
    if not reg.base.convex and opts.n_starts > 1:
        g0 = phi_subgradient(reg, center)
        s = _pull_into_level_set(ctx, center - opts.step_init * g0)
        if s is not None and not np.array_equal(s, center):
            starts.append(s)
        radius = 0.5 * min(1.0, opts.step_init * float(np.linalg.norm(g0)) or 1.0)
        for _ in range(opts.n_starts - 2):
            s = _pull_into_level_set(ctx, _ball(rng, center, radius, 1)[0])
            if s is not None:
                starts.append(s)
    best = None
    total = 0
    for s in starts:
        x, phi_x, res, iters = _local_descent(ctx, s, rng, opts.max_inner_iters, trace)
        total += iters
        if best is None or phi_x < best[1]:
            best = (x, phi_x, res)
    x, phi_x, res = best
    stalled = bool(np.array_equal(x, center))
    feasible = ctx.trial(x)[2]
    return InnerResult(x_next=x, phi_final=phi_x, residual=0.0 if stalled else res,
                       inner_iters=total, feasible=feasible, stalled=stalled)
