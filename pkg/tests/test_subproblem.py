import math

import numpy as np
import pytest

from sppm import (
    InnerOptions,
    RegularizedObjective,
    ScalarizationParams,
    exp_transform,
    feasible_backtrack,
    in_level_set,
    load_problem,
    make_convex_quadratic,
    phi_subgradient,
    phi_value,
    solve_subproblem,
)
from sppm.errors import ParameterError

from oracles import quadratic_prox

R2 = 1 / math.sqrt(2)
PAIR = make_convex_quadratic([(0.0,), (1.0,)])


def reg_pair(z, beta_value, center):
    e = (R2, R2)
    alpha = beta_value / float(np.dot(e, z))
    return RegularizedObjective(PAIR, ScalarizationParams(z, e, alpha), [center])


def grid_solution(z, beta_value, center, h=1e-6):
    xs = np.arange(-3.0, 3.0 + h, h)
    f1, f2 = xs ** 2, (xs - 1.0) ** 2
    ok = (f1 <= center ** 2) & (f2 <= (center - 1.0) ** 2)
    phi = z[0] * f1 + z[1] * f2 + 0.5 * beta_value * (xs - center) ** 2
    return xs[ok][np.argmin(phi[ok])]


def test_single_quadratic_example():
    F = make_convex_quadratic([(0.0,)])
    reg = RegularizedObjective(F, ScalarizationParams((1.0,), (1.0,), 2.0), [1.0])
    res = solve_subproblem(reg)
    assert res.x_next == pytest.approx([0.5], abs=1e-8)
    assert res.feasible and not res.stalled


def test_pair_interior_example():
    res = solve_subproblem(reg_pair((1.0, 0.0), 1.0, 2.0))
    assert res.x_next[0] == pytest.approx(2 / 3, abs=1e-6)
    assert res.x_next[0] == pytest.approx(grid_solution((1.0, 0.0), 1.0, 2.0), abs=2e-6)


def test_pair_boundary_example():
    # unconstrained minimizer 1/14 lies outside the level set [0.5, 1.5]
    res = solve_subproblem(reg_pair((1.0, 0.0), 0.1, 1.5))
    assert res.x_next[0] == pytest.approx(grid_solution((1.0, 0.0), 0.1, 1.5), abs=1e-6)
    assert res.x_next[0] == pytest.approx(0.5, abs=1e-6)


def test_minimizer_is_fixed_point():
    F = make_convex_quadratic([(0.0,)])
    reg = RegularizedObjective(F, ScalarizationParams((1.0,), (1.0,), 1.0), [0.0])
    res = solve_subproblem(reg)
    assert res.x_next == pytest.approx([0.0], abs=1e-12)
    assert res.stalled and res.residual == 0.0


def test_singleton_level_set_stalls():
    res = solve_subproblem(reg_pair((R2, R2), 1.0, 0.5))
    assert res.stalled and res.x_next[0] == 0.5


def test_matches_analytic_prox_when_feasible():
    rng = np.random.default_rng(5)
    F = load_problem("quad-tri")
    centers = [(0.0, 0.0), (2.0, 0.0), (1.0, 2.0)]
    checked = 0
    for _ in range(40):
        z = rng.dirichlet(np.ones(3))
        z /= np.linalg.norm(z)
        sp = ScalarizationParams(tuple(z), tuple(np.ones(3) / math.sqrt(3)), alpha=float(rng.uniform(0.5, 5)))
        center = rng.uniform(-2, 2, 2)
        reg = RegularizedObjective(F, sp, center)
        ref = quadratic_prox(centers, z, reg.beta, center)
        if not in_level_set(F, ref, center):
            continue
        checked += 1
        res = solve_subproblem(reg)
        assert np.linalg.norm(res.x_next - ref) <= 1e-6
        assert np.linalg.norm(phi_subgradient(reg, res.x_next)) <= 1e-6
    assert checked >= 10


def test_phi_never_increases_and_trace_is_feasible():
    rng = np.random.default_rng(9)
    for pid, transform in (("quad-seg", True), ("loc-gauge", False), ("cobb2", False)):
        F = load_problem(pid)
        work = exp_transform(F) if transform else F
        for _ in range(5):
            center = rng.uniform(0.5, 3.0, F.n)
            reg = RegularizedObjective(work, ScalarizationParams.default(F.m), center, level_problem=F)
            trace = []
            res = solve_subproblem(reg, trace=trace)
            assert res.phi_final <= phi_value(reg, center)
            assert res.feasible
            for y in trace:
                assert np.all(F.evaluate(y) <= F.evaluate(center) + 1e-12)


def test_feasible_backtrack_decreases():
    F = make_convex_quadratic([(0.0, 0.0)])
    reg = RegularizedObjective(F, ScalarizationParams((1.0,), (1.0,), 1.0), [2.0, 1.0])
    x = np.array([2.0, 1.0])
    g = phi_subgradient(reg, x)
    y, t = feasible_backtrack(reg, x, g, InnerOptions())
    assert t > 0 and phi_value(reg, y) < phi_value(reg, x)
    assert np.allclose(y, x - t * g)


def test_feasible_backtrack_at_minimizer_returns_start():
    F = make_convex_quadratic([(0.0,)])
    reg = RegularizedObjective(F, ScalarizationParams((1.0,), (1.0,), 1.0), [0.0])
    y, t = feasible_backtrack(reg, [0.0], phi_subgradient(reg, [0.0]), InnerOptions())
    assert t == 0.0 and y == pytest.approx([0.0])


@pytest.mark.parametrize("kwargs", [
    {"max_inner_iters": 0}, {"armijo_c": 1.0}, {"backtrack_ratio": 0.0}, {"step_init": -1.0},
    {"inner_tol": 0.0}, {"feas_tol": -1e-3}, {"n_starts": 0},
])
def test_inner_options_validation(kwargs):
    with pytest.raises(ParameterError):
        InnerOptions(**kwargs)
