import math

import numpy as np
import pytest

from sppm import (
    ComponentOracle,
    Problem,
    clarke_dir_deriv_estimate,
    exp_transform,
    load_problem,
    make_ces,
    make_cobb_douglas,
    make_convex_quadratic,
)
from sppm.errors import ConstructionError, EvaluationError, OrderDimensionError
from sppm.problem import make_problem, step_grid


def abs_problem():
    return make_problem("abs", 1, [lambda x: abs(x[0])], [lambda x: np.array([np.sign(x[0])])])


def test_evaluate_examples():
    F = make_convex_quadratic([(0.0,), (1.0,)])
    assert np.array_equal(F.evaluate([0.0]), [0.0, 1.0])
    assert make_cobb_douglas([(1, 0.5, 0.5)]).evaluate([1.0, 1.0])[0] == pytest.approx(-1.0)
    assert make_ces([(0.5, 0.5, 1.0)]).evaluate([2.0, 2.0])[0] == pytest.approx(-2.0)


def test_subgradient_examples():
    assert make_convex_quadratic([(0.0,)]).subgradient(0, [3.0]) == pytest.approx([6.0])
    assert abs_problem().subgradient(0, [0.0]) == pytest.approx([0.0])


def test_location_subgradient_matches_finite_differences():
    p = load_problem("loc-2cluster")
    x = np.array([0.9, 0.37])  # generic point: each max attained uniquely
    h = 1e-5
    for i in range(p.m):
        fd = [(p.component_value(i, x + h * e) - p.component_value(i, x - h * e)) / (2 * h) for e in np.eye(2)]
        assert p.subgradient(i, x) == pytest.approx(fd, abs=1e-8)


def test_dimension_and_index_errors():
    F = make_convex_quadratic([(0.0, 0.0)])
    with pytest.raises(OrderDimensionError):
        F.evaluate([1.0])
    with pytest.raises(IndexError):
        F.subgradient(1, [0.0, 0.0])


def test_non_finite_component_reports_index():
    p = make_problem("bad", 1, [lambda x: 0.0, lambda x: math.inf], [lambda x: np.zeros(1)] * 2)
    with pytest.raises(EvaluationError) as info:
        p.evaluate([0.0])
    assert info.value.component == 1


def test_construction_checks_component_count():
    with pytest.raises(ConstructionError):
        Problem("p", 1, 2, (ComponentOracle(lambda x: 0.0, lambda x: np.zeros(1)),))


def test_exp_transform_examples():
    p = make_problem("lin", 1, [lambda x: x[0]], [lambda x: np.ones(1)])
    e = exp_transform(p)
    assert e.evaluate([-1.0])[0] == pytest.approx(0.3678794, abs=1e-7)
    assert e.evaluate([0.0])[0] == 1.0
    assert e.subgradient(0, [2.0])[0] == pytest.approx(7.389056, abs=1e-6)
    assert e.positive and e.n == p.n and e.m == p.m


def test_exp_transform_overflow_raises():
    p = make_problem("lin", 1, [lambda x: x[0]], [lambda x: np.ones(1)])
    with pytest.raises(EvaluationError):
        exp_transform(p).evaluate([800.0])


def test_exp_transform_preserves_strict_order():
    p = load_problem("cobb2")
    e = exp_transform(p)
    rng = np.random.default_rng(1)
    for _ in range(200):
        x, y = rng.uniform(0, 3, 2), rng.uniform(0, 3, 2)
        assert np.array_equal(p.evaluate(x) < p.evaluate(y), e.evaluate(x) < e.evaluate(y))


def test_clarke_estimate_abs_at_kink():
    p = abs_problem()
    for d in (1.0, -1.0):
        est = clarke_dir_deriv_estimate(p, 0, [0.0], [d], n_samples=64, seed=3)
        assert 0.99 <= est <= 1.0 + 1e-12


def test_clarke_estimate_smooth_case():
    p = make_convex_quadratic([(0.0,)])
    for d, expected in ((1.0, 2.0), (-1.0, -2.0)):
        est = clarke_dir_deriv_estimate(p, 0, [1.0], [d], h_min=1e-6, n_samples=8, seed=0)
        # quotient at base y, step t is 2*y*d + t with |y - 1| <= t: bias <= 3 t_max
        assert expected <= est <= expected + 3 * step_grid(1e-6).max() + 1e-12


def test_clarke_estimate_monotone_in_samples():
    p = load_problem("loc-gauge")
    x, d = np.array([1.0, 0.3]), np.array([0.6, -0.8])
    ests = [clarke_dir_deriv_estimate(p, 0, x, d, n_samples=k, seed=5) for k in (1, 2, 4, 8)]
    assert all(a <= b for a, b in zip(ests, ests[1:]))


def test_clarke_estimate_rejects_zero_direction():
    with pytest.raises(ValueError):
        clarke_dir_deriv_estimate(abs_problem(), 0, [0.0], [0.0])
