import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sppm import (
    RegularizedObjective,
    ScalarizationParams,
    beta,
    exp_transform,
    load_problem,
    make_convex_quadratic,
    phi_subgradient,
    phi_value,
)
from sppm.errors import ParameterError

from oracles import central_difference

R2 = 1 / math.sqrt(2)


@pytest.mark.parametrize("z, e, alpha, expected", [
    ((1.0, 0.0), (R2, R2), 2.0, 2 / math.sqrt(2)),
    ((1.0,), (1.0,), 1.0, 1.0),
    ((R2, R2), (R2, R2), 3.0, 3.0),
])
def test_beta_examples(z, e, alpha, expected):
    assert beta(ScalarizationParams(z, e, alpha)) == pytest.approx(expected)


def test_parameter_invariants():
    with pytest.raises(ParameterError, match="0 < α_k < ᾱ"):
        ScalarizationParams((R2, R2), (R2, R2), alpha=0.0)
    with pytest.raises(ParameterError):
        ScalarizationParams((1.0,), (1.0,), alpha=1e6)
    with pytest.raises(ParameterError):
        ScalarizationParams((0.0, 0.0), (R2, R2))
    with pytest.raises(ParameterError):
        ScalarizationParams((1.0, -0.1), (R2, R2), normalized=False)
    with pytest.raises(ParameterError):
        ScalarizationParams((1.0, 0.0), (1.0, 0.0))
    with pytest.raises(ParameterError):
        ScalarizationParams((0.5, 0.5), (R2, R2))
    with pytest.raises(ParameterError):
        ScalarizationParams((1.0,), (R2, R2))
    # zero weights are legal as long as some weight is positive
    assert ScalarizationParams((1.0, 0.0), (R2, R2)).m == 2


def test_default_normalizes_weights():
    sp = ScalarizationParams.default(2, z=(3.0, 4.0))
    assert sp.z == pytest.approx((0.6, 0.8))
    assert sp.e == pytest.approx((R2, R2))


def quad1_reg(alpha, center):
    return RegularizedObjective(make_convex_quadratic([(0.0,)]), ScalarizationParams((1.0,), (1.0,), alpha), [center])


def test_phi_value_examples():
    reg = quad1_reg(2.0, 1.0)
    assert phi_value(reg, [0.5]) == pytest.approx(0.5)
    F = load_problem("quad-tri")
    reg = RegularizedObjective(F, ScalarizationParams.default(3), [0.3, -1.2])
    assert phi_value(reg, reg.center) == float(F.evaluate(reg.center) @ reg.z)


def test_phi_subgradient_examples():
    assert phi_subgradient(quad1_reg(2.0, 1.0), [0.5]) == pytest.approx([0.0])
    F = load_problem("quad-tri")
    reg = RegularizedObjective(F, ScalarizationParams.default(3), [0.3, -1.2])
    assert np.allclose(phi_subgradient(reg, reg.center), reg.z @ F.jacobian(reg.center))


def test_phi_subgradient_matches_central_differences():
    rng = np.random.default_rng(3)
    h = 1e-4
    for F in (load_problem("quad-tri"), exp_transform(load_problem("quad-seg"))):
        for _ in range(50):
            reg = RegularizedObjective(F, ScalarizationParams.default(F.m, alpha=2.5), rng.uniform(-1, 1, F.n))
            x = rng.uniform(-1, 1, F.n)
            d = rng.normal(size=F.n)
            d /= np.linalg.norm(d)
            cd = central_difference(lambda y: phi_value(reg, y), x, d, h)
            assert abs(cd - phi_subgradient(reg, x) @ d) <= 1e3 * h * h * (1 + abs(phi_value(reg, x)))


def test_weight_length_mismatch():
    with pytest.raises(ParameterError):
        RegularizedObjective(load_problem("quad-seg"), ScalarizationParams.default(3), [0.0])


def test_center_is_read_only():
    reg = quad1_reg(1.0, 2.0)
    with pytest.raises(ValueError):
        reg.center[0] = 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(-3, 3), st.floats(-3, 3))
def test_positive_scaling_scales_phi(c, xc, x):
    F = load_problem("quad-seg")
    z = np.array([0.6, 0.8])
    e = (R2, R2)
    base = RegularizedObjective(F, ScalarizationParams(tuple(z), e), [xc])
    scaled = RegularizedObjective(F, ScalarizationParams(tuple(c * z), e, normalized=False), [xc])
    assert phi_value(scaled, [x]) == pytest.approx(c * phi_value(base, [x]), rel=1e-12, abs=1e-12)
    assert phi_subgradient(scaled, [x]) == pytest.approx(c * phi_subgradient(base, [x]), rel=1e-12, abs=1e-12)
