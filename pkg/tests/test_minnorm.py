import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sppm.minnorm import min_norm_element, project_simplex


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(1, 8), elements=st.floats(-10, 10)))
def test_project_simplex_is_projection(c):
    p = project_simplex(c)
    assert np.all(p >= 0) and p.sum() == pytest.approx(1.0)
    # variational inequality <c - p, q - p> <= 0 at every vertex q
    for q in np.eye(c.size):
        assert (c - p) @ (q - p) <= 1e-9


def test_pair_examples():
    lam, v = min_norm_element([[1.0], [-1.0]])
    assert lam == pytest.approx([0.5, 0.5]) and v == pytest.approx([0.0])
    lam, v = min_norm_element([[4.0], [2.0]])
    assert v == pytest.approx([2.0]) and lam == pytest.approx([0.0, 1.0])


def test_zero_in_hull_gives_zero():
    P = np.array([[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]])
    _, v = min_norm_element(P)
    assert np.linalg.norm(v) <= 1e-12


def test_wolfe_agrees_with_projected_gradient_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        k, n = rng.integers(3, 7), rng.integers(2, 5)
        P = rng.normal(size=(k, n)) + rng.normal(size=n)
        lam, v = min_norm_element(P, method="wolfe")
        _, v_ref = min_norm_element(P, method="projected-gradient", max_iter=5_000)
        assert np.all(lam >= -1e-15) and lam.sum() == pytest.approx(1.0)
        assert np.linalg.norm(v) <= np.linalg.norm(v_ref) + 1e-10
        assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(v_ref), abs=1e-6)
        # optimality: <v, p_i> >= ||v||^2 for every generator
        assert np.all(P @ v >= v @ v - 1e-10)


def test_unknown_method():
    with pytest.raises(ValueError):
        min_norm_element(np.eye(3), method="simplex")
