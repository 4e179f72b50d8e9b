import math

import numpy as np
import pytest

from nozzlebench.elements import (
    monomial_integral,
    quadrature_rule,
    reference_basis_eval,
    reference_element,
)
from nozzlebench.errors import InvalidParameterError


@pytest.mark.parametrize("k", [1, 2, 3])
def test_kronecker_at_nodes(k):
    el = reference_element(k)
    vals, _ = el.eval(el.nodes)
    assert np.allclose(vals, np.eye(el.n_basis), atol=1e-11)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_partition_of_unity(k, rng):
    el = reference_element(k)
    pts = rng.dirichlet([1, 1, 1], size=30)[:, 1:]
    vals, _ = el.eval(pts)
    assert np.allclose(vals.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gradients_match_finite_differences(k, rng):
    el = reference_element(k)
    pts = 0.1 + 0.3 * rng.random((20, 2))
    step = 1e-6
    _, grads = el.eval(pts)
    for axis in (0, 1):
        e = np.zeros(2)
        e[axis] = step
        vp, _ = el.eval(pts + e)
        vm, _ = el.eval(pts - e)
        fd = (vp - vm) / (2 * step)
        assert np.abs(fd - grads[..., axis]).max() < 1e-6


def test_quadrature_weight_sum():
    for exactness in range(1, 11):
        rule = quadrature_rule(exactness)
        assert rule.weights.sum() == pytest.approx(0.5, abs=1e-14)


def test_quadrature_points_interior_weights_positive():
    for exactness in range(1, 11):
        rule = quadrature_rule(exactness)
        assert np.all(rule.weights > 0)
        pts = rule.points[:, 1:] if rule.points.shape[1] == 3 else rule.points
        assert np.all(pts > 0)
        assert np.all(pts.sum(axis=1) < 1)


def test_quadrature_exactness_vs_closed_form():
    for exactness in range(1, 11):
        rule = quadrature_rule(exactness)
        pts = rule.points[:, 1:] if rule.points.shape[1] == 3 else rule.points
        x, y = pts[:, 0], pts[:, 1]
        for a in range(exactness + 1):
            for b in range(exactness + 1 - a):
                approx = (rule.weights * x**a * y**b).sum()
                exact = monomial_integral(a, b)
                assert abs(approx - exact) < 1e-12


def test_monomial_integral_closed_form():
    assert monomial_integral(0, 0) == pytest.approx(0.5)
    assert monomial_integral(1, 0) == pytest.approx(1 / 6)
    a, b = 3, 4
    exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
    assert monomial_integral(a, b) == pytest.approx(exact, rel=1e-15)


def test_reference_basis_eval_accepts_barycentric(rng):
    lam = rng.dirichlet([1, 1, 1], size=10)
    v1, _ = reference_basis_eval(2, lam)
    v2, _ = reference_basis_eval(2, lam[:, 1:])
    assert np.allclose(v1, v2, atol=1e-13)


def test_invalid_degree_rejected():
    with pytest.raises(InvalidParameterError):
        reference_element(0)
    with pytest.raises(InvalidParameterError):
        reference_element(4)
    with pytest.raises(InvalidParameterError):
        quadrature_rule(11)
