import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpk_chaos.errors import ConfigError, PrecisionError
from fpk_chaos.hermite import (
    default_order,
    gauss_hermite,
    gaussian_pairing,
    hermite_derivative,
    hermite_eval,
    hermite_table,
    pairing_tables,
)


def test_low_degree_closed_forms():
    x = np.linspace(-2, 2, 9)
    assert np.allclose(hermite_eval(2, x), (x ** 2 - 1) / math.sqrt(2))
    assert np.allclose(hermite_eval(3, x), (x ** 3 - 3 * x) / math.sqrt(6))
    assert hermite_eval(2, 0.0) == pytest.approx(-1 / math.sqrt(2))


def test_orthonormality_q64():
    gram = pairing_tables(20, 0, gauss_hermite(64))[0]
    assert np.max(np.abs(gram - np.eye(21))) <= 1e-10


def test_rule_moments():
    rule = gauss_hermite(10)
    x = rule.nodes
    assert rule.integrate(np.ones_like(x)) == pytest.approx(1.0, abs=1e-14)
    assert rule.integrate(x ** 2) == pytest.approx(1.0, abs=1e-13)
    assert rule.integrate(x ** 4) == pytest.approx(3.0, abs=1e-12)
    assert rule.integrate(x ** 3) == pytest.approx(0.0, abs=1e-13)
    assert np.allclose(rule.nodes, -rule.nodes[::-1])


def test_rule_agrees_with_numpy_hermite_e():
    nodes, weights = np.polynomial.hermite_e.hermegauss(30)
    rule = gauss_hermite(30)
    assert np.allclose(np.sort(rule.nodes), np.sort(nodes), atol=1e-12)
    assert np.allclose(rule.weights[np.argsort(rule.nodes)],
                       (weights / weights.sum())[np.argsort(nodes)], atol=1e-14)


def test_pairing_values():
    rule = gauss_hermite(default_order(4))
    # xi P_{n-1} = sqrt(n) P_n + sqrt(n-1) P_{n-2}
    assert gaussian_pairing(3, 2, 1, rule) == pytest.approx(math.sqrt(3))
    assert gaussian_pairing(1, 2, 1, rule) == pytest.approx(math.sqrt(2))
    assert gaussian_pairing(0, 0, 2, rule) == pytest.approx(1.0)
    assert gaussian_pairing(2, 0, 2, rule) == pytest.approx(math.sqrt(2))


def test_precision_guard():
    rule = gauss_hermite(3)
    gaussian_pairing(2, 2, 1, rule)  # degree 5 is exact
    with pytest.raises(PrecisionError):
        gaussian_pairing(3, 2, 1, rule)
    with pytest.raises(PrecisionError):
        pairing_tables(3, 1, rule)


def test_order_limits():
    with pytest.raises(ConfigError):
        gauss_hermite(0)
    with pytest.raises(ConfigError):
        gauss_hermite(201)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 15), st.floats(-4, 4))
def test_derivative_matches_finite_difference(k, x):
    h = 1e-5
    fd = (hermite_eval(k, x + h) - hermite_eval(k, x - h)) / (2 * h)
    assert abs(fd - hermite_derivative(k, x)) <= 1e-6 * max(1.0, abs(fd))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 18), st.floats(-5, 5))
def test_recurrence_residual(k, x):
    P = hermite_table(k + 1, x)
    lhs = math.sqrt(k + 1) * P[k + 1]
    rhs = x * P[k] - math.sqrt(k) * P[k - 1]
    scale = abs(x * P[k]) + math.sqrt(k) * abs(P[k - 1]) + 1e-300
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 2))
def test_pairing_table_matches_single_entries(i, j, p):
    rule = gauss_hermite(default_order(6))
    tab = pairing_tables(6, 2, rule)
    assert tab[p, i, j] == pytest.approx(gaussian_pairing(i, j, p, rule), abs=1e-14)
    assert tab[p, i, j] == pytest.approx(tab[p, j, i], abs=1e-13)
