import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpk_chaos.drift_models import (
    DriftModel,
    assemble_coefficients,
    burgers_coefficient,
    derivative_triple_product,
    drift_polynomials,
    fisher_coefficient,
    forcing_inner_product,
    heat_coefficient,
    heat_coefficient_closed_form,
    heat_sparsity_ok,
    triple_product,
)
from fpk_chaos.errors import ConfigError
from fpk_chaos.hermite import default_order, gauss_hermite
from fpk_chaos.multiindex import enumerate_indices
from fpk_chaos.spectral_basis import (
    OperatorSpectrum,
    SpectralField,
    basis_eval,
    composite_gauss_legendre,
    project_field,
)

NODES, WEIGHTS = composite_gauss_legendre(128)


def quad(f):
    return float(np.sum(WEIGHTS * f(NODES)))


def e(k):
    return lambda x: math.sqrt(2) * np.sin(k * math.pi * x)


def de(k):
    return lambda x: math.sqrt(2) * k * math.pi * np.cos(k * math.pi * x)


def test_forcing_inner_product():
    assert forcing_inner_product(lambda x: 0 * x, 3) == 0.0
    exact = math.sqrt(2) * (math.pi ** 2 - 6) / math.pi ** 3
    assert forcing_inner_product(lambda x: x ** 3, 1) == pytest.approx(exact, abs=1e-10)
    assert exact == pytest.approx(0.17649, abs=1e-5)
    assert forcing_inner_product(e(2), 2) == pytest.approx(1.0, abs=1e-12)


def test_triple_product_examples():
    assert triple_product(1, 1, 2) == pytest.approx(0.0, abs=1e-15)
    assert triple_product(1, 1, 1) == pytest.approx(8 * math.sqrt(2) / (3 * math.pi), abs=1e-14)
    assert triple_product(1, 2, 3) == pytest.approx(quad(lambda x: e(1)(x) * e(2)(x) * e(3)(x)), abs=1e-12)


def test_derivative_triple_product_examples():
    assert derivative_triple_product(1, 1, 1) == pytest.approx(0.0, abs=1e-14)
    assert derivative_triple_product(1, 1, 2) == pytest.approx(math.sqrt(2) * math.pi, abs=1e-13)


@pytest.mark.parametrize("l,k,j", list(itertools.product(range(1, 9), repeat=3))[::7])
def test_closed_forms_vs_quadrature(l, k, j):
    qt = quad(lambda x: e(l)(x) * e(k)(x) * e(j)(x))
    qd = quad(lambda x: (e(l)(x) * de(k)(x) + de(l)(x) * e(k)(x)) * e(j)(x))
    by_parts = -quad(lambda x: e(l)(x) * e(k)(x) * de(j)(x))
    assert triple_product(l, k, j) == pytest.approx(qt, abs=1e-10)
    assert derivative_triple_product(l, k, j) == pytest.approx(qd, abs=1e-10)
    assert derivative_triple_product(l, k, j) == pytest.approx(by_parts, abs=1e-10)


def test_heat_coefficient_examples():
    spec = OperatorSpectrum.build(0.1, 2)
    rule = gauss_hermite(8)
    f = lambda x: x ** 3  # noqa: E731
    assert heat_coefficient((1, 0), (0, 0), spec, lambda x: 0 * x, rule) == 0.0
    assert heat_coefficient((1, 1), (1, 1), spec, f, rule) == pytest.approx(0.0, abs=1e-14)
    val = heat_coefficient((1, 0), (0, 0), spec, f, rule)
    assert val == pytest.approx(math.sqrt(0.2) * math.pi * 0.176495, rel=1e-5)
    assert val == pytest.approx(0.2480, abs=5e-4)


def test_heat_quadrature_equals_closed_form():
    s = enumerate_indices(3, 3)
    spec = OperatorSpectrum.build(0.1, 3)
    rule = gauss_hermite(default_order(3))
    fk = np.array([forcing_inner_product(lambda x: x ** 3, k) for k in (1, 2, 3)])
    for n in s:
        for m in s:
            q = heat_coefficient(n, m, spec, fk, rule)
            assert q == pytest.approx(heat_coefficient_closed_form(n, m, spec, fk), abs=1e-9)


def test_heat_assembly_sparsity():
    s = enumerate_indices(4, 3)
    spec = OperatorSpectrum.build(0.1, 4)
    C = assemble_coefficients(DriftModel.heat(lambda x: x ** 3), s, spec, gauss_hermite(10))
    assert heat_sparsity_ok(C)
    assert C.values.shape == (len(s), len(s))
    zero = assemble_coefficients(DriftModel.heat(lambda x: 0 * x), s, spec, gauss_hermite(10))
    assert not np.any(zero.dense())


def test_fisher_linear_part():
    spec = OperatorSpectrum.build(0.1, 2)
    rule = gauss_hermite(10)
    for n in [(1, 0), (2, 1), (3, 2)]:
        c = fisher_coefficient(n, n, spec, None, rule, quadratic=False)
        assert c == pytest.approx(sum(n), abs=1e-12)
    assert fisher_coefficient((3, 0), (1, 0), spec, None, rule, quadratic=False) == pytest.approx(
        math.sqrt(6), abs=1e-12)
    assert fisher_coefficient((3, 0), (2, 0), spec, None, rule, quadratic=False) == pytest.approx(0.0, abs=1e-13)


def test_frozen_zero_base_gives_zero():
    spec = OperatorSpectrum.build(0.1, 3)
    rule = gauss_hermite(10)
    zero = SpectralField(np.zeros(8))
    for n, m in [((1, 0, 0), (0, 0, 0)), ((2, 1, 0), (1, 1, 0)), ((1, 1, 1), (1, 1, 1))]:
        assert fisher_coefficient(n, m, spec, zero, rule, closure="frozen", linear=False) == 0.0
        assert burgers_coefficient(n, m, spec, zero, rule, closure="frozen") == 0.0


def test_burgers_zero_index_and_single_mode(sine_field):
    spec = OperatorSpectrum.build(0.1, 3)
    rule = gauss_hermite(10)
    for m in enumerate_indices(3, 2):
        assert burgers_coefficient((0, 0, 0), m, spec, sine_field, rule) == 0.0
    spec1 = OperatorSpectrum.build(0.1, 1)
    s1 = enumerate_indices(1, 4)
    C = assemble_coefficients(DriftModel.burgers(SpectralField([0.7])), s1, spec1, gauss_hermite(12))
    assert np.allclose(C.dense(), 0.0, atol=1e-14)


def test_fisher_matrix_not_symmetric(sine_field):
    s = enumerate_indices(3, 3)
    spec = OperatorSpectrum.build(0.1, 3)
    C = assemble_coefficients(DriftModel.fisher(sine_field), s, spec, gauss_hermite(10)).dense()
    assert not np.allclose(C, C.T)


def test_vectorized_matches_entrywise(sine_field):
    s = enumerate_indices(3, 3)
    spec = OperatorSpectrum.build(0.1, 3)
    rule = gauss_hermite(10)
    base = project_field(lambda x: np.sin(np.pi * x) + 0.3 * np.sin(2 * np.pi * x), 16)
    for kind, fn in (("fisher", fisher_coefficient), ("burgers", burgers_coefficient)):
        C = assemble_coefficients(DriftModel(kind, base_field=base), s, spec, rule).dense()
        for i, n in enumerate(s):
            for j, m in enumerate(s):
                assert C[j, i] == pytest.approx(fn(n, m, spec, base, rule), abs=1e-12)


@pytest.mark.parametrize("kind", ["heat", "fisher", "burgers"])
def test_parallel_assembly_bit_identical(kind, sine_field):
    s = enumerate_indices(5, 4)
    spec = OperatorSpectrum.build(0.1, 5)
    model = DriftModel.heat(lambda x: x ** 3) if kind == "heat" else DriftModel(kind, base_field=sine_field)
    rule = gauss_hermite(12)
    a = assemble_coefficients(model, s, spec, rule, workers=1).dense()
    b = assemble_coefficients(model, s, spec, rule, workers=3).dense()
    c = assemble_coefficients(model, s, spec, rule, workers=4, sparse=True).dense()
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)


def test_model_validation():
    with pytest.raises(ConfigError):
        DriftModel("wave")
    with pytest.raises(ConfigError):
        DriftModel("heat")
    with pytest.raises(ConfigError):
        DriftModel("fisher", forcing=lambda x: x)
    with pytest.raises(ConfigError):
        DriftModel.fisher(closure="median")


def test_short_base_field_rejected():
    spec = OperatorSpectrum.build(0.1, 4)
    with pytest.raises(ConfigError):
        drift_polynomials(DriftModel.fisher(SpectralField([1.0, 0.0])), spec)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_frozen_fisher_constant_is_projected_drift(beta):
    """Frozen closure: sigma_j <B(x0), e_j> with B(x) = x - x^2."""
    base = SpectralField(beta)
    spec = OperatorSpectrum.build(0.1, 3)
    polys = drift_polynomials(DriftModel.fisher(base, closure="frozen"), spec)

    def x0(x):
        return sum(b * basis_eval(k + 1, x) for k, b in enumerate(beta))

    for j in range(3):
        expected = spec.sigma[j] * quad(lambda x: (x0(x) - x0(x) ** 2) * e(j + 1)(x))
        assert polys[j].get((), 0.0) == pytest.approx(expected, abs=1e-10)
        assert set(polys[j]) <= {()}

