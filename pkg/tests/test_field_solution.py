import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpk_chaos.config import INITIAL_CONDITIONS
from fpk_chaos.drift_models import DriftModel, assemble_coefficients
from fpk_chaos.errors import ConfigError
from fpk_chaos.field_solution import (
    SolutionSurface,
    build_surface,
    evaluate_solution,
    hermite_functional_eval,
    hermite_functional_matrix,
)
from fpk_chaos.galerkin_ode import ModeTrajectories, assemble_system, solve_eigen
from fpk_chaos.hermite import gauss_hermite, hermite_table
from fpk_chaos.initial_conditions import integral_functional_ic, point_functional_ic
from fpk_chaos.multiindex import enumerate_indices
from fpk_chaos.spectral_basis import OperatorSpectrum, SpectralField, field_eval, project_field

NU = 0.1


def test_hermite_functional_examples():
    spec = OperatorSpectrum.build(NU, 2)
    f = SpectralField([0.4, 1.0])
    assert hermite_functional_eval((0, 0), f, spec) == 1.0
    assert hermite_functional_eval((1, 0), f, spec) == pytest.approx(spec.sigma[0] * 0.4)
    assert hermite_functional_eval((2, 0), SpectralField([0.0, 1.0]), spec) == pytest.approx(-1 / math.sqrt(2))
    with pytest.raises(ConfigError):
        hermite_functional_eval((1, 0, 0), f, spec)


def test_matrix_matches_single_evaluation():
    s = enumerate_indices(3, 3)
    spec = OperatorSpectrum.build(NU, 3)
    fields = [SpectralField(np.random.default_rng(i).standard_normal(5)) for i in range(4)]
    H = hermite_functional_matrix(s, fields, spec)
    for p, f in enumerate(fields):
        assert np.allclose(H[p], [hermite_functional_eval(n, f, spec) for n in s])


def _traj(values, times=(0.0, 1.0)):
    return ModeTrajectories(np.asarray(times), np.asarray(values, dtype=float), "eigen")


def test_evaluate_trivial_cases():
    s = enumerate_indices(2, 2)
    spec = OperatorSpectrum.build(NU, 2)
    f = SpectralField([0.3, -0.2])
    assert evaluate_solution(_traj(np.zeros((2, len(s)))), s, f, spec, 0.5) == 0.0
    only0 = np.zeros((2, len(s)))
    only0[:, 0] = 2.5
    assert evaluate_solution(_traj(only0), s, f, spec, 0.7) == pytest.approx(2.5)
    with pytest.raises(ConfigError):
        evaluate_solution(_traj(only0), s, f, spec, 1.5)


def test_linear_interpolation_in_time():
    s = enumerate_indices(1, 0)
    spec = OperatorSpectrum.build(NU, 1)
    tr = _traj([[0.0], [2.0]])
    assert evaluate_solution(tr, s, SpectralField([0.0]), spec, 0.25) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_t0_reproduces_truncated_field(z, beta):
    s = enumerate_indices(3, 2)
    spec = OperatorSpectrum.build(NU, 3)
    f = SpectralField(beta)
    tr = _traj(point_functional_ic(s, z, spec)[None, :], times=(0.0,))
    assert evaluate_solution(tr, s, f, spec, 0.0) == pytest.approx(field_eval(f, z), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.floats(-3, 3))
def test_superposition(seed, a):
    s = enumerate_indices(2, 2)
    spec = OperatorSpectrum.build(NU, 2)
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, 3, len(s)))
    f = SpectralField(rng.standard_normal(2))
    times = (0.0, 0.5, 1.0)
    lhs = evaluate_solution(_traj(u + a * v, times), s, f, spec, 0.8)
    rhs = evaluate_solution(_traj(u, times), s, f, spec, 0.8) + a * evaluate_solution(_traj(v, times), s, f, spec, 0.8)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_orthonormality_by_sampling():
    s = enumerate_indices(2, 2)
    rng = np.random.default_rng(2024)
    xi = rng.standard_normal((100_000, 2))
    table = hermite_table(2, xi)  # (degree, samples, coordinate)
    H = np.array([table[n[0], :, 0] * table[n[1], :, 1] for n in s.array])
    prod = H[:, None, :] * H[None, :, :]
    mean = prod.mean(axis=-1)
    se = prod.std(axis=-1, ddof=1) / math.sqrt(xi.shape[0])
    assert np.all(np.abs(mean - np.eye(len(s))) <= 3 * se)


def _heat_surface(functional, X0, M=8, N=3):
    s = enumerate_indices(M, N)
    spec = OperatorSpectrum.build(NU, M)
    C = assemble_coefficients(DriftModel.heat(lambda x: 0 * x), s, spec, gauss_hermite(10))
    G = assemble_system(C, s, spec)
    grid = np.linspace(0, 1, 21)
    times = np.linspace(0, 1, 11)
    u0 = point_functional_ic(s, grid, spec) if functional == "point" else integral_functional_ic(s, spec)
    tr = solve_eigen(G, u0, times)
    return build_surface(tr, s, spec, X0, grid, functional, {"model": "heat"})


def test_heat_surface_decay(sine_field):
    surf = _heat_surface("point", sine_field)
    exact = np.exp(-NU * math.pi ** 2 * surf.times)[:, None] * np.sin(math.pi * surf.points)[None]
    assert np.allclose(surf.values, exact, atol=1e-12)
    assert surf.values[-1].max() == pytest.approx(0.3727, abs=1e-4)
    assert surf.values[:, 0].tolist() == [0.0] * surf.times.size
    assert surf.meta["model"] == "heat"


def test_heat_integral_series(sine_field):
    surf = _heat_surface("integral", sine_field)
    exact = (2 / math.pi) * np.exp(-NU * math.pi ** 2 * surf.times)
    assert np.allclose(surf.values, exact[:, None], atol=1e-12)


def test_t0_column_reproduces_initial_field():
    f = INITIAL_CONDITIONS["fisher_sech"]
    X0 = project_field(f, 32)
    surf = _heat_surface("point", X0, M=10, N=2)
    assert np.max(np.abs(surf.values[0] - f(surf.points))) <= 1e-3


def test_surface_shape_and_errors(sine_field):
    with pytest.raises(ConfigError):
        SolutionSurface([0.0, 1.0], [0.0, 0.5, 1.0], np.zeros((2, 2)))
    s = enumerate_indices(1, 1)
    spec = OperatorSpectrum.build(NU, 1)
    tr = _traj(np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        build_surface(tr, s, spec, sine_field, [0.0, 0.5], "point")
    with pytest.raises(ConfigError):
        build_surface(tr, s, spec, sine_field, [0.0, 1.5], "integral")
