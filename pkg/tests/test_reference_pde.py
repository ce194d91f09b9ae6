import math

import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from fpk_chaos.config import INITIAL_CONDITIONS
from fpk_chaos.drift_models import DriftModel
from fpk_chaos.errors import ConfigError, StabilityError
from fpk_chaos.field_solution import SolutionSurface
from fpk_chaos.reference_pde import FDGrid, compare, resample, solve_deterministic, steady_state_heat

NU = 0.1


def sine(x):
    return np.sin(math.pi * x)


def heat0():
    return DriftModel.heat(lambda x: 0 * x)


def exact_heat(t, x):
    return np.exp(-NU * math.pi ** 2 * np.asarray(t))[:, None] * sine(x)[None]


def test_heat_decay_matches_analytic():
    surf = solve_deterministic(heat0(), NU, sine, FDGrid(200, 1e-4), [0.0, 0.5, 1.0])
    err = np.max(np.abs(surf.values - exact_heat(surf.times, surf.points)))
    assert err <= 1e-4
    assert surf.values[-1].max() == pytest.approx(0.3727, abs=2e-4)


def test_second_order_in_space():
    errs = []
    for P in (19, 39, 79):
        surf = solve_deterministic(heat0(), NU, sine, FDGrid(P, 1e-4), [0.0, 1.0])
        errs.append(np.max(np.abs(surf.values - exact_heat(surf.times, surf.points))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_explicit_scheme_and_cfl_guard():
    surf = solve_deterministic(heat0(), NU, sine, FDGrid(49, 1e-4, "rk4"), [0.0, 1.0])
    assert np.max(np.abs(surf.values - exact_heat(surf.times, surf.points))) <= 1e-3
    with pytest.raises(StabilityError):
        solve_deterministic(heat0(), NU, sine, FDGrid(200, 1e-3, "rk4"), [0.0, 1.0])


def test_steady_state_with_cubic_forcing():
    f = lambda x: x ** 3  # noqa: E731
    x, y_bvp = steady_state_heat(f, NU, 99)
    # -nu y'' = x^3 with zero ends: y = (x - x^5) / (20 nu)
    assert np.max(np.abs(y_bvp - (x - x ** 5) / (20 * NU))) <= 1e-4
    surf = solve_deterministic(DriftModel.heat(f), NU, sine, FDGrid(99, 1e-2), [0.0, 20.0])
    end = surf.values[-1]
    h = 1 / 100
    residual = -NU * (end[2:] - 2 * end[1:-1] + end[:-2]) / h ** 2 - f(x[1:-1])
    assert np.max(np.abs(residual)) <= 1e-6
    assert np.max(np.abs(end - y_bvp)) <= 1e-6


@pytest.mark.parametrize("kind", ["heat", "fisher", "burgers"])
def test_boundary_columns_zero(kind):
    model = DriftModel.heat(lambda x: x ** 3) if kind == "heat" else DriftModel(kind)
    surf = solve_deterministic(model, NU, INITIAL_CONDITIONS["fisher_sech"], FDGrid(100, 1e-3),
                               np.linspace(0, 1, 5))
    assert np.all(surf.values[:, 0] == 0.0) and np.all(surf.values[:, -1] == 0.0)


def test_fisher_invariant_region():
    surf = solve_deterministic(DriftModel.fisher(), NU, INITIAL_CONDITIONS["fisher_sech"],
                               FDGrid(200, 1e-4), np.linspace(0, 2, 9))
    assert surf.values.min() >= 0.0
    assert surf.values.max() <= 1.05


def test_burgers_mass_changes_only_through_boundary_flux():
    grid = FDGrid(200, 1e-4)
    times = np.linspace(0, 1, 1001)
    y = solve_deterministic(DriftModel.burgers(), NU, sine, grid, times).values
    h = grid.h
    mass = h * y.sum(axis=1)
    # discrete boundary flux of nu y_xx + (y^2/2)_x with zero walls; interior sums telescope away
    a, b = y[:, 1], y[:, -2]
    flux = -NU * (a + b) / h + 0.25 * (b ** 2 - a ** 2)
    predicted = mass[0] + cumulative_trapezoid(flux, times, initial=0.0)
    drift_per_unit_time = np.max(np.abs(mass - predicted)) / times[-1]
    assert drift_per_unit_time <= 1e-6


def test_initial_condition_must_vanish():
    with pytest.raises(ConfigError):
        solve_deterministic(heat0(), NU, lambda x: 1 + 0 * x, FDGrid(10, 1e-3), [0.0, 1.0])
    with pytest.raises(ConfigError):
        FDGrid(0, 1e-3)
    with pytest.raises(ConfigError):
        FDGrid(10, 1e-3, "euler")


def test_compare_examples():
    t = np.linspace(0, 1, 5)
    x = np.linspace(0, 1, 11)
    ones = SolutionSurface(t, x, np.ones((5, 11)))
    same = compare(ones, ones)
    assert same.l2 == 0.0 and same.sup == 0.0
    eps = 1e-3
    shifted = compare(SolutionSurface(t, x, np.ones((5, 11)) + eps), ones)
    assert shifted.l2 == pytest.approx(eps, rel=1e-12)
    assert shifted.sup == pytest.approx(eps, rel=1e-9)


def test_compare_time_rescaled_decay_grows():
    t = np.linspace(0, 1, 11)
    x = np.linspace(0, 1, 21)
    ref = SolutionSurface(t, x, np.exp(-t)[:, None] * sine(x)[None])
    other = SolutionSurface(t, x, np.exp(-1.1 * t)[:, None] * sine(x)[None])
    per_time = compare(other, ref).per_time
    assert per_time[0] == 0.0
    assert np.all(np.diff(per_time) > 0)


def test_compare_interpolates_and_rejects_disjoint():
    t = np.linspace(0, 1, 11)
    fine = np.linspace(0, 1, 101)
    coarse = np.linspace(0, 1, 11)
    lin = lambda x: np.outer(1 + t, x)  # noqa: E731
    rep = compare(SolutionSurface(t, coarse, lin(coarse)), SolutionSurface(t, fine, lin(fine)))
    assert rep.l2 <= 1e-14
    assert np.allclose(resample(SolutionSurface(t, fine, lin(fine)), [0.05], [0.5]), [[0.525]])
    with pytest.raises(ConfigError):
        compare(SolutionSurface([2.0, 3.0], coarse, np.zeros((2, 11))), SolutionSurface(t, fine, lin(fine)))
