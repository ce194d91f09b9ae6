"""Evaluate Hermite functionals at fields and assemble solution surfaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .galerkin_ode import ModeTrajectories
from .hermite import hermite_table
from .multiindex import IndexSet
from .spectral_basis import OperatorSpectrum, SpectralField


@dataclass
class SolutionSurface:
    """``values[i, j]`` is the solution at ``times[i]`` and grid point ``points[j]``."""

    times: np.ndarray
    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    stderr: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.times.size, self.points.size):
            raise ConfigError(
                f"surface values have shape {self.values.shape}, "
                f"expected {(self.times.size, self.points.size)}")


def hermite_functional_eval(n, field: SpectralField, spectrum: OperatorSpectrum) -> float:
    """``H_n(x) = prod_i P_{n_i}(sigma_i beta_i)``."""
    n = tuple(n)
    if field.K < len(n):
        raise ConfigError(f"field has {field.K} modes, index needs {len(n)}")
    xi = spectrum.sigma[: len(n)] * field.beta[: len(n)]
    table = hermite_table(max(n) if n else 0, xi)
    return float(np.prod([table[d, i] for i, d in enumerate(n)]))


def hermite_functional_matrix(index_set: IndexSet, fields, spectrum: OperatorSpectrum) -> np.ndarray:
    """``out[p, n] = H_n(x_p)`` for a field or a sequence of fields."""
    single = isinstance(fields, SpectralField)
    fields = [fields] if single else list(fields)
    M = index_set.M
    A = index_set.array
    out = np.empty((len(fields), len(index_set)))
    cols = np.arange(M)
    for p, f in enumerate(fields):
        xi = f.gaussian_coordinates(spectrum)[:M]
        table = hermite_table(index_set.N if index_set.scheme == "total" else int(A.max(initial=0)), xi)
        out[p] = np.prod(table[A, cols], axis=1)
    return out


def evaluate_solution(traj: ModeTrajectories, index_set: IndexSet, field: SpectralField,
                      spectrum: OperatorSpectrum, t: float):
    """Truncated expansion ``sum_n u_n(t) H_n(x)``, linear in time between samples."""
    times = traj.times
    if t < times[0] - 1e-14 or t > times[-1] + 1e-14:
        raise ConfigError(f"t={t} outside sampled range [{times[0]}, {times[-1]}]")
    i = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 1))
    if i == times.size - 1:
        u = traj.values[i]
    else:
        w = (t - times[i]) / (times[i + 1] - times[i])
        u = (1 - w) * traj.values[i] + w * traj.values[i + 1]
    H = hermite_functional_matrix(index_set, field, spectrum)[0]
    val = np.tensordot(H, u, axes=(0, 0))
    return float(val) if np.ndim(val) == 0 else val


def build_surface(traj: ModeTrajectories, index_set: IndexSet, spectrum: OperatorSpectrum,
                  initial_field: SpectralField, grid: Sequence[float], functional: str,
                  meta: dict | None = None) -> SolutionSurface:
    """Surface of ``u(t, X_0)`` over the output times.

    For the point functional ``traj.values`` carries one column of initial data
    per grid point (shape ``(T, D, P)``). For the integral functional it is
    ``(T, D)`` and the resulting time series is copied into every grid column.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise ConfigError("grid must lie in [0, 1]")
    H = hermite_functional_matrix(index_set, initial_field, spectrum)[0]
    if functional == "point":
        if traj.values.ndim != 3 or traj.values.shape[2] != grid.size:
            raise ConfigError("point functional needs one trajectory per grid point")
        values = np.einsum("tdp,d->tp", traj.values, H)
    elif functional == "integral":
        series = traj.values.reshape(traj.times.size, -1) @ H
        values = np.repeat(series[:, None], grid.size, axis=1)
    else:
        raise ConfigError(f"unknown functional {functional!r}")
    return SolutionSurface(traj.times, grid, values, dict(meta or {}))
