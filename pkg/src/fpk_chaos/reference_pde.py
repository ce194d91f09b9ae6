"""Finite-difference method-of-lines solver for the deterministic mean-field PDEs

    y_t = nu y_xx + B(y),    y(t, 0) = y(t, 1) = 0,

with ``B = f`` (heat), ``y(1 - y)`` (Fisher-KPP) or ``(y^2)_x / 2`` (Burgers,
conservative flux form), and surface comparison utilities.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .drift_models import DriftModel
from .errors import ConfigError, NumericalError, StabilityError
from .field_solution import SolutionSurface

SCHEMES = ("imex", "rk4")
CFL_LIMIT = 0.25


@dataclass(frozen=True)
class FDGrid:
    """``P`` interior points, spacing ``1/(P+1)``, time step ``dt``.

    ``imex``: Crank-Nicolson diffusion with second-order Adams-Bashforth
    for the drift. ``rk4``: fully explicit, guarded by ``nu dt / h^2 <= 0.25``.
    """

    P: int
    dt: float
    scheme: str = "imex"

    def __post_init__(self):
        if self.P < 1:
            raise ConfigError(f"need at least one interior point, got P={self.P}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")

    @property
    def h(self) -> float:
        return 1.0 / (self.P + 1)

    @property
    def points(self) -> np.ndarray:
        """All grid abscissae including both boundaries."""
        return np.linspace(0.0, 1.0, self.P + 2)

    def check_cfl(self, nu: float):
        ratio = nu * self.dt / self.h ** 2
        if self.scheme == "rk4" and ratio > CFL_LIMIT:
            raise StabilityError(
                f"explicit scheme needs nu*dt/h^2 <= {CFL_LIMIT}, got {ratio:.4g}; "
                "reduce dt or use scheme=imex")


def _laplacian(P: int, h: float) -> sp.csc_matrix:
    main = -2.0 * np.ones(P)
    off = np.ones(P - 1)
    return (sp.diags([off, main, off], [-1, 0, 1]) / h ** 2).tocsc()


def _same_step(a: float, b: float) -> bool:
    # span / steps differs by a few ulps between output intervals
    return abs(a - b) <= 1e-9 * b


def _rhs_drift(model: DriftModel, h: float, xi: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Drift on interior values ``y`` (boundaries are zero)."""
    if model.kind == "heat":
        f = np.asarray(model.forcing(xi), dtype=float) * np.ones_like(xi)
        return lambda y: f
    if model.kind == "fisher":
        return lambda y: model.drift(y)

    def burgers(y):
        flux = 0.5 * np.concatenate(([0.0], y, [0.0])) ** 2
        return (flux[2:] - flux[:-2]) / (2.0 * h)
    return burgers


def solve_deterministic(model: DriftModel, nu: float, X0, grid: FDGrid, times,
                        meta: dict | None = None) -> SolutionSurface:
    """Integrate from ``X0`` (callable or values on ``grid.points``) and sample at ``times``."""
    if not nu > 0:
        raise ConfigError(f"nu must be positive, got {nu}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ConfigError("times must be non-negative and strictly increasing")
    grid.check_cfl(nu)
    x = grid.points
    y0 = np.asarray(X0(x) if callable(X0) else X0, dtype=float)
    if y0.shape != x.shape:
        raise ConfigError(f"initial values have shape {y0.shape}, grid has {x.shape}")
    scale = max(1.0, float(np.max(np.abs(y0))))
    if abs(y0[0]) > 1e-12 * scale or abs(y0[-1]) > 1e-12 * scale:
        raise ConfigError("initial condition must vanish at both boundaries")

    h, P = grid.h, grid.P
    L = nu * _laplacian(P, h)
    drift = _rhs_drift(model, h, x[1:-1])
    y = y0[1:-1].copy()
    out = np.zeros((times.size, x.size))
    t = 0.0
    if times[0] == 0.0:
        out[0, 1:-1] = y

    if grid.scheme == "imex":
        eye = sp.identity(P, format="csc")
        lu = None
        lu_dt = None
        prev = None

        def step(y, dt):
            nonlocal lu, lu_dt, prev
            if lu is None or not _same_step(lu_dt, dt):
                lu = spla.splu((eye - 0.5 * dt * L).tocsc())
                lu_dt = dt
            b = drift(y)
            # Euler start, then AB2; a shortened step restarts the history
            expl = b if prev is None or not _same_step(prev[1], dt) else 1.5 * b - 0.5 * prev[0]
            prev = (b, dt)
            return lu.solve(y + 0.5 * dt * (L @ y) + dt * expl)
    else:
        def step(y, dt):
            def rhs(v):
                return L @ v + drift(v)
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    for i, target in enumerate(times):
        if target == 0.0:
            continue
        span = target - t
        steps = max(1, int(np.ceil(span / grid.dt - 1e-9)))
        dt = span / steps
        for _ in range(steps):
            y = step(y, dt)
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"reference solution became non-finite before t={target}")
        t = target
        out[i, 1:-1] = y
    info = {"model": model.kind, "nu": nu, "P": P, "dt": grid.dt, "scheme": grid.scheme}
    info.update(meta or {})
    return SolutionSurface(times, x, out, info)


def steady_state_heat(f: Callable, nu: float, P: int) -> tuple[np.ndarray, np.ndarray]:
    """Direct tridiagonal solve of ``-nu y'' = f``, ``y(0) = y(1) = 0``."""
    grid = FDGrid(P, 1.0)
    x = grid.points
    rhs = np.asarray(f(x[1:-1]), dtype=float)
    y = np.zeros(x.size)
    y[1:-1] = spla.spsolve(-nu * _laplacian(P, grid.h), rhs)
    return x, y


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class ErrorReport:
    l2: float
    sup: float
    times: np.ndarray
    per_time: np.ndarray


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Weights of the trapezoid rule normalized to total mass 1 (1 for a single point)."""
    if x.size == 1:
        return np.ones(1)
    w = np.zeros(x.size)
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w / w.sum()


def resample(surface: SolutionSurface, times, points) -> np.ndarray:
    """Linear interpolation of a surface in space, then in time."""
    times = np.asarray(times, dtype=float)
    points = np.asarray(points, dtype=float)
    by_space = np.array([np.interp(points, surface.points, row) for row in surface.values])
    if surface.times.size == 1:
        return np.repeat(by_space, times.size, axis=0)
    return np.array([np.interp(times, surface.times, col) for col in by_space.T]).T


def compare(surface: SolutionSurface, reference: SolutionSurface) -> ErrorReport:
    """Relative space-time L2 and sup discrepancy of ``surface`` against ``reference``.

    Both are evaluated on the grid of ``surface`` (restricted to times inside
    the reference's range); the reference is linearly interpolated when the
    grids differ. Norms use trapezoid weights of unit total mass. ``per_time``
    holds the relative spatial L2 at each time (absolute when the reference
    vanishes there).
    """
    lo, hi = reference.times[0], reference.times[-1]
    tol = 1e-12 * max(1.0, abs(hi))
    keep = (surface.times >= lo - tol) & (surface.times <= hi + tol)
    if not np.any(keep):
        raise ConfigError("surfaces have disjoint time ranges")
    times = surface.times[keep]
    a = surface.values[keep]
    b = resample(reference, times, surface.points)
    wx = _trapezoid_weights(surface.points)
    wt = _trapezoid_weights(times)
    diff2 = (a - b) ** 2 @ wx
    ref2 = b ** 2 @ wx
    den = float(ref2 @ wt)
    num = float(diff2 @ wt)
    l2 = np.sqrt(num / den) if den > 0 else np.sqrt(num)
    per_time = np.where(ref2 > 0, np.sqrt(diff2 / np.where(ref2 > 0, ref2, 1.0)), np.sqrt(diff2))
    sup = float(np.max(np.abs(a - b)))
    return ErrorReport(float(l2), sup, times, per_time)
