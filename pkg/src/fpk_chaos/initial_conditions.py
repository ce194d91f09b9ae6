"""Initial chaos coefficients ``u_m(0)`` for the two linear functionals, and
the constants of the eigen solution.

For a linear functional ``u_0(x) = <x, g>`` the only nonzero projections are on
first-order chaos: ``x = sum_k (xi_k / sigma_k) e_k`` gives
``u_m(0) = sum_k (<e_k, g> / sigma_k) int P_{m_k}(xi) xi dmu_1 prod_{i != k} int P_{m_i} dmu_1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, NumericalError
from .hermite import QuadratureRule, default_order, gauss_hermite, pairing_tables
from .multiindex import IndexSet
from .spectral_basis import OperatorSpectrum, SpectralField, basis_matrix, sine_integral

if TYPE_CHECKING:
    from .galerkin_ode import EigenSolution

FUNCTIONALS = ("point", "integral")
LSTSQ_TOL = 1e-8
PAIRING_ROUNDOFF = 1e-12


@dataclass(frozen=True)
class Functional:
    kind: str
    z: float | None = None

    def __post_init__(self):
        if self.kind not in FUNCTIONALS:
            raise ConfigError(f"unknown functional {self.kind!r}")
        if self.kind == "point" and (self.z is None or not 0.0 <= self.z <= 1.0):
            raise ConfigError(f"point functional needs z in [0, 1], got {self.z}")

    def __call__(self, field: SpectralField) -> float:
        from .spectral_basis import field_eval
        if self.kind == "point":
            return field_eval(field, self.z)
        return float(field.beta @ sine_integral(field.K))


def _first_chaos_factors(index_set: IndexSet, rule: QuadratureRule | None) -> np.ndarray:
    """``F[m, k] = int P_{m_k} xi dmu_1 * prod_{i != k} int P_{m_i} dmu_1`` via quadrature."""
    rule = rule or gauss_hermite(default_order(index_set.N))
    tab = pairing_tables(index_set.N, 1, rule)
    # exact values are 0 or 1; drop quadrature roundoff so the support is exact
    tab = np.where(np.abs(tab) < PAIRING_ROUNDOFF, 0.0, tab)
    first = tab[1, :, 0]
    zeroth = tab[0, :, 0]
    A = index_set.array
    g0 = zeroth[A]
    F = np.empty(A.shape)
    for k in range(index_set.M):
        others = np.prod(np.delete(g0, k, axis=1), axis=1)
        F[:, k] = first[A[:, k]] * others
    return F


def point_functional_ic(index_set: IndexSet, z, spectrum: OperatorSpectrum,
                        rule: QuadratureRule | None = None) -> np.ndarray:
    """``u_m(0)`` for ``u_0(x) = x(z)``; shape ``(D,)`` for scalar z, else ``(D, len(z))``."""
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any((zs < 0) | (zs > 1)):
        raise ConfigError("evaluation points must lie in [0, 1]")
    F = _first_chaos_factors(index_set, rule)
    E = basis_matrix(spectrum.M, zs) / spectrum.sigma[:, None]
    out = F @ E
    return out[:, 0] if np.ndim(z) == 0 else out


def integral_functional_ic(index_set: IndexSet, spectrum: OperatorSpectrum,
                           rule: QuadratureRule | None = None) -> np.ndarray:
    """``u_m(0)`` for ``u_0(x) = int_0^1 x``, summed over modes like the point case."""
    F = _first_chaos_factors(index_set, rule)
    return F @ (sine_integral(spectrum.M) / spectrum.sigma)


def initial_vector(functional: Functional, index_set: IndexSet, spectrum: OperatorSpectrum,
                   rule: QuadratureRule | None = None) -> np.ndarray:
    if functional.kind == "point":
        return point_functional_ic(index_set, functional.z, spectrum, rule)
    return integral_functional_ic(index_set, spectrum, rule)


def fix_constants(eigen: EigenSolution, u0) -> tuple[np.ndarray, str]:
    """Solve ``Phi(0) c = u0`` for the constants of the real fundamental system.

    LU with partial pivoting; falls back to least squares (status
    ``"least-squares"``) when the basis is numerically rank-deficient, and
    raises if even that leaves a residual above tolerance.
    """
    V = eigen.basis
    u0 = np.asarray(u0, dtype=float)
    if u0.shape[0] != V.shape[0]:
        raise ConfigError(f"initial vector has length {u0.shape[0]}, eigen basis has {V.shape[0]}")
    scale = max(float(np.max(np.abs(u0))), 1e-300) if u0.size else 1.0
    cond = np.linalg.cond(V) if V.size else 1.0
    if np.isfinite(cond) and cond < 1.0 / np.finfo(float).eps:
        c = sla.lu_solve(sla.lu_factor(V), u0)
        status = "ok"
    else:
        c, *_ = np.linalg.lstsq(V, u0, rcond=None)
        status = "least-squares"
    resid = float(np.max(np.abs(V @ c - u0))) if u0.size else 0.0
    if resid > LSTSQ_TOL * scale:
        raise NumericalError(f"constants leave residual {resid:.3e}; eigen basis is rank-deficient")
    return c, status


def collocation_constants(index_set: IndexSet, eigen: EigenSolution,
                          sample_fields: Sequence[SpectralField], target_values,
                          spectrum: OperatorSpectrum) -> np.ndarray:
    """Constants from matching ``u(0, x_p) = target_p`` at sample fields (least squares).

    The collocation matrix is ``[H_n(x_p)] Phi(0)`` restricted to the indices the
    eigen basis covers. Requires at least as many samples as constants and a
    full-rank matrix.
    """
    from .field_solution import hermite_functional_matrix

    targets = np.asarray(target_values, dtype=float)
    P = len(sample_fields)
    D = eigen.dim
    if P < D:
        raise ConfigError(f"{P} samples cannot determine {D} constants")
    if targets.shape[0] != P:
        raise ConfigError("one target value per sample field is required")
    H = hermite_functional_matrix(index_set, sample_fields, spectrum)[:, eigen.positions]
    A = H @ eigen.basis
    rank = np.linalg.matrix_rank(A)
    if rank < D:
        raise NumericalError(f"collocation matrix has rank {rank} < {D}; samples are degenerate")
    c, *_ = np.linalg.lstsq(A, targets, rcond=None)
    return c
