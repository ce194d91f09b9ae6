"""Truncated Galerkin system ``du/dt = G u`` and its solvers.

``G[m, n] = -lambda_m delta_mn + C[n, m]``, i.e. ``du_m/dt = sum_n G[m, n] u_n``.

The primary solver diagonalizes ``G`` and maps complex-conjugate eigenpairs
``gamma +- i mu`` with eigenvector ``a + i b`` to the two real solutions
``e^{gamma t}(a cos mu t - b sin mu t)`` and ``e^{gamma t}(a sin mu t + b cos mu t)``.
Classical RK4 is the independent check and the fallback for defective or
badly conditioned eigenvector bases.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .drift_models import CoefficientMatrix
from .errors import ConfigError, NumericalError, SizingError, StepSizeError
from .initial_conditions import fix_constants
from .multiindex import IndexSet, ou_eigenvalues
from .spectral_basis import OperatorSpectrum

log = logging.getLogger(__name__)

COND_LIMIT = 1e12
RESIDUAL_TOL = 1e-8
EIGEN_DIM_CAP = 4000


@dataclass(frozen=True)
class GalerkinSystem:
    matrix: np.ndarray | sp.csr_matrix
    index_set: IndexSet
    spectrum: OperatorSpectrum

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)


@dataclass
class EigenSolution:
    """Real fundamental system built from an eigendecomposition.

    ``basis`` holds the real fundamental solutions at t = 0 column by column.
    ``role`` is 0 for a real eigenvalue, 1 for the cosine partner and 2 for the
    sine partner of a complex pair; ``rate``/``freq`` are the real and
    imaginary parts of the eigenvalue attached to each column.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: np.ndarray
    rate: np.ndarray
    freq: np.ndarray
    role: np.ndarray
    positions: np.ndarray
    constants: np.ndarray | None = None
    status: str = "ok"

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def weights(self, times, c: np.ndarray) -> np.ndarray:
        """Time-dependent multipliers of the basis columns, shape ``(T, D, ...)``."""
        t = np.asarray(times, dtype=float).reshape((-1,) + (1,) * c.ndim)
        decay = np.exp(self.rate.reshape((1, -1) + (1,) * (c.ndim - 1)) * t)
        ang = self.freq.reshape((1, -1) + (1,) * (c.ndim - 1)) * t
        cos, sin = np.cos(ang), np.sin(ang)
        w = decay * c[None]
        cos_cols = np.flatnonzero(self.role == 1)
        sin_cols = cos_cols + 1
        c1, c2 = c[cos_cols], c[sin_cols]
        w[:, cos_cols] = decay[:, cos_cols] * (c1 * cos[:, cos_cols] + c2 * sin[:, cos_cols])
        w[:, sin_cols] = decay[:, sin_cols] * (c2 * cos[:, cos_cols] - c1 * sin[:, cos_cols])
        return w

    def evaluate(self, times, c: np.ndarray | None = None) -> np.ndarray:
        """``u(t) = Phi(t) c`` at every requested time."""
        c = self.constants if c is None else np.asarray(c, dtype=float)
        w = self.weights(times, c)
        return np.einsum("dk,tk...->td...", self.basis, w)


@dataclass
class ModeTrajectories:
    """Sampled ``u_n(t)``: ``values[t, n]`` or ``values[t, n, p]`` for a batch of p initial vectors."""

    times: np.ndarray
    values: np.ndarray
    source: str
    status: str = "ok"
    info: dict = field(default_factory=dict)


def assemble_system(coefficients: CoefficientMatrix, index_set: IndexSet,
                    spectrum: OperatorSpectrum) -> GalerkinSystem:
    D = len(index_set)
    if coefficients.values.shape != (D, D):
        raise ConfigError(f"coefficient matrix has shape {coefficients.values.shape}, index set has {D}")
    if coefficients.index_set is not index_set and coefficients.index_set.indices != index_set.indices:
        raise ConfigError("coefficient matrix is ordered by a different index set")
    lam = ou_eigenvalues(index_set, spectrum.lambda_A)
    if coefficients.is_sparse:
        G = (coefficients.values - sp.diags(lam)).tocsr()
    else:
        G = np.array(coefficients.values, dtype=float)
        G[np.diag_indices(D)] -= lam
    return GalerkinSystem(G, index_set, spectrum)


def reachable(matrix, support: np.ndarray) -> np.ndarray:
    """Indices whose derivative depends, through any chain, on ``support``.

    Components outside this set start at zero and are only fed by components
    that stay zero, so they vanish for all time.
    """
    mask = np.asarray(support, dtype=bool).copy()
    adj = sp.csr_matrix(matrix, copy=True)
    adj.data = (adj.data != 0).astype(float)
    adj.eliminate_zeros()
    while True:
        new = mask | ((adj @ mask.astype(float)) > 0)
        if np.array_equal(new, mask):
            return mask
        mask = new


def eigen_decompose(matrix: np.ndarray, positions: np.ndarray | None = None) -> EigenSolution:
    G = np.asarray(matrix, dtype=float)
    D = G.shape[0]
    w, V = np.linalg.eig(G)
    w = np.asarray(w, dtype=complex)
    V = np.asarray(V, dtype=complex)
    basis = np.empty((D, D))
    rate = np.empty(D)
    freq = np.zeros(D)
    role = np.zeros(D, dtype=np.int8)
    i = 0
    while i < D:
        if w[i].imag == 0.0:
            basis[:, i] = V[:, i].real
            rate[i] = w[i].real
            i += 1
            continue
        if i + 1 >= D or not np.isclose(w[i + 1], np.conj(w[i]), rtol=1e-12, atol=0.0):
            raise NumericalError("complex eigenvalue without adjacent conjugate")
        # use the member with positive imaginary part
        j = i if w[i].imag > 0 else i + 1
        basis[:, i] = V[:, j].real
        basis[:, i + 1] = V[:, j].imag
        rate[i:i + 2] = w[j].real
        freq[i:i + 2] = w[j].imag
        role[i], role[i + 1] = 1, 2
        i += 2
    pos = np.arange(D) if positions is None else np.asarray(positions)
    return EigenSolution(w, V, basis, rate, freq, role, pos)


def eigen_residual(matrix: np.ndarray, eig: EigenSolution) -> float:
    """``max_i ||G V_i - eta_i V_i|| / (||G|| ||V_i||)``."""
    G = np.asarray(matrix, dtype=float)
    if G.size == 0:
        return 0.0
    R = G @ eig.eigenvectors - eig.eigenvectors * eig.eigenvalues[None, :]
    gnorm = np.linalg.norm(G, 2) or 1.0
    vn = np.linalg.norm(eig.eigenvectors, axis=0)
    return float(np.max(np.linalg.norm(R, axis=0) / (gnorm * vn)))


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigError("times must be a non-empty 1-D array")
    if times[0] != 0.0:
        raise ConfigError("times must start at 0")
    if np.any(np.diff(times) <= 0):
        raise ConfigError("times must be strictly increasing")
    return times


def _matrix_norm(G) -> float:
    if sp.issparse(G):
        return float(abs(G).sum(axis=1).max()) if G.nnz else 0.0
    return float(np.abs(G).sum(axis=1).max()) if G.size else 0.0


def default_rk4_step(system: GalerkinSystem, times) -> float:
    """Step well inside the RK4 stability region and no larger than the sampling gap."""
    times = np.asarray(times, dtype=float)
    gap = float(np.min(np.diff(times))) if times.size > 1 else 1.0
    norm = _matrix_norm(system.matrix)
    return min(gap, 0.5 / norm) if norm > 0 else gap


def solve_rk4(system: GalerkinSystem, u0, times, dt: float) -> ModeTrajectories:
    """Classical fourth-order Runge-Kutta sampled at ``times``."""
    times = _check_times(times)
    u = np.array(u0, dtype=float)
    if u.shape[0] != system.dim:
        raise ConfigError(f"initial vector has length {u.shape[0]}, system has {system.dim}")
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if times.size > 1 and dt > np.min(np.diff(times)) * (1 + 1e-12):
        raise ConfigError("dt exceeds the spacing of the output times")
    G = system.matrix
    out = np.empty((times.size,) + u.shape)
    out[0] = u
    for i in range(1, times.size):
        span = times[i] - times[i - 1]
        steps = max(1, math.ceil(span / dt - 1e-9))
        h = span / steps
        # overflow is reported below as a step-size error
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(steps):
                k1 = G @ u
                k2 = G @ (u + 0.5 * h * k1)
                k3 = G @ (u + 0.5 * h * k2)
                k4 = G @ (u + h * k3)
                u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise StepSizeError(f"RK4 state became non-finite before t={times[i]}; reduce dt={dt}")
        out[i] = u
    return ModeTrajectories(times, out, "rk4")


def _restrict(system: GalerkinSystem, keep: np.ndarray) -> np.ndarray:
    G = system.matrix
    if sp.issparse(G):
        return G[keep][:, keep].toarray()
    return np.asarray(G)[np.ix_(keep, keep)]


def solve_eigen(system: GalerkinSystem, u0, times, *, prune: bool = True,
                cond_limit: float = COND_LIMIT, fallback_dt: float | None = None) -> ModeTrajectories:
    """Solve by eigendecomposition with real handling of complex pairs.

    With ``prune`` the decomposition is restricted to the components that can
    be reached from the support of ``u0`` (see :func:`reachable`); the others
    are identically zero. ``u0`` may be ``(D,)`` or ``(D, P)``.
    """
    times = _check_times(times)
    u0 = np.asarray(u0, dtype=float)
    D = system.dim
    if u0.shape[0] != D:
        raise ConfigError(f"initial vector has length {u0.shape[0]}, system has {D}")

    if prune:
        support = np.any(u0.reshape(D, -1) != 0.0, axis=1)
        keep = np.flatnonzero(reachable(system.matrix, support))
    else:
        keep = np.arange(D)
    if keep.size > EIGEN_DIM_CAP:
        raise SizingError(f"eigen solve of dimension {keep.size} exceeds cap {EIGEN_DIM_CAP}")

    values = np.zeros((times.size,) + u0.shape)
    info = {"dimension": D, "solved_dimension": int(keep.size)}
    if keep.size == 0:
        return ModeTrajectories(times, values, "eigen", "ok", info)

    Gs = _restrict(system, keep)
    u0s = u0[keep]
    reason = None
    try:
        eig = eigen_decompose(Gs, keep)
        cond = np.linalg.cond(eig.basis)
        info["condition"] = float(cond)
        info["residual"] = eigen_residual(Gs, eig)
        if not np.isfinite(cond) or cond > cond_limit:
            reason = f"eigenvector basis condition {cond:.3e} exceeds {cond_limit:.0e}"
        elif info["residual"] > RESIDUAL_TOL:
            reason = f"eigen residual {info['residual']:.3e} exceeds {RESIDUAL_TOL:.0e}"
    except (np.linalg.LinAlgError, NumericalError) as exc:
        reason = f"eigendecomposition failed: {exc}"

    if reason is None:
        try:
            c, status = fix_constants(eig, u0s)
        except NumericalError as exc:
            reason = str(exc)
    if reason is not None:
        log.warning("eigen-fallback: %s", reason)
        sub = GalerkinSystem(Gs, system.index_set, system.spectrum)
        dt = fallback_dt or default_rk4_step(sub, times)
        traj = solve_rk4(sub, u0s, times, dt)
        values[:, keep] = traj.values
        info["reason"] = reason
        return ModeTrajectories(times, values, "rk4", "eigen-fallback", info)

    eig.constants, eig.status = c, status
    sol = eig.evaluate(times, c)
    if not np.all(np.isfinite(sol)):
        raise NumericalError("eigen solution overflowed")
    values[:, keep] = sol
    scale = max(1.0, float(np.max(np.abs(u0))))
    if np.max(np.abs(values[0] - u0)) > 1e-10 * scale:
        raise NumericalError("eigen solution does not reproduce the initial vector")
    info["eigen"] = eig
    return ModeTrajectories(times, values, "eigen", status, info)
