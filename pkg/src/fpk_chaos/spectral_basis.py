"""Dirichlet sine eigenbasis on [0, 1] and the spectra attached to it.

For ``A = nu d^2/dxi^2`` with zero boundary values, ``A e_k = -lambda_k e_k``
with ``e_k(xi) = sqrt(2) sin(k pi xi)`` and ``lambda_k = nu pi^2 k^2``. The
invariant Gaussian measure of the OU process ``dX = AX dt + dW`` has
covariance ``Lambda = (1/2)(-A)^{-1}``, so the Gaussian coordinates of a field
are ``xi_k = sigma_k beta_k`` with ``sigma_k = sqrt(2 lambda_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConfigError

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class OperatorSpectrum:
    nu: float
    M: int
    lambda_A: np.ndarray  # eigenvalues of -A
    lambda_cov: np.ndarray  # eigenvalues of Lambda
    sigma: np.ndarray  # eigenvalues of Lambda^{-1/2}

    @classmethod
    def build(cls, nu: float, M: int) -> OperatorSpectrum:
        if not nu > 0:
            raise ConfigError(f"nu must be positive, got {nu}")
        if M < 1:
            raise ConfigError(f"M must be >= 1, got {M}")
        k = np.arange(1, M + 1, dtype=float)
        lam = nu * np.pi ** 2 * k ** 2
        arrays = (lam, 1.0 / (2.0 * lam), np.sqrt(2.0 * nu) * np.pi * k)
        for a in arrays:
            a.setflags(write=False)
        return cls(float(nu), int(M), *arrays)

    def extended(self, K: int) -> OperatorSpectrum:
        """Same operator with ``K`` retained modes."""
        return OperatorSpectrum.build(self.nu, K)


@dataclass(frozen=True)
class SpectralField:
    """Field ``x = sum_k beta_k e_k`` stored by its first K sine coefficients."""

    beta: np.ndarray

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float).reshape(-1)
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @property
    def K(self) -> int:
        return self.beta.size

    def truncated(self, K: int) -> SpectralField:
        out = np.zeros(K)
        n = min(K, self.K)
        out[:n] = self.beta[:n]
        return SpectralField(out)

    def gaussian_coordinates(self, spectrum: OperatorSpectrum) -> np.ndarray:
        """``xi_k = sigma_k beta_k`` for the first ``spectrum.M`` modes."""
        if self.K < spectrum.M:
            raise ValueError(f"field has {self.K} modes, spectrum needs {spectrum.M}")
        return spectrum.sigma * self.beta[: spectrum.M]


def _sin_k_pi(k, xi):
    """``sin(k pi xi)`` evaluated by reflection on the right half so xi = 1 gives exactly 0."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    sign = np.where(np.mod(k, 2.0) == 1.0, 1.0, -1.0)
    return np.where(xi <= 0.5, np.sin(k * np.pi * xi), sign * np.sin(k * np.pi * (1.0 - xi)))


def basis_eval(k, xi):
    """``e_k(xi) = sqrt(2) sin(k pi xi)``; broadcasts over ``k`` and ``xi``."""
    val = SQRT2 * _sin_k_pi(k, xi)
    return float(val) if np.ndim(val) == 0 else val


def basis_matrix(K: int, xi) -> np.ndarray:
    """``(K, len(xi))`` array of ``e_k(xi_q)`` for ``k = 1..K``."""
    k = np.arange(1, K + 1, dtype=float)[:, None]
    return SQRT2 * _sin_k_pi(k, np.atleast_1d(np.asarray(xi, dtype=float))[None, :])


@lru_cache(maxsize=32)
def composite_gauss_legendre(panels: int, points: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def default_panels(K: int) -> int:
    return max(64, 4 * K)


def project_field(x: Callable, K: int, panels: int | None = None) -> SpectralField:
    """Sine coefficients ``beta_k = int_0^1 x(xi) e_k(xi) dxi`` for ``k <= K``."""
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    nodes, weights = composite_gauss_legendre(panels or default_panels(K))
    values = np.asarray(x(nodes), dtype=float) * np.ones_like(nodes)
    return SpectralField(basis_matrix(K, nodes) @ (weights * values))


def field_eval(field: SpectralField, xi):
    """Synthesis ``sum_{k<=K} beta_k e_k(xi)``."""
    val = field.beta @ basis_matrix(field.K, xi)
    return float(val[0]) if np.ndim(xi) == 0 else val


def covariance_kernel(xi, xi_prime, nu: float):
    """Kernel of ``Lambda = (1/2)(-nu Delta)^{-1}`` with Dirichlet boundaries.

    ``(1/nu) * (1/2) [xi (1 - xi') - (xi - xi') 1{xi' <= xi}]``, which is the
    symmetric ``min(xi, xi')(1 - max(xi, xi')) / (2 nu)``.
    """
    a = np.asarray(xi, dtype=float)
    b = np.asarray(xi_prime, dtype=float)
    val = 0.5 * (a * (1.0 - b) - (a - b) * (b <= a)) / nu
    return float(val) if np.ndim(val) == 0 else val


def mercer_kernel(xi, xi_prime, nu: float, K: int):
    """Truncated eigen-series ``sum_{k<=K} e_k(xi) e_k(xi') / (2 nu pi^2 k^2)``."""
    spec = OperatorSpectrum.build(nu, K)
    ea = basis_matrix(K, xi)
    eb = basis_matrix(K, xi_prime)
    val = np.einsum("ka,k,kb->ab", ea, spec.lambda_cov, eb)
    if np.ndim(xi) == 0 and np.ndim(xi_prime) == 0:
        return float(val[0, 0])
    return val


def sine_integral(K: int) -> np.ndarray:
    """``int_0^1 e_k`` for ``k = 1..K``: ``2 sqrt(2) / (k pi)`` for odd k, else 0."""
    k = np.arange(1, K + 1)
    return np.where(k % 2 == 1, 2.0 * SQRT2 / (k * np.pi), 0.0)
