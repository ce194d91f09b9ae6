"""Orthonormal probabilists' Hermite polynomials and Gauss-Hermite quadrature.

All polynomials are normalized in L^2(R, mu_1) with mu_1 the standard
Gaussian measure, so ``int P_i P_j dmu_1 = delta_ij``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, PrecisionError

MAX_QUADRATURE_ORDER = 200


def hermite_table(kmax: int, x) -> np.ndarray:
    """Values ``P_0(x), ..., P_kmax(x)`` stacked along a new leading axis.

    Uses the recurrence ``sqrt(k+1) P_{k+1} = x P_k - sqrt(k) P_{k-1}``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = x
    for k in range(1, kmax):
        out[k + 1] = (x * out[k] - np.sqrt(k) * out[k - 1]) / np.sqrt(k + 1)
    return out


def hermite_eval(k: int, x):
    """Orthonormal Hermite polynomial ``P_k`` at ``x`` (scalar or array)."""
    if k < 0:
        raise ValueError(f"degree must be non-negative, got {k}")
    val = hermite_table(k, x)[k]
    return float(val) if np.ndim(val) == 0 else val


def hermite_derivative(k: int, x):
    """``P_k'(x) = sqrt(k) P_{k-1}(x)``; identically zero for ``k = 0``."""
    if k < 0:
        raise ValueError(f"degree must be non-negative, got {k}")
    if k == 0:
        val = np.zeros_like(np.asarray(x, dtype=float))
    else:
        val = np.sqrt(k) * hermite_table(k - 1, x)[k - 1]
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the standard Gaussian probability measure."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def exact_degree(self) -> int:
        return 2 * self.order - 1

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def gauss_hermite(Q: int) -> QuadratureRule:
    """Golub-Welsch construction from the Jacobi matrix of the recurrence.

    The Jacobi matrix of the orthonormal family has zero diagonal and
    off-diagonal ``sqrt(k)``; its eigenvalues are the nodes and the squared
    first eigenvector components are the weights.
    """
    if Q < 1:
        raise ConfigError(f"quadrature order must be >= 1, got {Q}")
    if Q > MAX_QUADRATURE_ORDER:
        raise ConfigError(f"quadrature order {Q} exceeds stability cap {MAX_QUADRATURE_ORDER}")
    if Q == 1:
        nodes, weights = np.zeros(1), np.ones(1)
    else:
        off = np.sqrt(np.arange(1, Q, dtype=float))
        nodes, vecs = eigh_tridiagonal(np.zeros(Q), off)
        weights = vecs[0] ** 2
        # enforce exact symmetry of the rule
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
        weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights)


def default_order(N: int) -> int:
    """Rule size that integrates every pairing met by a degree-``N`` index set."""
    return 2 * (N + 2)


def _pairing_table(rule: QuadratureRule, kmax: int, pmax: int) -> np.ndarray:
    P = hermite_table(kmax, rule.nodes)
    w = rule.weights
    table = np.empty((pmax + 1, kmax + 1, kmax + 1))
    for p in range(pmax + 1):
        wp = w * rule.nodes ** p
        table[p] = (P * wp) @ P.T
    table.setflags(write=False)
    return table


def gaussian_pairing(i: int, j: int, moment_power: int, rule: QuadratureRule) -> float:
    """``int P_i(xi) P_j(xi) xi**p dmu_1(xi)`` by quadrature.

    Raises PrecisionError if the rule is not exact for degree ``i + j + p``.
    """
    if min(i, j, moment_power) < 0:
        raise ValueError("degrees and moment power must be non-negative")
    need = i + j + moment_power
    if need > rule.exact_degree:
        raise PrecisionError(
            f"rule of order {rule.order} is exact to degree {rule.exact_degree}, pairing needs {need}")
    x = rule.nodes
    vals = hermite_table(max(i, j), x)
    return rule.integrate(vals[i] * vals[j] * x ** moment_power)


def pairing_tables(kmax: int, pmax: int, rule: QuadratureRule) -> np.ndarray:
    """All pairings ``table[p, i, j]`` for ``i, j <= kmax`` and ``p <= pmax``.

    Same quadrature as :func:`gaussian_pairing`, batched.
    """
    need = 2 * kmax + pmax
    if need > rule.exact_degree:
        raise PrecisionError(
            f"rule of order {rule.order} is exact to degree {rule.exact_degree}, tables need {need}")
    return _pairing_table(rule, kmax, pmax)
