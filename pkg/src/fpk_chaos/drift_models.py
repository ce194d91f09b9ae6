"""Drift operators and the chaos coupling coefficients they induce.

For a drift ``B`` the coupling between Hermite functionals is

    C[n, m] = int <B(x), D_x H_n(x)> H_m(x) mu(dx)

and ``<B(x), D_x H_n> = sum_j sigma_j <B(x), e_j> dH_n/dxi_j``. Each of the three
supported drifts makes ``<B(x), e_j>`` a polynomial of degree <= 2 in the
Gaussian coordinates of ``x``, so every coefficient factorizes into
one-dimensional Gaussian pairings.

Closures for the field coefficients ``beta_l`` appearing in the nonlinear
drifts:

* ``substitute`` (default): ``beta_l = xi_l / sigma_l`` for retained modes
  ``l <= M``; modes ``l > M`` take the frozen values of ``base_field``.
* ``frozen``: every ``beta_l`` is taken from ``base_field`` and pulled out of
  the Gaussian integral.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, NumericalError
from .hermite import QuadratureRule, gaussian_pairing, pairing_tables
from .multiindex import IndexSet
from .spectral_basis import (
    OperatorSpectrum,
    SpectralField,
    basis_matrix,
    composite_gauss_legendre,
    default_panels,
)

KINDS = ("heat", "fisher", "burgers")
CLOSURES = ("substitute", "frozen")
SPARSE_THRESHOLD = 3000


@dataclass(frozen=True)
class DriftModel:
    kind: str
    forcing: Callable | None = None
    base_field: SpectralField | None = None
    closure: str = "substitute"
    linear: bool = True  # Fisher: include the x term
    quadratic: bool = True  # Fisher: include the -x^2 term

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown drift kind {self.kind!r}")
        if self.closure not in CLOSURES:
            raise ConfigError(f"unknown closure {self.closure!r}")
        if self.kind == "heat":
            if self.forcing is None:
                raise ConfigError("heat drift needs a forcing function")
        elif self.forcing is not None:
            raise ConfigError(f"{self.kind} drift takes no forcing")

    @classmethod
    def heat(cls, forcing: Callable) -> DriftModel:
        return cls("heat", forcing=forcing)

    @classmethod
    def fisher(cls, base_field: SpectralField | None = None, **kw) -> DriftModel:
        return cls("fisher", base_field=base_field, **kw)

    @classmethod
    def burgers(cls, base_field: SpectralField | None = None, **kw) -> DriftModel:
        return cls("burgers", base_field=base_field, **kw)

    def drift(self, y: np.ndarray, dy: np.ndarray | None = None, xi=None) -> np.ndarray:
        """Pointwise value of ``B`` for a field sampled on a grid.

        Burgers needs the spatial derivative ``dy``; heat needs the sample
        points ``xi``.
        """
        if self.kind == "heat":
            return np.asarray(self.forcing(xi), dtype=float) * np.ones_like(y)
        if self.kind == "fisher":
            return (y if self.linear else 0.0) - (y * y if self.quadratic else 0.0)
        return y * dy


@dataclass(frozen=True)
class CoefficientMatrix:
    """``values[m, n] = C[n, m]``, ordered by ``index_set``; dense or CSR."""

    values: np.ndarray | sp.csr_matrix
    index_set: IndexSet

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.values)

    def dense(self) -> np.ndarray:
        return self.values.toarray() if self.is_sparse else np.asarray(self.values)


# ---------------------------------------------------------------------------
# one-dimensional spatial integrals


def forcing_inner_product(f: Callable, k: int, panels: int | None = None) -> float:
    """``int_0^1 f(xi) e_k(xi) dxi`` by composite Gauss-Legendre quadrature."""
    nodes, weights = composite_gauss_legendre(panels or default_panels(k))
    vals = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
    return float(basis_matrix(k, nodes)[k - 1] @ (weights * vals))


def forcing_coefficients(f: Callable, K: int, panels: int | None = None) -> np.ndarray:
    nodes, weights = composite_gauss_legendre(panels or default_panels(K))
    vals = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
    return basis_matrix(K, nodes) @ (weights * vals)


def _sine_moment(q):
    """``int_0^1 sin(q pi x) dx`` for integer arrays ``q``."""
    q = np.asarray(q)
    safe = np.where(q == 0, 1, q)
    return np.where(q == 0, 0.0, (1.0 - np.where(q % 2 == 0, 1.0, -1.0)) / (safe * np.pi))


def _sin_cos(j, p):
    """``int_0^1 sin(j pi x) cos(p pi x) dx``."""
    return 0.5 * (_sine_moment(j + p) + _sine_moment(j - p))


def _cos_cos(a, b):
    """``int_0^1 cos(a pi x) cos(b pi x) dx`` for integers."""
    a, b = np.asarray(a), np.asarray(b)
    return 0.5 * ((a == b).astype(float) + (a == -b).astype(float))


def triple_product(l, k, j):
    """``<e_l e_k, e_j>`` in closed form via product-to-sum identities."""
    l, k, j = (np.asarray(v) for v in (l, k, j))
    val = np.sqrt(2.0) * (_sin_cos(j, l - k) - _sin_cos(j, l + k))
    return float(val) if val.ndim == 0 else val


def derivative_triple_product(l, k, j):
    """``<e_l e_k' + e_l' e_k, e_j> = -<e_l e_k, e_j'>`` in closed form."""
    l, k, j = (np.asarray(v) for v in (l, k, j))
    val = -np.sqrt(2.0) * j * np.pi * (_cos_cos(l - k, j) - _cos_cos(l + k, j))
    return float(val) if val.ndim == 0 else val


def _mode_grid(K: int, M: int):
    l = np.arange(1, K + 1)[:, None, None]
    k = np.arange(1, K + 1)[None, :, None]
    j = np.arange(1, M + 1)[None, None, :]
    return l, k, j


# ---------------------------------------------------------------------------
# drift polynomials in the Gaussian coordinates


def _base_beta(model: DriftModel, M: int) -> np.ndarray:
    if model.base_field is None:
        return np.zeros(M)
    if model.base_field.K < M:
        raise ConfigError(f"base field has {model.base_field.K} modes, need at least M={M}")
    return np.asarray(model.base_field.beta)


def drift_polynomials(model: DriftModel, spectrum: OperatorSpectrum) -> list[dict]:
    """Coefficients of ``sigma_j <B(x), e_j>`` as polynomials in ``xi_1..xi_M``.

    Returns one dict per direction ``j``; keys are sorted tuples of
    ``(coordinate, power)`` pairs (the empty tuple is the constant term).
    """
    M = spectrum.M
    sig = spectrum.sigma
    polys = [dict() for _ in range(M)]

    def add(j, key, value):
        if value != 0.0:
            polys[j][key] = polys[j].get(key, 0.0) + sig[j] * value

    if model.kind == "heat":
        fk = forcing_coefficients(model.forcing, M)
        for j in range(M):
            add(j, (), fk[j])
        return polys

    beta = _base_beta(model, M)
    K = beta.size
    l, k, j = _mode_grid(K, M)
    if model.kind == "fisher":
        weights = -triple_product(l, k, j) if model.quadratic else np.zeros((K, K, M))
        lin = 1.0 if model.linear else 0.0
    else:
        weights = 0.5 * derivative_triple_product(l, k, j)
        lin = 0.0

    if model.closure == "frozen":
        const = np.einsum("l,k,lkj->j", beta, beta, weights) + lin * beta[:M]
        for jj in range(M):
            add(jj, (), const[jj])
        return polys

    inv_sig = 1.0 / sig
    for jj in range(M):
        add(jj, ((jj, 1),), lin * inv_sig[jj])
        w = weights[:, :, jj]
        for a in range(M):
            for b in range(a, M):
                coef = w[a, b] * inv_sig[a] * inv_sig[b]
                if a == b:
                    add(jj, ((a, 2),), coef)
                else:
                    add(jj, ((a, 1), (b, 1)), coef + w[b, a] * inv_sig[a] * inv_sig[b])
            if K > M:
                add(jj, ((a, 1),), inv_sig[a] * ((w[a, M:] + w[M:, a]) @ beta[M:]))
        if K > M:
            add(jj, (), beta[M:] @ w[M:, M:] @ beta[M:])
    return polys


# ---------------------------------------------------------------------------
# single-entry evaluation (readable path, used as the oracle)


def _entry(n, m, polys, rule: QuadratureRule) -> float:
    n, m = tuple(n), tuple(m)
    total = 0.0
    for j, poly in enumerate(polys):
        if n[j] == 0:
            continue
        for key in sorted(poly):
            powers = dict(key)
            prod = poly[key]
            for c in range(len(n)):
                p = powers.get(c, 0)
                if c == j:
                    prod *= np.sqrt(n[j]) * gaussian_pairing(n[j] - 1, m[j], p, rule)
                else:
                    prod *= gaussian_pairing(n[c], m[c], p, rule)
                if prod == 0.0:
                    break
            total += prod
    return total


def heat_coefficient(n, m, spectrum: OperatorSpectrum, f, rule: QuadratureRule) -> float:
    """Heat coupling ``sum_k sigma_k sqrt(n_k) <f, e_k> int P_{m_k} P_{n_k-1} prod_{i!=k} int P_{n_i} P_{m_i}``.

    ``f`` is the forcing callable or its precomputed sine coefficients.
    """
    n, m = tuple(n), tuple(m)
    fk = forcing_coefficients(f, spectrum.M) if callable(f) else np.asarray(f, dtype=float)
    total = 0.0
    for k in range(spectrum.M):
        if n[k] == 0:
            continue
        term = spectrum.sigma[k] * np.sqrt(n[k]) * fk[k] * gaussian_pairing(m[k], n[k] - 1, 0, rule)
        for i in range(spectrum.M):
            if i != k:
                term *= gaussian_pairing(n[i], m[i], 0, rule)
        total += term
    return total


def heat_coefficient_closed_form(n, m, spectrum: OperatorSpectrum, fk) -> float:
    """Delta shortcut: ``sigma_k sqrt(n_k) f_k`` when ``m = n - unit_k``, else 0."""
    diff = np.asarray(n) - np.asarray(m)
    if diff.min() < 0 or diff.sum() != 1:
        return 0.0
    k = int(np.argmax(diff))
    return float(spectrum.sigma[k] * np.sqrt(n[k]) * fk[k])


def fisher_coefficient(n, m, spectrum: OperatorSpectrum, base_field: SpectralField | None,
                       rule: QuadratureRule, *, closure: str = "substitute",
                       linear: bool = True, quadratic: bool = True) -> float:
    model = DriftModel.fisher(base_field, closure=closure, linear=linear, quadratic=quadratic)
    return _entry(n, m, drift_polynomials(model, spectrum), rule)


def burgers_coefficient(n, m, spectrum: OperatorSpectrum, base_field: SpectralField | None,
                        rule: QuadratureRule, *, closure: str = "substitute") -> float:
    model = DriftModel.burgers(base_field, closure=closure)
    return _entry(n, m, drift_polynomials(model, spectrum), rule)


# ---------------------------------------------------------------------------
# vectorized assembly


def _heat_triplets(index_set: IndexSet, spectrum: OperatorSpectrum, fk, cols: np.ndarray):
    A = index_set.array[cols]
    rows_out, cols_out, vals_out = [], [], []
    for k in range(index_set.M):
        sel = A[:, k] > 0
        if not sel.any() or fk[k] == 0.0:
            continue
        m = A[sel].copy()
        m[:, k] -= 1
        pos = index_set.lookup(m)
        ok = pos >= 0
        rows_out.append(pos[ok])
        cols_out.append(cols[sel][ok])
        vals_out.append(spectrum.sigma[k] * np.sqrt(A[sel][ok, k]) * fk[k])
    return rows_out, cols_out, vals_out


def _poly_triplets(index_set: IndexSet, polys, tables: np.ndarray, cols: np.ndarray):
    A = index_set.array[cols]
    N = index_set.N
    rows_out, cols_out, vals_out = [], [], []
    for j, poly in enumerate(polys):
        has_deriv = A[:, j] > 0
        if not has_deriv.any():
            continue
        An = A[has_deriv]
        cn = cols[has_deriv]
        for key in sorted(poly):
            coef = poly[key]
            powers = dict(key)
            coords = sorted(set(powers) | {j})
            base = {c: An[:, c] - (1 if c == j else 0) for c in coords}
            offsets = [range(-powers.get(c, 0), powers.get(c, 0) + 1, 2) for c in coords]
            for combo in itertools.product(*offsets):
                m = An.copy()
                valid = np.ones(len(An), dtype=bool)
                for c, off in zip(coords, combo):
                    m[:, c] = base[c] + off
                    valid &= (m[:, c] >= 0) & (m[:, c] <= N)
                if not valid.any():
                    continue
                mv = m[valid]
                pos = index_set.lookup(mv)
                ok = pos >= 0
                if not ok.any():
                    continue
                nv = An[valid][ok]
                mv = mv[ok]
                val = np.full(len(mv), coef)
                for c in coords:
                    p = powers.get(c, 0)
                    if c == j:
                        val = val * np.sqrt(nv[:, j]) * tables[p, nv[:, j] - 1, mv[:, j]]
                    else:
                        val = val * tables[p, nv[:, c], mv[:, c]]
                rows_out.append(pos[ok])
                cols_out.append(cn[valid][ok])
                vals_out.append(val)
    return rows_out, cols_out, vals_out


def _reduce_triplets(parts, D: int, sparse: bool):
    rows = np.concatenate([r for part in parts for r in part[0]] or [np.zeros(0, np.int64)])
    cols = np.concatenate([c for part in parts for c in part[1]] or [np.zeros(0, np.int64)])
    vals = np.concatenate([v for part in parts for v in part[2]] or [np.zeros(0)])
    # stable sort keeps the per-entry summation order fixed
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if len(rows):
        start = np.r_[True, (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])]
        idx = np.flatnonzero(start)
        sums = np.add.reduceat(vals, idx)
        rows, cols, vals = rows[idx], cols[idx], sums
    if sparse:
        return sp.csr_matrix((vals, (rows, cols)), shape=(D, D))
    out = np.zeros((D, D))
    out[rows, cols] = vals
    return out


def assemble_coefficients(model: DriftModel, index_set: IndexSet, spectrum: OperatorSpectrum,
                          rule: QuadratureRule, *, workers: int = 1,
                          sparse: bool | None = None) -> CoefficientMatrix:
    """All coupling coefficients of ``model`` over ``index_set``.

    Columns (the ``n`` of ``C[n, m]``) are split into ``workers`` contiguous
    chunks. Each entry only receives contributions computed for its own column,
    in a fixed order, so the result does not depend on ``workers``.
    """
    if index_set.M != spectrum.M:
        raise ConfigError(f"index set has M={index_set.M}, spectrum has M={spectrum.M}")
    D = len(index_set)
    if sparse is None:
        sparse = D > SPARSE_THRESHOLD

    if model.kind == "heat":
        fk = forcing_coefficients(model.forcing, spectrum.M)

        def work(cols):
            return _heat_triplets(index_set, spectrum, fk, cols)
    else:
        polys = drift_polynomials(model, spectrum)
        tables = pairing_tables(index_set.N, 2, rule)

        def work(cols):
            return _poly_triplets(index_set, polys, tables, cols)

    chunks = [c for c in np.array_split(np.arange(D), max(1, workers)) if len(c)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    values = _reduce_triplets(parts, D, sparse)
    if not sparse and not np.all(np.isfinite(values)):
        raise NumericalError("non-finite coupling coefficient")
    return CoefficientMatrix(values, index_set)


def heat_sparsity_ok(coeffs: CoefficientMatrix) -> bool:
    """True when every nonzero ``[m, n]`` has ``m = n - unit_k`` for some k."""
    A = coeffs.index_set.array
    rows, cols = np.nonzero(coeffs.dense())
    diff = A[cols] - A[rows]
    return bool(np.all((diff.min(axis=1) >= 0) & (diff.sum(axis=1) == 1)))
