"""Invariant suites run by ``fpk-chaos validate``.

Each suite returns a :class:`SuiteResult`; none of them touches the disk.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .drift_models import (
    DriftModel,
    assemble_coefficients,
    derivative_triple_product,
    forcing_coefficients,
    heat_coefficient,
    heat_coefficient_closed_form,
    triple_product,
)
from .galerkin_ode import assemble_system, solve_eigen, solve_rk4
from .hermite import QuadratureRule, gauss_hermite, hermite_derivative, hermite_table, pairing_tables
from .initial_conditions import integral_functional_ic, point_functional_ic
from .multiindex import enumerate_indices, ou_eigenvalues
from .spectral_basis import (
    OperatorSpectrum,
    composite_gauss_legendre,
    covariance_kernel,
    mercer_kernel,
    project_field,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, checks: dict[str, tuple[float, float]]) -> SuiteResult:
    """``checks`` maps a label to ``(observed, limit)``; pass when every observed <= limit."""
    ok = all(obs <= lim for obs, lim in checks.values())
    detail = "; ".join(f"{k}={obs:.3e} (<= {lim:.0e})" for k, (obs, lim) in checks.items())
    return SuiteResult(name, ok, detail)


def hermite_suite(perturbation: float = 0.0, order: int = 64, kmax: int = 20) -> SuiteResult:
    """Orthonormality, derivative identity and recurrence residual.

    ``perturbation`` scales the quadrature weights by ``1 + perturbation`` as a
    negative control.
    """
    rule = gauss_hermite(order)
    if perturbation:
        rule = QuadratureRule(rule.nodes, rule.weights * (1.0 + perturbation))
    gram = pairing_tables(kmax, 0, rule)[0]
    ortho = float(np.max(np.abs(gram - np.eye(kmax + 1))))

    x = np.linspace(-3.0, 3.0, 41)
    h = 1e-5
    fd = 0.0
    for k in range(kmax + 1):
        approx = (hermite_table(k, x + h)[k] - hermite_table(k, x - h)[k]) / (2 * h)
        exact = hermite_derivative(k, x)
        fd = max(fd, float(np.max(np.abs(approx - exact) / np.maximum(1.0, np.abs(exact)))))

    P = hermite_table(kmax, x)
    rec = 0.0
    for k in range(1, kmax):
        lhs = np.sqrt(k + 1) * P[k + 1]
        rhs = x * P[k] - np.sqrt(k) * P[k - 1]
        scale = np.maximum(np.abs(lhs), np.abs(x * P[k])) + np.sqrt(k) * np.abs(P[k - 1])
        rec = max(rec, float(np.max(np.abs(lhs - rhs) / np.maximum(scale, 1e-300))))
    return _result("hermite", {"orthonormality": (ortho, 1e-10), "derivative": (fd, 1e-6),
                               "recurrence": (rec, 1e-12)})


def ou_suite(nu: float = 0.1, M: int = 3, N: int = 3) -> SuiteResult:
    """With no drift the system is ``diag(-lambda_n)`` and modes decay exponentially."""
    index_set = enumerate_indices(M, N)
    spec = OperatorSpectrum.build(nu, M)
    zero = DriftModel.heat(lambda x: np.zeros_like(x))
    coeffs = assemble_coefficients(zero, index_set, spec, gauss_hermite(2 * (N + 2)))
    system = assemble_system(coeffs, index_set, spec)
    lam = ou_eigenvalues(index_set, spec.lambda_A)
    diag_err = float(np.max(np.abs(system.dense() - np.diag(-lam))))
    u0 = np.linspace(1.0, 2.0, len(index_set))
    traj = solve_eigen(system, u0, [0.0, 1.0], prune=False)
    exact = u0 * np.exp(-lam)
    rel = float(np.max(np.abs(traj.values[-1] - exact) / exact))
    return _result("ou_spectral", {"matrix": (diag_err, 0.0), "decay": (rel, 1e-10)})


def green_suite(nu: float = 0.1, M: int = 2, N: int = 3, samples: int = 20, seed: int = 7) -> SuiteResult:
    """``int |D phi|^2 dmu = 2 sum_n lambda_n phi_n^2`` for random cylinder functions."""
    index_set = enumerate_indices(M, N)
    spec = OperatorSpectrum.build(nu, M)
    lam = ou_eigenvalues(index_set, spec.lambda_A)
    rule = gauss_hermite(N + 2)
    grids = np.meshgrid(*([rule.nodes] * M), indexing="ij")
    w = np.prod(np.meshgrid(*([rule.weights] * M), indexing="ij"), axis=0)
    tables = [hermite_table(N, g) for g in grids]
    A = index_set.array
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        phi = rng.standard_normal(len(index_set))
        grad2 = np.zeros_like(w)
        for k in range(M):
            dk = np.zeros_like(w)
            for c, n in zip(phi, A):
                if n[k] == 0:
                    continue
                term = c * np.sqrt(n[k]) * tables[k][n[k] - 1]
                for i in range(M):
                    if i != k:
                        term = term * tables[i][n[i]]
                dk += term
            grad2 += spec.sigma[k] ** 2 * dk ** 2
        lhs = float(np.sum(w * grad2))
        rhs = 2.0 * float(np.sum(lam * phi ** 2))
        worst = max(worst, abs(lhs - rhs) / rhs)
    return _result("green_identity", {"relative": (worst, 1e-8)})


def covariance_suite(terms: int = 1000) -> SuiteResult:
    g = np.linspace(0.0, 1.0, 21)
    closed = covariance_kernel(g[:, None], g[None, :], 1.0)
    series = mercer_kernel(g, g, 1.0, terms)
    sup = float(np.max(np.abs(closed - series)))
    centre = abs(covariance_kernel(0.5, 0.5, 1.0) - 0.125)
    return _result("covariance_kernel", {"mercer_sup": (sup, 2e-3), "centre": (centre, 1e-12)})


def heat_coefficient_suite(nu: float = 0.1, M: int = 3, N: int = 3) -> SuiteResult:
    index_set = enumerate_indices(M, N)
    spec = OperatorSpectrum.build(nu, M)
    f = lambda x: x ** 3  # noqa: E731
    fk = forcing_coefficients(f, M)
    rule = gauss_hermite(2 * (N + 2))
    worst = 0.0
    for n in index_set:
        for m in index_set:
            q = heat_coefficient(n, m, spec, f, rule)
            c = heat_coefficient_closed_form(n, m, spec, fk)
            worst = max(worst, abs(q - c))
    return _result("heat_coefficients", {"quadrature_vs_closed": (worst, 1e-9)})


def triple_product_suite(K: int = 8) -> SuiteResult:
    nodes, weights = composite_gauss_legendre(64)
    k = np.arange(1, K + 1)[:, None]
    s = np.sqrt(2.0) * np.sin(k * np.pi * nodes)
    ds = np.sqrt(2.0) * np.pi * k * np.cos(k * np.pi * nodes)
    worst_t = worst_d = 0.0
    for l in range(K):
        for kk in range(K):
            for j in range(K):
                qt = np.sum(weights * s[l] * s[kk] * s[j])
                qd = np.sum(weights * (ds[l] * s[kk] + s[l] * ds[kk]) * s[j])
                worst_t = max(worst_t, abs(qt - triple_product(l + 1, kk + 1, j + 1)))
                worst_d = max(worst_d, abs(qd - derivative_triple_product(l + 1, kk + 1, j + 1)))
    return _result("triple_products", {"triple": (worst_t, 1e-10), "derivative": (worst_d, 1e-10)})


def initial_condition_suite(nu: float = 0.1, M: int = 4, N: int = 3) -> SuiteResult:
    index_set = enumerate_indices(M, N)
    spec = OperatorSpectrum.build(nu, M)
    outside = index_set.degrees != 1
    pt = point_functional_ic(index_set, np.linspace(0, 1, 11), spec)
    it = integral_functional_ic(index_set, spec)
    leak = float(max(np.max(np.abs(pt[outside])), np.max(np.abs(it[outside]))))
    first = index_set.position((1,) + (0,) * (M - 1))
    val = point_functional_ic(index_set, 0.5, spec)[first]
    exact = np.sqrt(2.0) / (np.sqrt(2 * nu) * np.pi)
    return _result("initial_conditions", {"first_chaos_only": (leak, 0.0),
                                          "unit_value": (abs(val - exact), 1e-6)})


def solver_suite(nu: float = 0.1) -> SuiteResult:
    """Eigen vs RK4 (dt = 1e-4) on small experiment systems."""
    worst = 0.0
    X0 = project_field(lambda x: np.sin(np.pi * x), 32)
    cases = [
        (DriftModel.heat(lambda x: x ** 3), 3, 3),
        (DriftModel.fisher(base_field=X0), 3, 2),
        (DriftModel.burgers(base_field=X0), 3, 3),
    ]
    times = np.linspace(0.0, 1.0, 11)
    for model, M, N in cases:
        index_set = enumerate_indices(M, N)
        spec = OperatorSpectrum.build(nu, M)
        coeffs = assemble_coefficients(model, index_set, spec, gauss_hermite(2 * (N + 2)))
        system = assemble_system(coeffs, index_set, spec)
        u0 = point_functional_ic(index_set, 0.3, spec)
        a = solve_eigen(system, u0, times).values
        b = solve_rk4(system, u0, times, 1e-4).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _result("solver_agreement", {"eigen_vs_rk4": (worst, 1e-6)})


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "hermite": hermite_suite,
    "ou_spectral": ou_suite,
    "green_identity": green_suite,
    "covariance_kernel": covariance_suite,
    "heat_coefficients": heat_coefficient_suite,
    "triple_products": triple_product_suite,
    "initial_conditions": initial_condition_suite,
    "solver_agreement": solver_suite,
}


def run_validate(suites: dict[str, Callable[[], SuiteResult]] | None = None) -> list[SuiteResult]:
    results = []
    for name, suite in (suites or SUITES).items():
        try:
            res = suite()
        except Exception as exc:  # a crashing suite is a failing suite
            res = SuiteResult(name, False, f"{type(exc).__name__}: {exc}")
        results.append(replace(res, name=name))
    return results


def format_report(results: list[SuiteResult]) -> str:
    lines = [f"{r.name}: {'PASS' if r.passed else 'FAIL'} {r.detail}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"summary: {passed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
