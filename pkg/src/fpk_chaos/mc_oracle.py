"""Monte-Carlo estimate of ``E[u_0(X_t)]`` for the stochastic equation

    dX = (A X + B(X)) dt + dW

truncated to ``K`` sine modes, ``d beta_k = (-lambda_k beta_k + <B(x), e_k>) dt + dW_k``.

The heat drift is integrated with the exact Ornstein-Uhlenbeck transition;
the nonlinear drifts use Euler-Maruyama. Every path draws from its own
generator keyed by ``(seed, path)``, so results do not depend on batching or
on the number of workers, and extending ``paths`` leaves earlier paths intact.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .drift_models import DriftModel, forcing_coefficients
from .errors import ConfigError, NumericalError, StabilityError
from .field_solution import SolutionSurface
from .initial_conditions import Functional
from .spectral_basis import (
    OperatorSpectrum,
    SpectralField,
    basis_matrix,
    composite_gauss_legendre,
    default_panels,
    project_field,
    sine_integral,
)

BLOWUP = 1e6
BATCH = 256


@dataclass(frozen=True)
class McConfig:
    model: DriftModel
    nu: float
    X0: SpectralField | Callable
    K: int = 32
    dt: float = 1e-3
    paths: int = 10_000
    seed: int = 0
    noise: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.paths < 1:
            raise ConfigError(f"paths must be >= 1, got {self.paths}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        lam_K = self.nu * math.pi ** 2 * self.K ** 2
        if self.dt * lam_K >= 2.0:
            raise StabilityError(
                f"dt*lambda_K = {self.dt * lam_K:.4g} must be < 2 (K={self.K}, dt={self.dt})")

    def initial_beta(self) -> np.ndarray:
        field = self.X0 if isinstance(self.X0, SpectralField) else project_field(self.X0, self.K)
        beta = np.zeros(self.K)
        n = min(self.K, field.K)
        beta[:n] = field.beta[:n]
        return beta


def path_normals(seed: int, path: int, shape) -> np.ndarray:
    """Standard normals of one path; a pure function of ``(seed, path)``."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(path,)))
    return rng.standard_normal(shape)


class _BlowUp(Exception):
    def __init__(self, row: int, step: int, of: int):
        super().__init__(row, step, of)
        self.row, self.step, self.of = row, step, of


class _Stepper:
    """Advance a batch of mode vectors ``beta`` (paths x K) between output times."""

    def __init__(self, cfg: McConfig):
        self.cfg = cfg
        spec = OperatorSpectrum.build(cfg.nu, cfg.K)
        self.lam = spec.lambda_A
        model = cfg.model
        if model.kind == "heat":
            self.fk = forcing_coefficients(model.forcing, cfg.K)
            return
        nodes, weights = composite_gauss_legendre(default_panels(cfg.K))
        S = basis_matrix(cfg.K, nodes)
        self.S = S
        if model.kind == "fisher":
            self.proj = (S * weights).T
        else:
            k = np.arange(1, cfg.K + 1)[:, None]
            dS = math.sqrt(2.0) * math.pi * k * np.cos(k * math.pi * nodes[None, :])
            # <(x^2)'/2, e_k> = -<x^2, e_k'>/2
            self.proj = -0.5 * (dS * weights).T

    def drift(self, beta: np.ndarray) -> np.ndarray:
        x = beta @ self.S
        if self.cfg.model.kind == "fisher":
            return self.cfg.model.drift(x) @ self.proj
        return (x * x) @ self.proj

    def steps_for(self, span: float) -> int:
        return max(1, math.ceil(span / self.cfg.dt - 1e-9))

    def advance(self, beta: np.ndarray, span: float, noise: np.ndarray | None) -> np.ndarray:
        """``noise`` has shape (paths, steps, K) or is None."""
        cfg = self.cfg
        n = self.steps_for(span)
        h = span / n
        if cfg.model.kind == "heat":
            decay = np.exp(-self.lam * h)
            mean_shift = (1.0 - decay) / self.lam * self.fk
            std = np.sqrt((1.0 - decay ** 2) / (2.0 * self.lam))
            for s in range(n):
                beta = decay * beta + mean_shift
                if noise is not None:
                    beta = beta + std * noise[:, s]
            return beta
        sq = math.sqrt(h)
        for s in range(n):
            beta = beta + h * (-self.lam * beta + self.drift(beta))
            if noise is not None:
                beta = beta + sq * noise[:, s]
            if not np.all(np.abs(beta) <= BLOWUP):
                bad = int(np.argmax(np.any(~(np.abs(beta) <= BLOWUP), axis=1)))
                raise _BlowUp(bad, s + 1, n)
        return beta


def _functional_matrix(kind: str, grid: np.ndarray, K: int) -> np.ndarray:
    """Columns map ``beta`` to the functional value at each output column."""
    if kind == "point":
        return basis_matrix(K, grid)
    return np.repeat(sine_integral(K)[:, None], grid.size, axis=1)


def simulate_mean(cfg: McConfig, functional: Functional | str, times, grid=None) -> SolutionSurface:
    """Empirical mean of the functional along the paths, with standard errors.

    For the point functional each grid point ``z`` gives ``E[X_t(z)]``; the
    integral functional is replicated across the grid columns.
    """
    kind = functional.kind if isinstance(functional, Functional) else str(functional)
    if kind not in ("point", "integral"):
        raise ConfigError(f"unknown functional {kind!r}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ConfigError("times must be non-negative and strictly increasing")
    if grid is None:
        grid = np.array([functional.z]) if kind == "point" else np.array([0.5])
    grid = np.asarray(grid, dtype=float)

    stepper = _Stepper(cfg)
    beta0 = cfg.initial_beta()
    F = _functional_matrix(kind, grid, cfg.K)
    spans = np.diff(np.concatenate(([0.0], times)))
    steps = [stepper.steps_for(s) if s > 0 else 0 for s in spans]
    total_steps = sum(steps)
    samples = np.empty((cfg.paths, times.size, grid.size))

    def run(lo: int, hi: int):
        noise = None
        if cfg.noise:
            noise = np.stack([path_normals(cfg.seed, p, (total_steps, cfg.K)) for p in range(lo, hi)])
        beta = np.repeat(beta0[None], hi - lo, axis=0)
        offset = 0
        for i, span in enumerate(spans):
            if span > 0:
                chunk = None if noise is None else noise[:, offset:offset + steps[i]]
                try:
                    beta = stepper.advance(beta, span, chunk)
                except _BlowUp as exc:
                    t0 = times[i] - span
                    raise NumericalError(
                        f"path blow-up: |beta| exceeded {BLOWUP:g} on path {lo + exc.row} "
                        f"between t={t0:g} and t={times[i]:g} (sub-step {exc.step}/{exc.of})") from None
                offset += steps[i]
            samples[lo:hi, i] = beta @ F

    bounds = [(lo, min(lo + BATCH, cfg.paths)) for lo in range(0, cfg.paths, BATCH)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            list(pool.map(lambda b: run(*b), bounds))
    else:
        for b in bounds:
            run(*b)

    mean = np.sum(samples, axis=0) / cfg.paths
    if cfg.paths > 1:
        var = np.sum((samples - mean) ** 2, axis=0) / (cfg.paths - 1)
        stderr = np.sqrt(var / cfg.paths)
    else:
        stderr = np.full(mean.shape, np.nan)
    meta = {"model": cfg.model.kind, "nu": cfg.nu, "K": cfg.K, "dt": cfg.dt,
            "paths": cfg.paths, "seed": cfg.seed, "functional": kind}
    return SolutionSurface(times, grid, mean, meta, stderr)
