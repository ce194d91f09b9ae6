"""Run configuration: a flat ``key = value`` text format with ``#`` comments."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable

import numpy as np

from .drift_models import CLOSURES, KINDS
from .errors import ConfigError
from .hermite import MAX_QUADRATURE_ORDER, default_order
from .multiindex import SCHEMES
from .reference_pde import SCHEMES as REF_SCHEMES

FISHER_EDGE = 1.0 / np.cosh(2.5) ** 2


def _sine(x):
    return np.sin(np.pi * np.asarray(x, dtype=float))


def _fisher_sech(x):
    # shifted so the profile vanishes at both walls
    return 1.0 / np.cosh(5.0 * (np.asarray(x, dtype=float) - 0.5)) ** 2 - FISHER_EDGE


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _cubic(x):
    return np.asarray(x, dtype=float) ** 3


INITIAL_CONDITIONS: dict[str, Callable] = {
    "heat_sine": _sine,
    "fisher_sech": _fisher_sech,
    "zero": _zero,
}
DEFAULT_IC = {"heat": "heat_sine", "fisher": "fisher_sech", "burgers": "heat_sine"}
FORCINGS: dict[str, Callable] = {"cubic": _cubic, "zero": _zero}


@dataclass
class RunConfig:
    model: str = "heat"
    nu: float = 0.1
    N: int = 4
    M: int = 8
    scheme: str = "total"
    functional: str = "point"
    grid_points: int = 21
    t_final: float = 1.0
    output_times: int = 10
    quadrature_order: int = 0  # 0 selects 2(N+2)
    ic: str = ""  # empty selects the model default
    forcing: str = "cubic"
    closure: str = "substitute"
    base_modes: int = 32
    constants: str = "galerkin"
    solver: str = "eigen"
    ref_points: int = 199
    ref_dt: float = 1e-4
    ref_scheme: str = "imex"
    seed: int = 0
    paths: int = 10000
    dt: float = 1e-3
    mc_modes: int = 32
    workers: int = 1
    output_dir: str = "out"

    def __post_init__(self):
        self._coerce()
        if not self.ic:
            self.ic = DEFAULT_IC.get(self.model, "")
        if self.quadrature_order == 0:
            self.quadrature_order = default_order(self.N)
        self.validate()

    def _coerce(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                if f.type in ("int", int):
                    if isinstance(value, float) and not value.is_integer():
                        raise ValueError
                    value = int(value)
                elif f.type in ("float", float):
                    value = float(value)
                else:
                    value = str(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{f.name}: cannot interpret {value!r} as {f.type}") from None
            setattr(self, f.name, value)

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.model in KINDS, f"model must be one of {KINDS}, got {self.model!r}")
        need(np.isfinite(self.nu) and self.nu > 0, f"nu must be > 0, got {self.nu}")
        need(np.isfinite(self.t_final) and self.t_final > 0, f"t_final must be > 0, got {self.t_final}")
        for name in ("N", "M", "output_times", "quadrature_order", "base_modes",
                     "ref_points", "paths", "mc_modes", "workers"):
            need(getattr(self, name) >= 1, f"{name} must be >= 1, got {getattr(self, name)}")
        need(self.grid_points >= 2, f"grid_points must be >= 2, got {self.grid_points}")
        need(self.scheme in SCHEMES, f"scheme must be one of {SCHEMES}")
        need(self.functional in ("point", "integral"), "functional must be point or integral")
        need(self.ic in INITIAL_CONDITIONS, f"ic must be one of {sorted(INITIAL_CONDITIONS)}")
        need(self.forcing in FORCINGS, f"forcing must be one of {sorted(FORCINGS)}")
        need(self.closure in CLOSURES, f"closure must be one of {CLOSURES}")
        need(self.constants in ("galerkin", "collocation"), "constants must be galerkin or collocation")
        need(self.solver in ("eigen", "rk4"), "solver must be eigen or rk4")
        need(self.ref_scheme in REF_SCHEMES, f"ref_scheme must be one of {REF_SCHEMES}")
        need(self.base_modes >= self.M, "base_modes must be >= M")
        need(self.quadrature_order <= MAX_QUADRATURE_ORDER,
             f"quadrature_order must be <= {MAX_QUADRATURE_ORDER}")
        need(self.ref_dt > 0 and self.dt > 0, "time steps must be positive")
        need(0 <= self.seed < 2 ** 64, "seed must fit in 64 bits")

    # derived quantities

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.output_times + 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_points)

    @property
    def initial_condition(self) -> Callable:
        return INITIAL_CONDITIONS[self.ic]

    @property
    def forcing_function(self) -> Callable:
        return FORCINGS[self.forcing]

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


def _format(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def serialize(cfg: RunConfig) -> str:
    return "".join(f"{f.name} = {_format(getattr(cfg, f.name))}\n" for f in fields(cfg))


def parse(text: str) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return RunConfig(**values)


def load(path) -> RunConfig:
    return parse(Path(path).read_text())


def dump(cfg: RunConfig, path):
    Path(path).write_text(serialize(cfg))
