"""End-to-end runners and the on-disk surface and metrics formats."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, serialize
from .drift_models import DriftModel, assemble_coefficients
from .errors import ConfigError
from .field_solution import SolutionSurface, build_surface
from .galerkin_ode import (
    GalerkinSystem,
    ModeTrajectories,
    assemble_system,
    default_rk4_step,
    eigen_decompose,
    reachable,
    solve_eigen,
    solve_rk4,
)
from .hermite import gauss_hermite
from .initial_conditions import (
    collocation_constants,
    integral_functional_ic,
    point_functional_ic,
)
from .mc_oracle import McConfig, simulate_mean
from .multiindex import IndexSet, enumerate_indices
from .reference_pde import ErrorReport, FDGrid, resample, solve_deterministic
from .spectral_basis import (
    OperatorSpectrum,
    SpectralField,
    basis_matrix,
    project_field,
    sine_integral,
)


@dataclass
class Problem:
    cfg: RunConfig
    index_set: IndexSet
    spectrum: OperatorSpectrum
    model: DriftModel
    X0: SpectralField


def drift_model(cfg: RunConfig, base_field: SpectralField | None = None) -> DriftModel:
    if cfg.model == "heat":
        return DriftModel.heat(cfg.forcing_function)
    return DriftModel(cfg.model, base_field=base_field, closure=cfg.closure)


def build_problem(cfg: RunConfig) -> Problem:
    X0 = project_field(cfg.initial_condition, cfg.base_modes)
    index_set = enumerate_indices(cfg.M, cfg.N, cfg.scheme)
    spectrum = OperatorSpectrum.build(cfg.nu, cfg.M)
    return Problem(cfg, index_set, spectrum, drift_model(cfg, X0), X0)


def assemble(problem: Problem) -> GalerkinSystem:
    cfg = problem.cfg
    rule = gauss_hermite(cfg.quadrature_order)
    coeffs = assemble_coefficients(problem.model, problem.index_set, problem.spectrum, rule,
                                   workers=cfg.workers)
    return assemble_system(coeffs, problem.index_set, problem.spectrum)


def initial_data(problem: Problem) -> np.ndarray:
    """``(D, grid)`` for the point functional, ``(D,)`` for the integral."""
    cfg = problem.cfg
    rule = gauss_hermite(cfg.quadrature_order)
    if cfg.functional == "point":
        return point_functional_ic(problem.index_set, cfg.grid, problem.spectrum, rule)
    return integral_functional_ic(problem.index_set, problem.spectrum, rule)


def collocation_samples(problem: Problem, count: int) -> list[SpectralField]:
    """Fields around the initial condition: Gaussian coordinates ``xi(X0) + eta``, ``eta ~ N(0, I)``."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=problem.cfg.seed, spawn_key=(1,)))
    sig = problem.spectrum.sigma
    centre = problem.X0.truncated(problem.spectrum.M).beta * sig
    xi = centre[None, :] + rng.standard_normal((count, sig.size))
    return [SpectralField(row / sig) for row in xi]


def solve_collocation(problem: Problem, system: GalerkinSystem, times) -> ModeTrajectories:
    """Constants fitted to ``u_0(x_p)`` at sampled fields instead of projected initial data.

    The fit is done on the components reachable from first-order chaos, which
    holds the projection of every linear functional.
    """
    cfg = problem.cfg
    first = np.zeros(system.dim, dtype=bool)
    first[problem.index_set.first_chaos()] = True
    keep = np.flatnonzero(reachable(system.matrix, first))
    G = system.matrix
    Gs = G[keep][:, keep].toarray() if hasattr(G, "toarray") else np.asarray(G)[np.ix_(keep, keep)]
    eig = eigen_decompose(Gs, keep)
    samples = collocation_samples(problem, 2 * keep.size)
    M = problem.spectrum.M
    if cfg.functional == "point":
        E = basis_matrix(M, cfg.grid)
        targets = np.array([f.beta @ E for f in samples])
    else:
        targets = np.array([f.beta @ sine_integral(M) for f in samples])
    c = collocation_constants(problem.index_set, eig, samples, targets, problem.spectrum)
    values = np.zeros((len(times), system.dim) + targets.shape[1:])
    values[:, keep] = eig.evaluate(times, c)
    return ModeTrajectories(np.asarray(times), values, source="collocation",
                            info={"solved_dimension": int(keep.size)})


def run_spectral(cfg: RunConfig) -> SolutionSurface:
    problem = build_problem(cfg)
    system = assemble(problem)
    times = cfg.times
    if cfg.constants == "collocation":
        traj = solve_collocation(problem, system, times)
    else:
        u0 = initial_data(problem)
        if cfg.solver == "eigen":
            traj = solve_eigen(system, u0, times)
        else:
            traj = solve_rk4(system, u0, times, default_rk4_step(system, times))
    meta = {"runner": "spectral", "model": cfg.model, "nu": cfg.nu, "N": cfg.N, "M": cfg.M,
            "scheme": cfg.scheme, "functional": cfg.functional, "dimension": len(problem.index_set),
            "status": traj.status, "source": traj.source}
    return build_surface(traj, problem.index_set, problem.spectrum, problem.X0, cfg.grid,
                         cfg.functional, meta)


def run_reference(cfg: RunConfig) -> SolutionSurface:
    """Finite-difference mean-field solution, resampled onto the run grid.

    The integral functional is the trapezoid integral of the FD profile,
    replicated across the grid columns.
    """
    grid = FDGrid(cfg.ref_points, cfg.ref_dt, cfg.ref_scheme)
    surface = solve_deterministic(drift_model(cfg), cfg.nu, cfg.initial_condition, grid, cfg.times)
    meta = {"runner": "reference", "model": cfg.model, "nu": cfg.nu, "P": cfg.ref_points,
            "dt": cfg.ref_dt, "scheme": cfg.ref_scheme, "functional": cfg.functional}
    if cfg.functional == "point":
        values = resample(surface, cfg.times, cfg.grid)
    else:
        series = np.trapezoid(surface.values, surface.points, axis=1)
        values = np.repeat(series[:, None], cfg.grid_points, axis=1)
    return SolutionSurface(cfg.times, cfg.grid, values, meta)


def run_mc(cfg: RunConfig) -> SolutionSurface:
    mc = McConfig(drift_model(cfg), cfg.nu, cfg.initial_condition, K=cfg.mc_modes, dt=cfg.dt,
                  paths=cfg.paths, seed=cfg.seed, workers=cfg.workers)
    surface = simulate_mean(mc, cfg.functional, cfg.times, cfg.grid)
    surface.meta["runner"] = "mc"
    return surface


RUNNERS = {"run": run_spectral, "reference": run_reference, "mc": run_mc}
OUTPUT_NAMES = {"run": "spectral", "reference": "reference", "mc": "mc"}


# ---------------------------------------------------------------------------
# file formats


def _fmt(v) -> str:
    return repr(float(v))


def format_surface(surface: SolutionSurface, values: np.ndarray | None = None) -> str:
    values = surface.values if values is None else values
    lines = [",".join(["t"] + [_fmt(x) for x in surface.points])]
    for t, row in zip(surface.times, values):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def write_surface(surface: SolutionSurface, path) -> Path:
    path = Path(path)
    path.write_text(format_surface(surface))
    return path


def read_surface(path) -> SolutionSurface:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty surface file")
    head = lines[0].split(",")
    if head[0] != "t":
        raise ConfigError(f"{path}: header must start with 't'")
    try:
        points = np.array([float(v) for v in head[1:]])
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed number ({exc})") from None
    if rows.ndim != 2 or rows.shape[1] != points.size + 1:
        raise ConfigError(f"{path}: rows do not match the header")
    return SolutionSurface(rows[:, 0], points, rows[:, 1:], {"source": str(path)})


def format_metadata(meta: dict, cfg: RunConfig | None = None) -> str:
    lines = [f"{k} = {_fmt(v) if isinstance(v, float) else v}" for k, v in sorted(meta.items())]
    text = "\n".join(lines) + "\n"
    if cfg is not None:
        text += "# config\n" + serialize(cfg)
    return text


def format_metrics(report: ErrorReport) -> str:
    lines = [f"l2={_fmt(report.l2)}", f"sup={_fmt(report.sup)}"]
    lines += [f"t={_fmt(t)} l2={_fmt(v)}" for t, v in zip(report.times, report.per_time)]
    return "\n".join(lines) + "\n"


def parse_metrics(text: str) -> dict:
    out = {"per_time": []}
    for line in text.splitlines():
        if line.startswith("t="):
            t, v = (part.split("=", 1)[1] for part in line.split())
            out["per_time"].append((float(t), float(v)))
        elif "=" in line:
            k, v = line.split("=", 1)
            out[k] = float(v)
    return out


def write_run(name: str, surface: SolutionSurface, cfg: RunConfig, out_dir) -> list[Path]:
    """Write ``<name>.csv``, ``<name>.meta`` and, for MC, ``<name>_stderr.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_surface(surface, out_dir / f"{name}.csv")]
    if surface.stderr is not None:
        p = out_dir / f"{name}_stderr.csv"
        p.write_text(format_surface(surface, surface.stderr))
        written.append(p)
    p = out_dir / f"{name}.meta"
    p.write_text(format_metadata(surface.meta, cfg))
    written.append(p)
    return written

