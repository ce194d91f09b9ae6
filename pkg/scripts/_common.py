"""Shared helpers for the experiment scripts."""
import argparse
from pathlib import Path

from fpk_chaos import pipeline
from fpk_chaos.config import dump
from fpk_chaos.reference_pde import compare


def parser(description, out):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default=out, help="output directory")
    p.add_argument("--nu", type=float, default=0.1)
    p.add_argument("--M", type=int, default=8)
    return p


def sweep(base_cfg, degrees, out_dir):
    """Spectral runs for each N against one reference; writes surfaces and a table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump(base_cfg, out_dir / "base.cfg")
    reference = pipeline.run_reference(base_cfg)
    pipeline.write_run("reference", reference, base_cfg, out_dir)
    rows = []
    for N in degrees:
        cfg = base_cfg.replace(N=N)
        surface = pipeline.run_spectral(cfg)
        pipeline.write_run(f"spectral_N{N}", surface, cfg, out_dir)
        rep = compare(surface, reference)
        rows.append((N, surface.meta["dimension"], surface.meta["status"], rep.l2, rep.sup))
    lines = ["N,dimension,status,l2,sup"] + [f"{n},{d},{s},{l2!r},{sup!r}" for n, d, s, l2, sup in rows]
    (out_dir / "convergence.csv").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return rows
