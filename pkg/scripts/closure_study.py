"""Compare both closures against the deterministic reference and a Monte Carlo mean.

The chaos solution approximates the mean of the stochastic equation. For a
nonlinear drift that mean differs from the deterministic PDE, so the Monte
Carlo column is the fairer yardstick. Slow: a few minutes at the defaults.
"""
import argparse

from fpk_chaos import pipeline
from fpk_chaos.config import RunConfig
from fpk_chaos.errors import NumericalError
from fpk_chaos.reference_pde import compare

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--model", default="burgers", choices=["fisher", "burgers"])
    p.add_argument("--paths", type=int, default=4000)
    p.add_argument("--mc-modes", type=int, default=24)
    p.add_argument("--M", type=int, default=6)
    p.add_argument("--degrees", type=int, nargs="+", default=[4, 5, 6])
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()

    base = RunConfig(model=args.model, M=args.M, paths=args.paths, mc_modes=args.mc_modes, seed=args.seed)
    reference = pipeline.run_reference(base)
    try:
        mc = pipeline.run_mc(base)
        print(f"mc vs reference: l2={compare(mc, reference).l2:.4f} max se={mc.stderr.max():.4f}")
    except NumericalError as exc:
        mc = None
        print(f"mc aborted: {exc}")
    print("closure,N,l2_vs_reference,l2_vs_mc")
    for closure in ("substitute", "frozen"):
        for N in args.degrees:
            s = pipeline.run_spectral(base.replace(N=N, closure=closure))
            vs_mc = f"{compare(s, mc).l2:.4f}" if mc is not None else "nan"
            print(f"{closure},{N},{compare(s, reference).l2:.4f},{vs_mc}")
