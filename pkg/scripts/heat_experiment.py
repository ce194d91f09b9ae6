"""Stochastic heat equation with forcing xi^3, X0 = sin(pi xi).

Writes spectral surfaces for N = 4..8, the finite-difference reference and a
convergence table. Add ``--mc`` for a Monte Carlo mean with standard errors.
"""
from _common import parser, sweep

from fpk_chaos import pipeline
from fpk_chaos.config import RunConfig
from fpk_chaos.reference_pde import compare

if __name__ == "__main__":
    p = parser(__doc__.splitlines()[0], "out/heat")
    p.add_argument("--mc", action="store_true")
    args = p.parse_args()
    cfg = RunConfig(model="heat", nu=args.nu, M=args.M, N=8)
    sweep(cfg, range(4, 9), args.out)
    if args.mc:
        mc = pipeline.run_mc(cfg)
        pipeline.write_run("mc", mc, cfg, args.out)
        rep = compare(pipeline.run_spectral(cfg), mc)
        print(f"spectral vs mc: l2={rep.l2:.3e} sup={rep.sup:.3e} max se={mc.stderr.max():.3e}")
