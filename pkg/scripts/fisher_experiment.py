"""Stochastic Fisher-KPP, X0 = shifted sech^2 profile, nu = 0.1.

Pass ``--closure frozen`` to linearize every quadratic coefficient about the
initial condition instead of substituting the Gaussian coordinates.
"""
from _common import parser, sweep

from fpk_chaos.config import RunConfig

if __name__ == "__main__":
    p = parser(__doc__.splitlines()[0], "out/fisher")
    p.add_argument("--closure", default="substitute", choices=["substitute", "frozen"])
    args = p.parse_args()
    sweep(RunConfig(model="fisher", nu=args.nu, M=args.M, N=5, closure=args.closure), (4, 5), args.out)
