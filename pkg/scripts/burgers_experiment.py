"""Stochastic Burgers, X0 = sin(pi xi), at nu = 0.1 and nu = 0.01."""
from pathlib import Path

from _common import parser, sweep

from fpk_chaos.config import RunConfig

if __name__ == "__main__":
    p = parser(__doc__, "out/burgers")
    p.add_argument("--closure", default="substitute", choices=["substitute", "frozen"])
    args = p.parse_args()
    for nu in (args.nu, 0.01):
        print(f"# nu = {nu}")
        cfg = RunConfig(model="burgers", nu=nu, M=args.M, N=5, closure=args.closure)
        sweep(cfg, (4, 5), Path(args.out) / f"nu{nu}")
