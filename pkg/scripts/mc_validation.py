#!/usr/bin/env python3
"""Monte Carlo validation run: SE estimates vs. analytic bounds for both
tiers and directions over a density-ratio grid (CSV on stdout)."""

import argparse
import math
import sys
import warnings

from mmudn.analytic_se import NetworkParams
from mmudn.pointprocess import Window
from mmudn.simulator import SimConfig, sweep_se, write_se_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tier", choices=("muw", "mmw"), default="muw")
    ap.add_argument("--direction", choices=("dl", "ul"), default="dl")
    ap.add_argument("--grid", default="10,100,1000")
    ap.add_argument("--replications", type=int, default=200)
    ap.add_argument("--window-side", type=float, default=200.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=2)
    args = ap.parse_args()

    lambda_u = 0.01
    params = NetworkParams(
        lambda_m=lambda_u,
        lambda_mu=2 * lambda_u,
        lambda_u=lambda_u,
        alpha_m=2.5,
        alpha_mu=4.0,
        theta=math.radians(15.0),
        r_los=10.0,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        config = SimConfig(
            params=params,
            window=Window(side=args.window_side),
            replications=args.replications,
            master_seed=args.seed,
            tier=args.tier,
            direction=args.direction,
            workers=args.workers,
        )
    grid = [float(tok) for tok in args.grid.split(",")]
    rows = sweep_se(grid, config)
    write_se_csv(rows, sys.stdout, header_lines=[f"seed = {args.seed}"])


if __name__ == "__main__":
    main()
