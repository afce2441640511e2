#!/usr/bin/env python3
"""Emit plot-ready SE bound/asymptote curves for both tiers over a
density-ratio grid (CSV on stdout)."""

import argparse
import csv
import math
import sys

import numpy as np

from mmudn.analytic_se import (
    NetworkParams,
    se_mmw_bounds_integral,
    se_muw_bounds,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tier", choices=("muw", "mmw"), default="muw")
    ap.add_argument("--alpha", type=float, default=None)
    ap.add_argument("--r-los", type=float, default=10.0)
    ap.add_argument("--theta-deg", type=float, default=15.0)
    ap.add_argument("--lambda-u", type=float, default=0.01)
    ap.add_argument("--points", type=int, default=60)
    args = ap.parse_args()

    grid = np.logspace(0, 4, args.points)
    writer = csv.writer(sys.stdout)
    writer.writerow(["lambda_hat", "tier", "lower_bound", "upper_bound", "asymptotic"])
    for lhat in grid:
        if args.tier == "muw":
            b = se_muw_bounds(lhat, args.alpha or 4.0)
        else:
            params = NetworkParams(
                lambda_m=lhat * args.lambda_u,
                lambda_mu=2 * args.lambda_u,
                lambda_u=args.lambda_u,
                alpha_m=args.alpha or 2.5,
                theta=math.radians(args.theta_deg),
                r_los=args.r_los,
            )
            b = se_mmw_bounds_integral(params)
        writer.writerow(
            [f"{lhat:.6g}", args.tier, f"{b.lower:.8g}", f"{b.upper:.8g}", f"{b.asymptotic:.8g}"]
        )


if __name__ == "__main__":
    main()
