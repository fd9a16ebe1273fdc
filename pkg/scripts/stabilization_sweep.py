#!/usr/bin/env python3
"""Closed-loop vs open-loop cost over seeded initial perturbations.

Usage: python3 scripts/stabilization_sweep.py [--trials 20] [--norm 0.05] [--csv out.csv]
"""

import argparse
import csv
import sys

import numpy as np

from screwlqr import MassInertia, SimConfig, CostWeights
from screwlqr.sim import (constant_screw_nominal, hover_nominal, rollout_closed_loop,
                          rollout_open_loop)
from screwlqr.tvlqr import riccati_backward


def scenarios():
    unit = MassInertia.identity()
    body = MassInertia.principal([1.0, 2.0, 3.5], 2.0)
    yield "hover", unit, hover_nominal(10.0, 0.01)
    yield "screw", body, constant_screw_nominal(body, [0.2, -0.1, 0.15, 0.5, 0.2, -0.1], 10.0, 0.01)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--norm", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="optional per-trial output file")
    args = p.parse_args(argv)

    w = CostWeights(1.0, 1.0, 1.0)
    rows = []
    for name, M, traj in scenarios():
        sched = riccati_backward(M, traj, w)
        rng = np.random.default_rng(args.seed)
        for i in range(args.trials):
            d = rng.standard_normal(12)
            cfg = SimConfig(0.01, 10.0, initial_perturbation=args.norm * d / np.linalg.norm(d))
            closed = rollout_closed_loop(M, traj, sched, cfg, w)
            opened = rollout_open_loop(M, traj, cfg, w)
            rows.append((name, i, closed.cost, opened.cost, closed.final_error, opened.final_error))
        sub = [r for r in rows if r[0] == name]
        wins = sum(r[2] < r[3] for r in sub)
        print(f"{name:6s} closed<open {wins}/{len(sub)}  "
              f"median cost {np.median([r[2] for r in sub]):.3e} vs {np.median([r[3] for r in sub]):.3e}  "
              f"median final err {np.median([r[4] for r in sub]):.2e} vs {np.median([r[5] for r in sub]):.2e}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["scenario", "trial", "closed_cost", "open_cost",
                          "closed_final_error", "open_final_error"])
            out.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
