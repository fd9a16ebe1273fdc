#!/usr/bin/env python3
"""Step-halving study for the rollout integrators and the Riccati sweep.

Prints successive-difference ratios; about 16 indicates fourth order and
about 2 first order.
"""

import sys

import numpy as np

from screwlqr import CostWeights, MassInertia, SimConfig
from screwlqr.sim import constant_screw_nominal, integrate
from screwlqr.tvlqr import riccati_backward

BODY = MassInertia.from_unique(1.2, 2.1, 3.4, 0.15, -0.1, 0.2, 1.8)
V0 = np.array([0.6, -0.45, 0.35, 0.3, 0.1, -0.2])


def final_state(integrator, dt, horizon=2.0):
    x0 = np.concatenate([np.zeros(6), V0])
    cfg = SimConfig(dt, horizon, integrator)
    return integrate(BODY, x0, lambda t, x: np.zeros(6), cfg).states[-1]


def riccati_s0(dt, horizon=4.0):
    traj = constant_screw_nominal(BODY, V0 / 3, horizon, dt)
    return riccati_backward(BODY, traj, CostWeights(1.0, 1.0, 1.0)).s_mats[0]


def ratios(values):
    diffs = [np.max(np.abs(a - b)) for a, b in zip(values, values[1:])]
    return diffs, [d0 / d1 for d0, d1 in zip(diffs, diffs[1:])]


def main():
    dts = [0.08, 0.04, 0.02, 0.01, 0.005]
    for label, fn in (("rk4 rollout", lambda h: final_state("rk4", h)),
                      ("euler rollout", lambda h: final_state("euler", h)),
                      ("riccati S(t0)", riccati_s0)):
        diffs, r = ratios([fn(h) for h in dts])
        print(f"{label:14s} diffs " + " ".join(f"{d:.2e}" for d in diffs))
        print(f"{'':14s} ratio " + " ".join(f"{x:8.2f}" for x in r))
    return 0


if __name__ == "__main__":
    sys.exit(main())
