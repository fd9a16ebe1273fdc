"""Command-line driver.

Exit codes: 0 success, 1 failed invariant check, 2 config or usage error,
3 numeric or chart error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import csvio
from .checks import SUITES, run_suites
from .config import RunConfig, load_config
from .errors import ConfigError, ScrewLQRError
from .linearize import linearize_dynamics
from .sim import constant_screw_nominal, hover_nominal, rollout_closed_loop, rollout_open_loop
from .tvlqr import riccati_backward

EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")
        self.stage = stage
        self.exc = exc


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ScrewLQRError as exc:
        raise StageError(name, exc) from exc


def build_nominal(cfg: RunConfig):
    nom = cfg.nominal
    if nom.kind == "hover":
        return hover_nominal(nom.duration, nom.dt, nom.anchor)
    return constant_screw_nominal(cfg.body, nom.twist, nom.duration, nom.dt, nom.anchor)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_check(cfg: RunConfig, suite: str) -> int:
    names = SUITES if suite == "all" else (suite,)
    results = run_suites(names, seed=cfg.seed, n=cfg.check_samples, M=cfg.body)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 0 if not failed else EXIT_CHECK


def cmd_linearize(cfg: RunConfig, state) -> int:
    x = np.asarray(state, dtype=float)
    jac = _stage("linearize", linearize_dynamics, cfg.body, x)
    out = _out_dir(cfg)
    csvio.write_matrix(out / "A.csv", jac.a)
    csvio.write_matrix(out / "B.csv", jac.b)
    print(f"wrote {out / 'A.csv'} and {out / 'B.csv'}")
    return 0


def cmd_nominal(cfg: RunConfig) -> int:
    traj = _stage("nominal", build_nominal, cfg)
    out = _out_dir(cfg)
    csvio.write_nominal(out / "nominal.csv", traj)
    print(f"wrote {out / 'nominal.csv'} ({traj.times.size} knots)")
    return 0


def _solve(cfg):
    traj = _stage("nominal", build_nominal, cfg)
    sched = _stage("riccati", riccati_backward, cfg.body, traj, cfg.weights)
    out = _out_dir(cfg)
    csvio.write_nominal(out / "nominal.csv", traj)
    csvio.write_gain_schedule(out / "gains.csv", sched)
    return traj, sched, out


def cmd_lqr(cfg: RunConfig) -> int:
    _, sched, out = _solve(cfg)
    print(f"wrote {out / 'gains.csv'}; max asymmetry {sched.max_asymmetry():.3e}, "
          f"min eigenvalue margin {sched.min_eig_margin():.3e}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    traj, sched, out = _solve(cfg)
    roll = _stage("closed_loop", rollout_closed_loop, cfg.body, traj, sched,
                  cfg.sim_config(), cfg.weights)
    csvio.write_rollout(out / "rollout_closed.csv", roll)
    print(f"closed-loop cost {roll.cost:.6e}, final error {roll.final_error:.3e}")
    return 0


def _metrics(roll):
    return {"cost": roll.cost, "rms_error": roll.rms_error,
            "initial_error": float(roll.err_norms[0]), "final_error": roll.final_error}


def cmd_pipeline(cfg: RunConfig) -> int:
    traj, sched, out = _solve(cfg)
    sim = cfg.sim_config()
    closed = _stage("closed_loop", rollout_closed_loop, cfg.body, traj, sched, sim, cfg.weights)
    opened = _stage("open_loop", rollout_open_loop, cfg.body, traj, sim, cfg.weights)
    csvio.write_rollout(out / "rollout_closed.csv", closed)
    csvio.write_rollout(out / "rollout_open.csv", opened)
    summary = {
        "nominal": {"kind": cfg.nominal.kind, "knots": int(traj.times.size),
                    "horizon": float(traj.times[-1])},
        "seed": cfg.seed,
        "riccati": {"max_asymmetry": sched.max_asymmetry(),
                    "min_eig_margin": sched.min_eig_margin(),
                    "s0_max_abs": float(np.max(np.abs(sched.s_mats[0]))),
                    "k0_max_abs": float(np.max(np.abs(sched.k_mats[0])))},
        "closed_loop": _metrics(closed),
        "open_loop": _metrics(opened),
        "closed_below_open": bool(closed.cost < opened.cost),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"closed-loop cost {closed.cost:.6e} vs open-loop {opened.cost:.6e}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--out", type=Path, help="output directory (overrides config)")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")

    p = argparse.ArgumentParser(prog="screwlqr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="run invariant suites")
    c.add_argument("--suite", choices=SUITES + ("all",), default="all")
    lin = sub.add_parser("linearize", parents=[common], help="write A.csv and B.csv")
    lin.add_argument("--state", type=float, nargs=12, required=True, metavar="X",
                     help="12 state entries (S then V)")
    sub.add_parser("nominal", parents=[common], help="write nominal.csv")
    sub.add_parser("lqr", parents=[common], help="solve the Riccati sweep, write gains.csv")
    sub.add_parser("simulate", parents=[common], help="closed-loop rollout")
    sub.add_parser("pipeline", parents=[common], help="nominal, LQR, both rollouts, summary")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if args.seed is not None:
        if args.seed < 0:
            print("config error: --seed must be non-negative", file=sys.stderr)
            return EXIT_CONFIG
        cfg = replace(cfg, seed=args.seed)
    try:
        if args.command == "check":
            return cmd_check(cfg, args.suite)
        if args.command == "linearize":
            return cmd_linearize(cfg, args.state)
        return {"nominal": cmd_nominal, "lqr": cmd_lqr, "simulate": cmd_simulate,
                "pipeline": cmd_pipeline}[args.command](cfg)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ScrewLQRError as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
