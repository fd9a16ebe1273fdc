"""CSV readers and writers for matrices, gain schedules and rollouts.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .sim import Rollout
from .tvlqr import GainSchedule, NominalTrajectory


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    lines = []
    if header is not None:
        lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _read_rows(path, header=True):
    text = Path(path).read_text().splitlines()
    names = text[0].split(",") if header else None
    body = text[1:] if header else text
    data = np.array([[float(v) for v in line.split(",")] for line in body if line])
    return names, data


def write_matrix(path, m) -> None:
    _write_rows(path, None, np.atleast_2d(m))


def read_matrix(path) -> np.ndarray:
    return _read_rows(path, header=False)[1]


def schedule_header() -> list[str]:
    return (["t"] + [f"K{i}_{j}" for i in range(6) for j in range(12)]
            + [f"S{i}_{j}" for i in range(12) for j in range(12)])


def write_gain_schedule(path, sched: GainSchedule) -> None:
    n = sched.times.size
    rows = np.hstack([sched.times[:, None], sched.k_mats.reshape(n, 72),
                      sched.s_mats.reshape(n, 144)])
    _write_rows(path, schedule_header(), rows)


def read_gain_schedule(path) -> GainSchedule:
    names, data = _read_rows(path)
    if names != schedule_header():
        raise ValueError(f"{path}: not a gain-schedule file")
    n = data.shape[0]
    return GainSchedule(data[:, 0].copy(), data[:, 73:].reshape(n, 12, 12).copy(),
                        data[:, 1:73].reshape(n, 6, 12).copy())


def _state_header():
    return (["t"] + [f"S{i}" for i in range(6)] + [f"V{i}" for i in range(6)]
            + [f"W{i}" for i in range(6)])


def rollout_header() -> list[str]:
    return _state_header() + ["err_norm"]


def write_rollout(path, roll: Rollout) -> None:
    err = roll.err_norms if roll.err_norms is not None else np.zeros(roll.times.size)
    rows = np.hstack([roll.times[:, None], roll.states, roll.wrenches, err[:, None]])
    _write_rows(path, rollout_header(), rows)


def read_rollout(path) -> Rollout:
    names, data = _read_rows(path)
    if names != rollout_header():
        raise ValueError(f"{path}: not a rollout file")
    return Rollout(data[:, 0].copy(), data[:, 1:13].copy(), data[:, 13:19].copy(),
                   err_norms=data[:, 19].copy())


def write_nominal(path, traj: NominalTrajectory) -> None:
    rows = np.hstack([traj.times[:, None], traj.states, traj.wrenches])
    _write_rows(path, _state_header(), rows)


def read_nominal(path, anchor=None) -> NominalTrajectory:
    names, data = _read_rows(path)
    if names != _state_header():
        raise ValueError(f"{path}: not a nominal-trajectory file")
    return NominalTrajectory(data[:, 0].copy(), data[:, 1:13].copy(), data[:, 13:19].copy(),
                             anchor)
