"""Fixed-step integration, nominal generation and closed-loop rollouts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .dynamics import MassInertia, inverse_dynamics, state_derivative
from .errors import ChartSingularity, GridMismatch, NonFiniteState
from .liealg import CHART_LIMIT, Pose
from .tvlqr import (CostWeights, GainSchedule, NominalTrajectory, tracking_control,
                    trajectory_cost)

WrenchFn = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WrenchPulse:
    """Rectangular body-wrench pulse active on ``[start, start + duration)``."""

    start: float
    duration: float
    wrench: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        if self.start <= t < self.start + self.duration:
            return np.asarray(self.wrench, dtype=float)
        return np.zeros(6)


@dataclass(frozen=True)
class SimConfig:
    dt: float
    duration: float
    integrator: str = "rk4"
    disturbance: Optional[WrenchPulse] = None
    initial_perturbation: np.ndarray = field(default_factory=lambda: np.zeros(12))

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.duration >= self.dt:
            raise ValueError("duration must be at least dt")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        pert = np.asarray(self.initial_perturbation, dtype=float)
        if pert.shape != (12,):
            raise ValueError("initial_perturbation must have 12 entries")
        object.__setattr__(self, "initial_perturbation", pert)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def grid(self, t0: float = 0.0) -> np.ndarray:
        return t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass
class Rollout:
    times: np.ndarray
    states: np.ndarray
    wrenches: np.ndarray
    err_norms: Optional[np.ndarray] = None
    rms_error: Optional[float] = None
    final_error: Optional[float] = None
    cost: Optional[float] = None

    def with_reference(self, traj: NominalTrajectory, weights: CostWeights | None = None) -> "Rollout":
        err = np.linalg.norm(self.states - traj.states, axis=1)
        cost = None
        if weights is not None:
            cost = trajectory_cost(self.times, self.states, self.wrenches, traj, weights)
        return replace(self, err_norms=err, rms_error=float(np.sqrt(np.mean(err ** 2))),
                       final_error=float(err[-1]), cost=cost)


def _rk4_step(f, t, x, h):
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _euler_step(f, t, x, h):
    return x + h * f(t, x)


def integrate(M: MassInertia, x0, wrench_fn: WrenchFn, cfg: SimConfig,
              t0: float = 0.0) -> Rollout:
    """Integrate ``xdot = f(x, wrench_fn(t, x))`` on a uniform grid.

    Leaving the chart or producing non-finite values aborts the run; the
    raised error carries the failing knot index and the partial rollout.
    """
    times = cfg.grid(t0)
    n = times.size
    states = np.empty((n, 12))
    wrenches = np.empty((n, 6))
    states[0] = np.asarray(x0, dtype=float)
    if np.linalg.norm(states[0, :3]) >= CHART_LIMIT:
        raise ChartSingularity("initial state outside the chart", knot=0)
    step = _rk4_step if cfg.integrator == "rk4" else _euler_step

    class _Blowup(Exception):
        pass

    def rhs(t, x):
        w = wrench_fn(t, x)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise _Blowup
        return state_derivative(M, x, w)

    def partial(k):
        return Rollout(times[:k].copy(), states[:k].copy(), wrenches[:k].copy())

    for k in range(n):
        wrenches[k] = wrench_fn(times[k], states[k])
        if k == n - 1:
            break
        try:
            nxt = step(rhs, times[k], states[k], cfg.dt)
        except ChartSingularity as exc:
            raise ChartSingularity(f"knot {k}: {exc}", knot=k, partial=partial(k + 1)) from exc
        except _Blowup:
            nxt = np.full(12, np.nan)
        if not np.all(np.isfinite(nxt)):
            raise NonFiniteState(f"non-finite state after knot {k}", knot=k,
                                 partial=partial(k + 1))
        if np.linalg.norm(nxt[:3]) >= CHART_LIMIT:
            raise ChartSingularity(f"state left the chart at knot {k + 1}",
                                   knot=k + 1, partial=partial(k + 1))
        states[k + 1] = nxt
    return Rollout(times, states, wrenches)


def constant_screw_nominal(M: MassInertia, V0, duration: float, dt: float,
                           anchor: Pose | None = None) -> NominalTrajectory:
    """Constant-twist motion ``S(t) = t V0`` with its exact feedforward wrench."""
    V0 = np.asarray(V0, dtype=float)
    n = int(round(duration / dt))
    if n < 1:
        raise ValueError("duration must cover at least one step")
    times = dt * np.arange(n + 1)
    if np.linalg.norm(V0[:3]) * times[-1] >= CHART_LIMIT:
        raise ChartSingularity(
            f"constant-screw horizon leaves the chart: |w| T = "
            f"{np.linalg.norm(V0[:3]) * times[-1]:.6g}")
    states = np.empty((n + 1, 12))
    states[:, :6] = times[:, None] * V0
    states[:, 6:] = V0
    w0 = inverse_dynamics(M, V0, np.zeros(6))
    wrenches = np.tile(w0, (n + 1, 1))
    return NominalTrajectory(times, states, wrenches, anchor or Pose.identity())


def hover_nominal(duration: float, dt: float, anchor: Pose | None = None) -> NominalTrajectory:
    n = int(round(duration / dt))
    return NominalTrajectory(dt * np.arange(n + 1), np.zeros((n + 1, 12)),
                             np.zeros((n + 1, 6)), anchor or Pose.identity())


def _check_grid(traj: NominalTrajectory, cfg: SimConfig):
    grid = cfg.grid(traj.times[0])
    if grid.shape != traj.times.shape or not np.allclose(grid, traj.times, rtol=0.0, atol=1e-9):
        raise GridMismatch("simulation grid does not match the nominal trajectory grid")


def rollout_closed_loop(M: MassInertia, traj: NominalTrajectory, sched: GainSchedule | None,
                        cfg: SimConfig, weights: CostWeights | None = None) -> Rollout:
    """Simulate the nonlinear dynamics under the tracking law.

    With ``sched=None`` the nominal feedforward is applied open loop.
    """
    _check_grid(traj, cfg)
    pulse = cfg.disturbance

    def control(t, x):
        if sched is None:
            w = traj.wrench_at(t)
        else:
            w = tracking_control(sched, traj, t, x)
        if pulse is not None:
            w = w + pulse(t)
        return w

    x0 = traj.states[0] + cfg.initial_perturbation
    out = integrate(M, x0, control, cfg, t0=traj.times[0])
    return out.with_reference(traj, weights)


def rollout_open_loop(M: MassInertia, traj: NominalTrajectory, cfg: SimConfig,
                      weights: CostWeights | None = None) -> Rollout:
    return rollout_closed_loop(M, traj, None, cfg, weights)
