"""Finite-horizon time-varying LQR along a nominal trajectory.

The value matrix ``S(t)`` solves the differential Riccati equation

    -dS/dt = S A + A^T S - S B R^-1 B^T S + Q,     S(t_f) = Q_f

backwards in time with classical RK4 on the nominal knot grid, and the
feedback gain is ``K = R^-1 B^T S``.  State errors are plain differences of
12-vectors in the chart shared by the nominal and the measured state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .dynamics import MassInertia
from .errors import ChartSingularity, GridMismatch, RiccatiDivergence, TimeOutOfHorizon
from .liealg import CHART_LIMIT, Pose
from .linearize import linearize_dynamics

DIVERGENCE_LIMIT = 1e12


def _sym(m):
    return 0.5 * (m + m.T)


def _as_weight(m, n, name):
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        m = float(m) * np.eye(n)
    elif m.ndim == 1:
        m = np.diag(m)
    if m.shape != (n, n) or not np.all(np.isfinite(m)):
        raise ValueError(f"{name} must be a finite {n}x{n} matrix")
    if np.max(np.abs(m - m.T)) > 1e-10:
        raise ValueError(f"{name} must be symmetric")
    return _sym(m)


@dataclass(frozen=True)
class CostWeights:
    """Quadratic weights; scalars and 1-d arrays are read as diagonals."""

    q: np.ndarray
    qf: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = _as_weight(self.q, 12, "q")
        qf = _as_weight(self.qf, 12, "qf")
        r = _as_weight(self.r, 6, "r")
        for name, m in (("q", q), ("qf", qf)):
            if np.min(np.linalg.eigvalsh(m)) < -1e-10:
                raise ValueError(f"{name} must be positive semi-definite")
        if np.min(np.linalg.eigvalsh(r)) <= 1e-12:
            raise ValueError("r must be positive definite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qf", qf)
        object.__setattr__(self, "r", r)


def locate(times: np.ndarray, t: float) -> tuple[int, float]:
    """Knot index ``k`` and weight ``w`` with ``t = (1-w) t_k + w t_{k+1}``."""
    t0, tn = times[0], times[-1]
    slack = 1e-9 * max(1.0, abs(tn))
    if t < t0 - slack or t > tn + slack:
        raise TimeOutOfHorizon(f"t={t!r} outside [{t0!r}, {tn!r}]")
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(max(k, 0), len(times) - 2)
    w = (t - times[k]) / (times[k + 1] - times[k])
    return k, min(max(w, 0.0), 1.0)


def _lerp(arr, k, w):
    if w == 0.0:
        return arr[k]
    if w == 1.0:
        return arr[k + 1]
    return (1.0 - w) * arr[k] + w * arr[k + 1]


@dataclass(frozen=True)
class NominalTrajectory:
    times: np.ndarray
    states: np.ndarray  # (N+1, 12)
    wrenches: np.ndarray  # (N+1, 6)
    anchor: Pose | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        wrenches = np.asarray(self.wrenches, dtype=float)
        n = times.size
        if n < 2 or np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing with at least 2 knots")
        if states.shape != (n, 12) or wrenches.shape != (n, 6):
            raise ValueError("states/wrenches must align with times")
        norms = np.linalg.norm(states[:, :3], axis=1)
        if np.any(norms >= CHART_LIMIT):
            k = int(np.argmax(norms >= CHART_LIMIT))
            raise ChartSingularity(f"nominal leaves the chart at knot {k}", knot=k)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "wrenches", wrenches)
        if self.anchor is None:
            object.__setattr__(self, "anchor", Pose.identity())

    def state_at(self, t: float) -> np.ndarray:
        k, w = locate(self.times, t)
        return _lerp(self.states, k, w)

    def wrench_at(self, t: float) -> np.ndarray:
        k, w = locate(self.times, t)
        return _lerp(self.wrenches, k, w)


@dataclass(frozen=True)
class GainSchedule:
    times: np.ndarray
    s_mats: np.ndarray  # (N+1, 12, 12)
    k_mats: np.ndarray  # (N+1, 6, 12)

    def gain_at(self, t: float) -> np.ndarray:
        k, w = locate(self.times, t)
        return _lerp(self.k_mats, k, w)

    def value_at(self, t: float) -> np.ndarray:
        k, w = locate(self.times, t)
        return _lerp(self.s_mats, k, w)

    def max_asymmetry(self) -> float:
        return float(np.max(np.abs(self.s_mats - np.swapaxes(self.s_mats, 1, 2))))

    def min_eig_margin(self) -> float:
        """Smallest ``lambda_min(S) / (1 + |S|_2)`` over all knots."""
        eigs = np.linalg.eigvalsh(self.s_mats)
        scale = 1.0 + np.max(np.abs(eigs), axis=1)
        return float(np.min(eigs[:, 0] / scale))


def riccati_backward(M: MassInertia, traj: NominalTrajectory, w: CostWeights,
                     divergence_limit: float = DIVERGENCE_LIMIT) -> GainSchedule:
    """Integrate the Riccati equation from ``t_N`` back to ``t_0``."""
    times = traj.times
    n = times.size
    r_inv = np.linalg.inv(w.r)
    q = w.q

    def model(x):
        jac = linearize_dynamics(M, x)
        return jac.a, jac.b, jac.b @ r_inv @ jac.b.T

    def rhs(s, a, brb):
        sa = s @ a
        return sa + sa.T - s @ brb @ s + q

    s_mats = np.empty((n, 12, 12))
    k_mats = np.empty((n, 6, 12))
    s = w.qf.copy()
    hi = model(traj.states[-1])
    s_mats[-1] = s
    k_mats[-1] = r_inv @ hi[1].T @ s
    for k in range(n - 2, -1, -1):
        h = times[k + 1] - times[k]
        mid = model(0.5 * (traj.states[k] + traj.states[k + 1]))
        lo = model(traj.states[k])
        k1 = rhs(s, hi[0], hi[2])
        k2 = rhs(s + 0.5 * h * k1, mid[0], mid[2])
        k3 = rhs(s + 0.5 * h * k2, mid[0], mid[2])
        k4 = rhs(s + h * k3, lo[0], lo[2])
        s = _sym(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        if not np.all(np.isfinite(s)) or np.max(np.abs(s)) > divergence_limit:
            raise RiccatiDivergence(
                f"|S|_max exceeded {divergence_limit:g} at t={times[k]!r}")
        s_mats[k] = s
        k_mats[k] = r_inv @ lo[1].T @ s
        hi = lo
    return GainSchedule(times.copy(), s_mats, k_mats)


def state_error(traj: NominalTrajectory, t: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x[:3]) >= CHART_LIMIT:
        raise ChartSingularity("measured state outside the chart")
    return x - traj.state_at(t)


def tracking_control(sched: GainSchedule, traj: NominalTrajectory, t: float, x) -> np.ndarray:
    """``W0(t) - K(t) (x - x0(t))``."""
    err = state_error(traj, t, x)
    return traj.wrench_at(t) - sched.gain_at(t) @ err


def cost_to_go(sched: GainSchedule, traj: NominalTrajectory, t: float, x) -> float:
    err = state_error(traj, t, x)
    return float(err @ sched.value_at(t) @ err)


def trajectory_cost(times, states, wrenches, traj: NominalTrajectory, w: CostWeights) -> float:
    """Terminal penalty plus trapezoidal quadrature of the running cost."""
    times = np.asarray(times, dtype=float)
    if times.shape != traj.times.shape or not np.allclose(times, traj.times, rtol=0.0, atol=1e-12):
        raise GridMismatch("actual and nominal time grids differ")
    dx = np.asarray(states, dtype=float) - traj.states
    dw = np.asarray(wrenches, dtype=float) - traj.wrenches
    running = (np.einsum("ki,ij,kj->k", dx, w.q, dx)
               + np.einsum("ki,ij,kj->k", dw, w.r, dw))
    integral = float(np.sum(0.5 * (running[1:] + running[:-1]) * np.diff(times)))
    return float(dx[-1] @ w.qf @ dx[-1]) + integral


def kleinman_newton(a, b, q, r, k0, tol: float = 1e-13, max_iter: int = 100) -> np.ndarray:
    """Stabilizing solution of the continuous ARE by Newton-Kleinman iteration.

    ``k0`` must make ``a - b k0`` Hurwitz.  Each step solves the Lyapunov
    equation of the current closed loop.
    """
    r_inv = np.linalg.inv(r)
    k = np.asarray(k0, dtype=float)
    p = None
    for _ in range(max_iter):
        acl = a - b @ k
        p_new = _sym(solve_continuous_lyapunov(acl.T, -(q + k.T @ r @ k)))
        k = r_inv @ b.T @ p_new
        if p is not None and np.max(np.abs(p_new - p)) < tol * (1.0 + np.max(np.abs(p_new))):
            return p_new
        p = p_new
    return p
