"""Seeded invariant suites run by ``screwlqr check``.

Each check reports its worst-case residual against a fixed tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from . import liealg as la
from .dynamics import (MassInertia, forward_dynamics, gyroscopic, inverse_dynamics,
                       kinetic_energy, spatial_momentum, state_derivative)
from .linearize import controllability_rank, finite_difference_jacobian, linearize_dynamics
from .sim import SimConfig, hover_nominal, integrate
from .tvlqr import CostWeights, kleinman_newton, riccati_backward

SUITES = ("liealg", "dynamics", "linearize", "tvlqr")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.suite}.{self.name}: worst={self.worst:.3e} tol={self.tol:.1e}"


def random_screw(rng, ang_max, lin_scale=1.0, ang_min=0.0):
    """Screw vector with ``|ang|`` uniform in ``[ang_min, ang_max]``."""
    d = rng.standard_normal(3)
    ang = rng.uniform(ang_min, ang_max) * d / np.linalg.norm(d)
    return np.concatenate([ang, lin_scale * rng.standard_normal(3)])


def random_body(rng) -> MassInertia:
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    ib = q @ np.diag(rng.uniform(0.5, 3.0, 3)) @ q.T
    return MassInertia(0.5 * (ib + ib.T), rng.uniform(0.5, 3.0))


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b))))


def liealg_suite(rng, n=200, M=None):
    res = []
    add = lambda name, worst, tol: res.append(CheckResult("liealg", name, float(worst), tol))

    w = 0.0
    for _ in range(n):
        X = random_screw(rng, 1.9)
        w = max(w, np.max(np.abs(la.dexpinv_se3(X) - la.dexpinv_series(X, 24))))
    add("dexpinv_vs_bernoulli_series", w, 1e-10)

    w = 0.0
    for _ in range(n):
        X = random_screw(rng, 3.0)
        w = max(w, np.max(np.abs(la.dexpinv_se3(X) - la.dexpinv_blockform(X))))
    add("dual_closed_forms", w, 1e-10)

    w = 0.0
    for _ in range(n):
        X = random_screw(rng, 3.0)
        w = max(w, np.max(np.abs(la.dexpinv_se3(X) @ la.dexp_series(X, 1e-15) - np.eye(6))))
    add("inverse_pair", w, 1e-10)

    w = 0.0
    for _ in range(n):
        X, U = random_screw(rng, 3.0), random_screw(rng, 1.0)
        fd = finite_difference_jacobian(lambda s: la.dexpinv_se3(X + s[0] * U), np.zeros(1))[..., 0]
        w = max(w, _rel(la.ddexpinv_se3(X, U), fd))
        x, y = X[:3], U[:3]
        fd3 = finite_difference_jacobian(lambda s: la.dexpinv_so3(x + s[0] * y), np.zeros(1))[..., 0]
        w = max(w, _rel(la.ddexpinv_so3(x, y), fd3))
    add("directional_derivative_fd", w, 1e-6)

    w = 0.0
    for _ in range(n):
        R = la.exp_so3(random_screw(rng, 2 * np.pi)[:3])
        w = max(w, np.max(np.abs(R.T @ R - np.eye(3))), abs(np.linalg.det(R) - 1.0))
    add("exp_so3_orthonormal", w, 1e-12)

    w = 0.0
    for _ in range(n):
        C = la.exp_se3(random_screw(rng, 3.0, 2.0))
        C2 = la.exp_se3(la.log_se3(C))
        w = max(w, np.max(np.abs(C2.matrix() - C.matrix())))
    add("log_round_trip", w, 1e-9)

    w = 0.0
    for edge in (la.SMALL_ANGLE, la.SERIES_CUTOFF):
        for _ in range(max(1, n // 20)):
            lo, hi = seam_pair(rng, edge)
            U = rng.standard_normal(6)
            for f in (la.dexpinv_se3, la.dexpinv_blockform, partial(_dd, U=U)):
                w = max(w, np.max(np.abs(f(lo) - f(hi))))
    add("small_angle_seam", w, 1e-12)
    return res


def seam_pair(rng, edge):
    """Two screws whose angular norms straddle ``edge`` by a few ulps.

    Only the branch differs between them, so any gap is branch error rather
    than the genuine change of the function over the displacement.
    """
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    y = rng.standard_normal(3)
    lo = np.concatenate([edge * (1.0 - 4e-16) * d, y])
    hi = np.concatenate([edge * (1.0 + 4e-16) * d, y])
    return lo, hi


def _dd(X, U):
    return la.ddexpinv_se3(X, U)


def dynamics_suite(rng, n=200, M=None, horizon=10.0):
    M = M or MassInertia.identity()
    res = []
    add = lambda name, worst, tol: res.append(CheckResult("dynamics", name, float(worst), tol))

    w = 0.0
    for _ in range(n):
        V, Vd = rng.standard_normal(6), rng.standard_normal(6)
        w = max(w, np.max(np.abs(forward_dynamics(M, V, inverse_dynamics(M, V, Vd)) - Vd)))
    add("inverse_pair", w, 1e-12)

    w = 0.0
    for _ in range(n):
        V = rng.standard_normal(6)
        w = max(w, abs(V @ gyroscopic(M, V)) / (1.0 + V @ M.matrix @ V))
    add("power_balance", w, 1e-12)

    w = 0.0
    for _ in range(n):
        V = rng.standard_normal(6)
        x = np.concatenate([np.zeros(6), V])
        w = max(w, np.max(np.abs(state_derivative(M, x, np.zeros(6))[:6] - V)))
    add("chart_consistency", w, 1e-15)

    V0 = np.array([0.2, -0.25, 0.15, 0.3, 0.1, -0.2])
    x0 = np.concatenate([np.zeros(6), V0])
    roll = integrate(M, x0, lambda t, x: np.zeros(6), SimConfig(1e-3, horizon))
    e = np.array([kinetic_energy(M, s[6:]) for s in roll.states])
    p = np.array([spatial_momentum(M, s) for s in roll.states])
    add("energy_drift", np.max(np.abs(e - e[0])) / e[0], 1e-8)
    add("momentum_drift", np.max(np.linalg.norm(p - p[0], axis=1)) / np.linalg.norm(p[0]), 1e-6)
    return res


def linearize_suite(rng, n=200, M=None):
    M = M or MassInertia.identity()
    res = []
    add = lambda name, worst, tol: res.append(CheckResult("linearize", name, float(worst), tol))

    wa = wb = zero = 0.0
    b_ref = None
    for _ in range(n):
        S = random_screw(rng, 2.0)
        V = rng.standard_normal(6)
        V *= rng.uniform(0.0, 5.0) / np.linalg.norm(V)
        x = np.concatenate([S, V])
        W = rng.standard_normal(6)
        jac = linearize_dynamics(M, x, W)
        a_fd = finite_difference_jacobian(lambda z: state_derivative(M, z, W), x)
        b_fd = finite_difference_jacobian(lambda u: state_derivative(M, x, u), W)
        wa = max(wa, _rel(jac.a, a_fd))
        wb = max(wb, np.max(np.abs(jac.b - b_fd)))
        zero = max(zero, np.max(np.abs(jac.a[6:, :6])))
        if b_ref is None:
            b_ref = jac.b
        zero = max(zero, np.max(np.abs(jac.b - b_ref)))
    add("a_vs_finite_difference", wa, 1e-6)
    add("b_vs_finite_difference", wb, 1e-9)
    add("block_structure", zero, 0.0)

    jac = linearize_dynamics(M, np.zeros(12))
    di = np.zeros((12, 12))
    di[:6, 6:] = np.eye(6)
    add("origin_double_integrator", np.max(np.abs(jac.a - di)), 0.0)
    add("origin_controllability_deficit", 12 - controllability_rank(jac.a, jac.b), 0.0)
    return res


def hover_are_solution():
    r3 = np.sqrt(3.0)
    return np.block([[r3 * np.eye(6), np.eye(6)], [np.eye(6), r3 * np.eye(6)]])


def tvlqr_suite(rng, n=0, M=None, horizon=50.0, dt=0.05):
    M = MassInertia.identity()
    res = []
    add = lambda name, worst, tol: res.append(CheckResult("tvlqr", name, float(worst), tol))
    w = CostWeights(np.eye(12), np.eye(12), np.eye(6))
    traj = hover_nominal(horizon, dt)
    sched = riccati_backward(M, traj, w)
    jac = linearize_dynamics(M, np.zeros(12))
    k0 = np.hstack([np.eye(6), 2.0 * np.eye(6)])
    p_kn = kleinman_newton(jac.a, jac.b, w.q, w.r, k0)
    add("are_closed_form", np.max(np.abs(sched.s_mats[0] - hover_are_solution())), 1e-4)
    add("are_kleinman_newton", np.max(np.abs(sched.s_mats[0] - p_kn)), 1e-4)
    add("terminal_condition", np.max(np.abs(sched.s_mats[-1] - w.qf)), 0.0)
    add("symmetry", sched.max_asymmetry(), 1e-9)
    add("psd_margin", -sched.min_eig_margin(), 1e-8)
    return res


def run_suites(names, seed=0, n=200, M=None):
    """Run the named suites with one seeded generator per suite."""
    fns = {"liealg": liealg_suite, "dynamics": dynamics_suite,
           "linearize": linearize_suite, "tvlqr": tvlqr_suite}
    out = []
    for i, name in enumerate(names):
        rng = np.random.default_rng([seed, i])
        out.extend(fns[name](rng, n=n, M=M))
    return out
