"""Free-floating rigid-body dynamics in body-fixed form.

States are 12-arrays ``(S, V)``: exponential coordinates ``S`` of the pose
relative to an anchor ``C0`` (so ``C = C0 exp(S)``) followed by the body
twist ``V``.  Wrenches are 6-arrays ``(torque, force)`` in the body frame.
The body frame sits at the centre of mass and no gravity is included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .liealg import Ad, Pose, ad, dexpinv_se3, exp_se3


@dataclass(frozen=True)
class MassInertia:
    inertia_rot: np.ndarray
    mass: float
    matrix: np.ndarray = field(init=False, repr=False, compare=False)
    inverse: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ib = np.array(self.inertia_rot, dtype=float)
        if ib.shape != (3, 3) or not np.all(np.isfinite(ib)):
            raise ValueError("inertia_rot must be a finite 3x3 matrix")
        if np.max(np.abs(ib - ib.T)) > 1e-12:
            raise ValueError("inertia_rot must be symmetric")
        if np.min(np.linalg.eigvalsh(ib)) <= 0.0:
            raise ValueError("inertia_rot must be positive definite")
        mass = float(self.mass)
        if not (np.isfinite(mass) and mass > 0.0):
            raise ValueError("mass must be positive")
        m = np.zeros((6, 6))
        m[:3, :3] = ib
        m[3:, 3:] = mass * np.eye(3)
        minv = np.zeros((6, 6))
        minv[:3, :3] = np.linalg.inv(ib)
        minv[3:, 3:] = np.eye(3) / mass
        object.__setattr__(self, "inertia_rot", ib)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "inverse", minv)

    @classmethod
    def principal(cls, moments, mass) -> "MassInertia":
        return cls(np.diag(np.asarray(moments, dtype=float)), mass)

    @classmethod
    def from_unique(cls, ixx, iyy, izz, ixy, ixz, iyz, mass) -> "MassInertia":
        ib = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]], dtype=float)
        return cls(ib, mass)

    @classmethod
    def identity(cls) -> "MassInertia":
        return cls(np.eye(3), 1.0)


def gyroscopic(M: MassInertia, V) -> np.ndarray:
    """``ad(V)^T M V``, the velocity-product term of the equations of motion."""
    return ad(V).T @ (M.matrix @ V)


def inverse_dynamics(M: MassInertia, V, Vdot) -> np.ndarray:
    """Net body wrench ``M Vdot - ad(V)^T M V``."""
    V = np.asarray(V, dtype=float)
    return M.matrix @ np.asarray(Vdot, dtype=float) - gyroscopic(M, V)


def forward_dynamics(M: MassInertia, V, W) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    return M.inverse @ (np.asarray(W, dtype=float) + gyroscopic(M, V))


def state_derivative(M: MassInertia, x, W) -> np.ndarray:
    """Right-hand side ``f(x, W)`` of the first-order state equation."""
    x = np.asarray(x, dtype=float)
    S, V = x[:6], x[6:]
    return np.concatenate([dexpinv_se3(-S) @ V, forward_dynamics(M, V, W)])


def kinetic_energy(M: MassInertia, V) -> float:
    V = np.asarray(V, dtype=float)
    return 0.5 * float(V @ M.matrix @ V)


def spatial_momentum(M: MassInertia, x, anchor: Pose | None = None) -> np.ndarray:
    """Momentum co-vector ``Ad(C)^-T M V`` in the inertial frame."""
    x = np.asarray(x, dtype=float)
    C = exp_se3(x[:6])
    if anchor is not None:
        C = anchor @ C
    return Ad(C.inverse()).T @ (M.matrix @ x[6:])
