"""Jacobians of the state equation, assembled from directional derivatives.

No third-order tensor is ever formed: each Jacobian column is one
directional-derivative evaluation along a canonical basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import MassInertia
from .liealg import ad, ddexpinv_se3_basis, dexpinv_se3

_BASIS6 = np.eye(6)
_AD_BASIS = np.stack([ad(e) for e in _BASIS6])


@dataclass(frozen=True)
class StateJacobian:
    a: np.ndarray  # 12 x 12
    b: np.ndarray  # 12 x 6


def finite_difference_jacobian(f: Callable[[np.ndarray], np.ndarray], x0, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x0``."""
    if not h > 0.0:
        raise ValueError("step h must be positive")
    x0 = np.asarray(x0, dtype=float)
    cols = []
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = h
        cols.append((np.asarray(f(x0 + e)) - np.asarray(f(x0 - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def reconstruction_jacobian(S, V) -> np.ndarray:
    """Jacobian of ``S -> dexpinv_se3(-S) @ V``.

    Column ``i`` is ``-D(dexpinv)(-S)[e_i] @ V``; the minus comes from the
    inner map ``S -> -S``.
    """
    S = np.asarray(S, dtype=float)
    V = np.asarray(V, dtype=float)
    return -(ddexpinv_se3_basis(-S) @ V).T


def coriolis_jacobian(M: MassInertia, V) -> np.ndarray:
    """Jacobian of ``V -> ad(V)^T M V``."""
    V = np.asarray(V, dtype=float)
    mv = M.matrix @ V
    # column i is ad(e_i)^T M V
    cols = np.einsum("iab,a->bi", _AD_BASIS, mv)
    return ad(V).T @ M.matrix + cols


def input_matrix(M: MassInertia) -> np.ndarray:
    b = np.zeros((12, 6))
    b[6:, :] = M.inverse
    return b


def linearize_dynamics(M: MassInertia, x, W=None) -> StateJacobian:
    """``A = df/dx`` and ``B = df/dW`` at state ``x``.

    ``f`` is affine in the wrench, so ``W`` does not enter either matrix; it
    is accepted so call sites can pass a full linearization point.
    """
    x = np.asarray(x, dtype=float)
    S, V = x[:6], x[6:]
    a = np.zeros((12, 12))
    a[:6, :6] = reconstruction_jacobian(S, V)
    a[:6, 6:] = dexpinv_se3(-S)
    a[6:, 6:] = M.inverse @ coriolis_jacobian(M, V)
    return StateJacobian(a, input_matrix(M))


def controllability_rank(a, b, tol: float | None = None) -> int:
    n = a.shape[0]
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(a @ blocks[-1])
    return int(np.linalg.matrix_rank(np.hstack(blocks), tol=tol))
