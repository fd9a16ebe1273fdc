"""Exponential coordinates on SO(3) and SE(3).

Screw vectors are 6-arrays ordered ``(angular, linear)``: ``X = (x, y)`` with
``x`` the rotational part.  The little adjoint uses the block layout
``ad(X) = [[x~, 0], [y~, x~]]`` and every block formula below assumes it.

Closed forms are written with the sinc-based scalars

    alpha = sinc |x|,   beta = sinc^2 (|x| / 2),   gamma = alpha / beta

and a handful of coefficient fractions (e.g. ``(1 - gamma) / |x|^2``) that
are 0/0 at the origin.  Those fractions are evaluated from their Taylor
series in ``t = |x|^2`` below ``SERIES_CUTOFF``; the sinc scalars switch to
their series below ``SMALL_ANGLE``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import AngleAtBranchBoundary, ChartSingularity

SMALL_ANGLE = 1e-4
SERIES_CUTOFF = 0.25
CHART_LIMIT = 2.0 * math.pi - 1e-6
LOG_LIMIT = math.pi - 1e-6

_I3 = np.eye(3)
_I6 = np.eye(6)

# Taylor coefficients in t = |x|^2, lowest order first.
_ALPHA = (1.0, -1 / 6, 1 / 120, -1 / 5040, 1 / 362880, -1 / 39916800)
_BETA = (1.0, -1 / 12, 1 / 360, -1 / 20160, 1 / 1814400, -1 / 239500800)
_GAMMA = (1.0, -1 / 12, -1 / 720, -1 / 30240, -1 / 1209600, -1 / 47900160)
# (1 - alpha) / t
_J2 = (1 / 6, -1 / 120, 1 / 5040, -1 / 362880, 1 / 39916800, -1 / 6227020800)
# (1 - gamma) / t
_FG = (1 / 12, 1 / 720, 1 / 30240, 1 / 1209600, 1 / 47900160, 691 / 1307674368000)
# (2 - (1 + 3 alpha) / (2 beta)) / t
_C2 = (1 / 12, 0.0, -1 / 30240, -1 / 604800, -1 / 15966720, -691 / 326918592000)
# (1 - (1 + alpha) / (2 beta)) / t^2
_C4 = (-1 / 720, -1 / 15120, -1 / 403200, -1 / 11975040, -691 / 261534873600,
       -1 / 12454041600)
# (1 / beta + gamma - 2) / t^2
_FH = (1 / 360, 1 / 7560, 1 / 201600, 1 / 5987520, 691 / 130767436800,
       1 / 6227020800)
# 2 d(FH)/dt
_DFH = (1 / 3780, 1 / 50400, 1 / 997920, 691 / 16345929600, 1 / 622702080,
        3617 / 63515612160000)


def _horner(coeffs, t):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _bernoulli_table(n):
    """Bernoulli numbers B_0..B_{n-1} with B_1 = -1/2."""
    b = [Fraction(1)]
    for m in range(1, n):
        s = sum(math.comb(m + 1, k) * b[k] for k in range(m))
        b.append(-s / (m + 1))
    return b


BERNOULLI = tuple(float(v) for v in _bernoulli_table(41))


class ScalarTriple(NamedTuple):
    alpha: float
    beta: float
    gamma: float


class _Coefs(NamedTuple):
    alpha: float
    beta: float
    gamma: float
    j2: float
    fg: float
    c2: float
    c4: float
    fh: float
    dfh: float


def scalar_triple(theta: float) -> ScalarTriple:
    """Return ``(alpha, beta, gamma)`` for the rotation angle ``theta >= 0``."""
    if theta < SMALL_ANGLE:
        t = theta * theta
        return ScalarTriple(_horner(_ALPHA[:5], t), _horner(_BETA[:5], t),
                            _horner(_GAMMA[:5], t))
    alpha = math.sin(theta) / theta
    half = 0.5 * theta
    beta = (math.sin(half) / half) ** 2
    return ScalarTriple(alpha, beta, alpha / beta)


def _coefficients(theta):
    alpha, beta, gamma = scalar_triple(theta)
    t = theta * theta
    if theta < SERIES_CUTOFF:
        return _Coefs(alpha, beta, gamma, _horner(_J2, t), _horner(_FG, t),
                      _horner(_C2, t), _horner(_C4, t), _horner(_FH, t),
                      _horner(_DFH, t))
    t2 = t * t
    return _Coefs(
        alpha, beta, gamma,
        (1.0 - alpha) / t,
        (1.0 - gamma) / t,
        (2.0 - (1.0 + 3.0 * alpha) / (2.0 * beta)) / t,
        (1.0 - (1.0 + alpha) / (2.0 * beta)) / t2,
        (1.0 / beta + gamma - 2.0) / t2,
        (8.0 - 3.0 * gamma - gamma * gamma - 2.0 * (alpha + beta) / beta ** 2
         - 0.25 * t) / (t2 * t),
    )


def _check_chart(theta):
    if not theta < CHART_LIMIT:
        raise ChartSingularity(
            f"rotation coordinate norm {theta:.6g} outside chart (< {CHART_LIMIT:.9g})")


def _vec(v, n):
    a = np.asarray(v, dtype=float)
    if a.shape != (n,):
        raise ValueError(f"expected shape ({n},), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries")
    return a


def tilde(v) -> np.ndarray:
    """Skew-symmetric matrix with ``tilde(v) @ w == cross(v, w)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m) -> np.ndarray:
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


# ---------------------------------------------------------------------------
# SO(3)


def exp_so3(x) -> np.ndarray:
    x = _vec(x, 3)
    alpha, beta, _ = scalar_triple(float(np.linalg.norm(x)))
    xt = tilde(x)
    return _I3 + alpha * xt + 0.5 * beta * (xt @ xt)


def dexp_so3(x) -> np.ndarray:
    """Right-trivialized differential of exp on SO(3) (the left Jacobian)."""
    x = _vec(x, 3)
    c = _coefficients(float(np.linalg.norm(x)))
    xt = tilde(x)
    return _I3 + 0.5 * c.beta * xt + c.j2 * (xt @ xt)


def dexpinv_so3(x) -> np.ndarray:
    x = _vec(x, 3)
    theta = float(np.linalg.norm(x))
    _check_chart(theta)
    c = _coefficients(theta)
    xt = tilde(x)
    return _I3 - 0.5 * xt + c.fg * (xt @ xt)


def _ddexpinv_so3(x, y, c):
    xt, yt = tilde(x), tilde(y)
    return (-0.5 * yt + c.fg * (xt @ yt + yt @ xt)
            + (x @ y) * c.fh * (xt @ xt))


def ddexpinv_so3(x, y) -> np.ndarray:
    """Directional derivative of ``dexpinv_so3`` at ``x`` in direction ``y``."""
    x, y = _vec(x, 3), _vec(y, 3)
    theta = float(np.linalg.norm(x))
    _check_chart(theta)
    return _ddexpinv_so3(x, y, _coefficients(theta))


def log_so3(rot) -> np.ndarray:
    """Principal logarithm of a rotation with angle below ``LOG_LIMIT``."""
    rot = np.asarray(rot, dtype=float)
    cos_t = min(1.0, max(-1.0, 0.5 * (np.trace(rot) - 1.0)))
    theta = math.acos(cos_t)
    if theta >= LOG_LIMIT:
        raise AngleAtBranchBoundary(
            f"rotation angle {theta:.9g} too close to pi; re-anchor the chart")
    skew = vee(rot - rot.T)
    if theta < 0.5 * math.pi:
        alpha = scalar_triple(theta).alpha
        return skew / (2.0 * alpha)
    # Near pi the skew part is small; take the axis from the symmetric part.
    sym = 0.5 * (rot + rot.T) - cos_t * _I3
    k = int(np.argmax(np.diag(sym)))
    axis = sym[:, k] / math.sqrt(sym[k, k])
    if axis @ skew < 0.0:
        axis = -axis
    return theta * axis / np.linalg.norm(axis)


# ---------------------------------------------------------------------------
# SE(3)


@dataclass(frozen=True)
class Pose:
    """Rigid transform ``p -> rot @ p + trans``."""

    rot: np.ndarray
    trans: np.ndarray

    def __post_init__(self):
        rot = np.array(self.rot, dtype=float)
        trans = np.array(self.trans, dtype=float)
        if rot.shape != (3, 3) or trans.shape != (3,):
            raise ValueError("Pose needs a 3x3 rotation and a 3-vector")
        if np.linalg.norm(rot.T @ rot - _I3) > 1e-9 or abs(np.linalg.det(rot) - 1.0) > 1e-9:
            raise ValueError("rotation block is not in SO(3)")
        object.__setattr__(self, "rot", rot)
        object.__setattr__(self, "trans", trans)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(_I3, np.zeros(3))

    @classmethod
    def from_matrix(cls, m) -> "Pose":
        m = np.asarray(m, dtype=float)
        return cls(m[:3, :3], m[:3, 3])

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rot
        m[:3, 3] = self.trans
        return m

    def inverse(self) -> "Pose":
        return Pose(self.rot.T, -self.rot.T @ self.trans)

    def __matmul__(self, other: "Pose") -> "Pose":
        return Pose(self.rot @ other.rot, self.rot @ other.trans + self.trans)


def hat(X) -> np.ndarray:
    """4x4 homogeneous form of a screw vector."""
    X = _vec(X, 6)
    m = np.zeros((4, 4))
    m[:3, :3] = tilde(X[:3])
    m[:3, 3] = X[3:]
    return m


def exp_se3(X) -> Pose:
    X = _vec(X, 6)
    x, y = X[:3], X[3:]
    return Pose(exp_so3(x), dexp_so3(x) @ y)


def log_se3(C: Pose) -> np.ndarray:
    x = log_so3(C.rot)
    return np.concatenate([x, dexpinv_so3(x) @ C.trans])


def ad(X) -> np.ndarray:
    X = _vec(X, 6)
    xt = tilde(X[:3])
    m = np.zeros((6, 6))
    m[:3, :3] = xt
    m[3:, 3:] = xt
    m[3:, :3] = tilde(X[3:])
    return m


def Ad(C: Pose) -> np.ndarray:
    """Adjoint of a pose, mapping body twists to spatial twists."""
    m = np.zeros((6, 6))
    m[:3, :3] = C.rot
    m[3:, 3:] = C.rot
    m[3:, :3] = tilde(C.trans) @ C.rot
    return m


def dexp_series(X, tol: float = 1e-15, max_terms: int = 40) -> np.ndarray:
    """Partial sum of ``sum_i ad(X)^i / (i + 1)!``."""
    a = ad(X)
    term = _I6.copy()
    total = term.copy()
    for i in range(1, max_terms):
        term = term @ a / (i + 1)
        if np.max(np.abs(term)) < tol:
            break
        total += term
    return total


def dexpinv_series(X, n_terms: int) -> np.ndarray:
    """Partial sum ``sum_{i < n_terms} B_i / i! ad(X)^i``."""
    if not 1 <= n_terms <= len(BERNOULLI):
        raise ValueError(f"n_terms must be in [1, {len(BERNOULLI)}]")
    a = ad(X)
    power = _I6.copy()
    total = _I6.copy()
    fact = 1.0
    for i in range(1, n_terms):
        power = power @ a
        fact *= i
        if BERNOULLI[i] != 0.0:
            total += (BERNOULLI[i] / fact) * power
    return total


def dexpinv_se3(X) -> np.ndarray:
    """``dexp_X^-1`` as ``I - ad/2 + c2 ad^2 + c4 ad^4``."""
    X = _vec(X, 6)
    theta = float(np.linalg.norm(X[:3]))
    _check_chart(theta)
    c = _coefficients(theta)
    a = ad(X)
    a2 = a @ a
    return _I6 - 0.5 * a + c.c2 * a2 + c.c4 * (a2 @ a2)


def dexpinv_blockform(X) -> np.ndarray:
    """``dexp_X^-1`` assembled from its SO(3) blocks."""
    X = _vec(X, 6)
    x, y = X[:3], X[3:]
    theta = float(np.linalg.norm(x))
    _check_chart(theta)
    c = _coefficients(theta)
    xt = tilde(x)
    diag = _I3 - 0.5 * xt + c.fg * (xt @ xt)
    m = np.zeros((6, 6))
    m[:3, :3] = diag
    m[3:, 3:] = diag
    m[3:, :3] = _ddexpinv_so3(x, y, c)
    return m


def _ddexpinv_se3_at(X):
    """Return ``U -> D(dexpinv)(X)[U]`` with the X-dependent parts hoisted."""
    x, y = X[:3], X[3:]
    theta = float(np.linalg.norm(x))
    _check_chart(theta)
    c = _coefficients(theta)
    xt, yt = tilde(x), tilde(y)
    xx = xt @ xt
    xy = x @ y
    sym_xy = xt @ yt + yt @ xt

    def apply(u, v, ut, vt):
        xu = x @ u
        sym_xu = xt @ ut + ut @ xt
        m = np.zeros((6, 6))
        diag = -0.5 * ut + c.fg * sym_xu + xu * c.fh * xx
        m[:3, :3] = diag
        m[3:, 3:] = diag
        m[3:, :3] = (
            -0.5 * vt
            + c.fg * (xt @ vt + vt @ xt + yt @ ut + ut @ yt)
            + c.fh * ((x @ v + y @ u) * xx + xy * sym_xu + xu * sym_xy)
            + c.dfh * xy * xu * xx
        )
        return m

    return apply


def ddexpinv_se3(X, U) -> np.ndarray:
    """Directional derivative of ``dexpinv_se3`` at ``X`` in direction ``U``."""
    X, U = _vec(X, 6), _vec(U, 6)
    u, v = U[:3], U[3:]
    return _ddexpinv_se3_at(X)(u, v, tilde(u), tilde(v))


_E3 = np.eye(3)
_E3_TILDE = tuple(tilde(e) for e in _E3)
_Z3 = np.zeros(3)
_Z33 = np.zeros((3, 3))


def ddexpinv_se3_basis(X) -> np.ndarray:
    """Stack ``D(dexpinv)(X)[e_i]`` for the six canonical directions."""
    apply = _ddexpinv_se3_at(_vec(X, 6))
    out = np.empty((6, 6, 6))
    for i in range(3):
        out[i] = apply(_E3[i], _Z3, _E3_TILDE[i], _Z33)
        out[i + 3] = apply(_Z3, _E3[i], _Z33, _E3_TILDE[i])
    return out
