import numpy as np
import pytest
from hypothesis import given, settings

from screwlqr import liealg as la
from screwlqr.dynamics import MassInertia, gyroscopic, state_derivative
from screwlqr.linearize import (controllability_rank, coriolis_jacobian,
                                finite_difference_jacobian, input_matrix, linearize_dynamics,
                                reconstruction_jacobian)
from screwlqr.errors import ChartSingularity

from oracles import screws, unit, vec6

BODY = MassInertia.from_unique(2.0, 3.0, 4.0, 0.1, -0.2, 0.3, 1.7)


def _rel(a, b):
    return np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b)))


# --- finite differences ---------------------------------------------------------

def test_fd_of_linear_map(rng):
    A = rng.standard_normal((4, 3))
    np.testing.assert_allclose(finite_difference_jacobian(lambda x: A @ x, rng.standard_normal(3)),
                               A, atol=1e-10)


def test_fd_of_squares_is_diagonal():
    x0 = np.array([0.5, -1.0, 2.0])
    J = finite_difference_jacobian(lambda x: x ** 2, x0)
    np.testing.assert_allclose(J, np.diag(2 * x0), atol=1e-9)


def test_fd_of_quadratic_form_gradient(rng):
    P = rng.standard_normal((5, 5))
    x0 = rng.standard_normal(5)
    J = finite_difference_jacobian(lambda x: np.atleast_1d(x @ P @ x), x0)
    np.testing.assert_allclose(J[0], (P + P.T) @ x0, atol=1e-9)


def test_fd_rejects_bad_step():
    with pytest.raises(ValueError):
        finite_difference_jacobian(lambda x: x, np.zeros(2), h=0.0)


# --- reconstruction block ---------------------------------------------------------

def test_reconstruction_jacobian_zero_twist(rng):
    assert np.array_equal(reconstruction_jacobian(rng.standard_normal(6), np.zeros(6)),
                          np.zeros((6, 6)))


def test_reconstruction_jacobian_at_chart_origin(rng):
    # First-order term of dexpinv(-S) V = V + 1/2 ad(S) V = V - 1/2 ad(V) S
    V = rng.standard_normal(6)
    J = reconstruction_jacobian(np.zeros(6), V)
    np.testing.assert_allclose(J, -0.5 * la.ad(V), atol=1e-15)
    fd = finite_difference_jacobian(lambda s: la.dexpinv_se3(-s) @ V, np.zeros(6))
    assert np.max(np.abs(J - fd)) < 1e-7


def test_reconstruction_jacobian_unit_angle(rng):
    for _ in range(20):
        S = np.concatenate([unit(rng.standard_normal(3)), rng.standard_normal(3)])
        V = rng.standard_normal(6)
        fd = finite_difference_jacobian(lambda s: la.dexpinv_se3(-s) @ V, S)
        assert _rel(reconstruction_jacobian(S, V), fd) < 1e-6


def test_reconstruction_jacobian_rejects_chart_edge():
    with pytest.raises(ChartSingularity):
        reconstruction_jacobian(np.array([0, 0, 7.0, 0, 0, 0]), np.ones(6))


# --- coriolis block -----------------------------------------------------------------

def test_coriolis_jacobian_zero_twist():
    assert np.array_equal(coriolis_jacobian(BODY, np.zeros(6)), np.zeros((6, 6)))


@given(vec6)
def test_coriolis_jacobian_fd(V):
    fd = finite_difference_jacobian(lambda v: gyroscopic(BODY, v), V)
    assert np.max(np.abs(coriolis_jacobian(BODY, V) - fd)) < 1e-8 * (1 + np.max(np.abs(fd)))


@given(vec6)
def test_coriolis_jacobian_euler_homogeneity(V):
    # The map is quadratic in V, so J(V) V = 2 g(V).
    lhs = coriolis_jacobian(BODY, V) @ V
    np.testing.assert_allclose(lhs, 2 * gyroscopic(BODY, V), atol=1e-10 * (1 + V @ V))


# --- full linearization -------------------------------------------------------------

def test_origin_is_double_integrator():
    jac = linearize_dynamics(BODY, np.zeros(12))
    a = np.zeros((12, 12))
    a[:6, 6:] = np.eye(6)
    assert np.array_equal(jac.a, a)
    assert np.array_equal(jac.b[:6], np.zeros((6, 6)))
    np.testing.assert_array_equal(jac.b[6:], BODY.inverse)
    assert controllability_rank(jac.a, jac.b) == 12


def test_identity_body_input_matrix():
    b = input_matrix(MassInertia.identity())
    np.testing.assert_array_equal(b[6:], np.eye(6))
    np.testing.assert_array_equal(b[:6], 0)


def test_input_matrix_is_state_independent(rng):
    b0 = linearize_dynamics(BODY, np.zeros(12)).b
    for _ in range(10):
        x = np.concatenate([0.4 * rng.standard_normal(6), rng.standard_normal(6)])
        assert np.array_equal(linearize_dynamics(BODY, x, rng.standard_normal(6)).b, b0)


@settings(max_examples=40)
@given(screws(ang_max=2.0), vec6, vec6)
def test_linearization_matches_fd(S, V, W):
    if np.linalg.norm(V) > 5.0:
        V = 5.0 * V / np.linalg.norm(V)
    x = np.concatenate([S, V])
    jac = linearize_dynamics(BODY, x, W)
    a_fd = finite_difference_jacobian(lambda z: state_derivative(BODY, z, W), x)
    b_fd = finite_difference_jacobian(lambda u: state_derivative(BODY, x, u), W)
    assert _rel(jac.a, a_fd) < 1e-6
    assert np.max(np.abs(jac.b - b_fd)) < 1e-9
    assert np.array_equal(jac.a[6:, :6], np.zeros((6, 6)))
    assert np.array_equal(jac.b[:6], np.zeros((6, 6)))


@pytest.mark.parametrize("edge", [la.SMALL_ANGLE, la.SERIES_CUTOFF])
def test_linearization_continuous_across_seam(rng, edge):
    for _ in range(20):
        d, y, V = unit(rng.standard_normal(3)), rng.standard_normal(3), rng.standard_normal(6)
        lo = np.concatenate([edge * (1 - 4e-16) * d, y, V])
        hi = np.concatenate([edge * (1 + 4e-16) * d, y, V])
        assert np.max(np.abs(linearize_dynamics(BODY, lo).a - linearize_dynamics(BODY, hi).a)) < 1e-9


def test_controllability_rank_deficient_example():
    a = np.zeros((2, 2))
    b = np.array([[1.0], [0.0]])
    assert controllability_rank(a, b) == 1
