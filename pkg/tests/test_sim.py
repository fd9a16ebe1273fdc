import numpy as np
import pytest

from screwlqr.dynamics import MassInertia, forward_dynamics, inverse_dynamics
from screwlqr.errors import ChartSingularity, GridMismatch, NonFiniteState
from screwlqr.sim import (SimConfig, WrenchPulse, constant_screw_nominal, hover_nominal,
                          integrate, rollout_closed_loop, rollout_open_loop)
from screwlqr.tvlqr import CostWeights, riccati_backward

BODY = MassInertia.principal([1.0, 2.0, 3.5], 2.0)
V0 = np.array([0.2, -0.1, 0.15, 0.5, 0.2, -0.1])
ZERO = lambda t, x: np.zeros(6)  # noqa: E731


def test_sim_config_validation():
    cfg = SimConfig(0.1, 1.0)
    assert cfg.n_steps == 10
    np.testing.assert_allclose(cfg.grid(2.0), 2.0 + 0.1 * np.arange(11))
    for kwargs in ({"dt": 0.0, "duration": 1.0}, {"dt": 0.1, "duration": 0.05},
                   {"dt": 0.1, "duration": 1.0, "integrator": "rk45"},
                   {"dt": 0.1, "duration": 1.0, "initial_perturbation": np.zeros(6)}):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)


def test_wrench_pulse_window():
    p = WrenchPulse(1.0, 0.5, np.ones(6))
    assert np.array_equal(p(0.99), np.zeros(6))
    assert np.array_equal(p(1.0), np.ones(6))
    assert np.array_equal(p(1.5), np.zeros(6))


def test_rest_state_is_fixed_point():
    x0 = np.concatenate([np.array([0.3, -0.2, 0.1, 1.0, 2.0, 3.0]), np.zeros(6)])
    roll = integrate(BODY, x0, ZERO, SimConfig(0.01, 1.0))
    assert np.array_equal(roll.states, np.tile(x0, (101, 1)))


def test_principal_axis_screw_is_free_motion():
    # spin and drift along one principal axis: ad(V)^T M V = 0
    V = np.array([0.0, 0.0, 0.8, 0.0, 0.0, 0.3])
    assert np.array_equal(inverse_dynamics(BODY, V, np.zeros(6)), np.zeros(6))
    roll = integrate(BODY, np.concatenate([np.zeros(6), V]), ZERO, SimConfig(1e-3, 5.0))
    np.testing.assert_allclose(roll.states[:, :6], roll.times[:, None] * V, atol=1e-9)


def test_constant_screw_nominal_shape_and_residual():
    traj = constant_screw_nominal(BODY, V0, 2.0, 0.01)
    assert traj.times.size == 201
    np.testing.assert_allclose(traj.states[:, :6], traj.times[:, None] * V0, rtol=0, atol=1e-15)
    for x, W in zip(traj.states, traj.wrenches):
        assert np.max(np.abs(forward_dynamics(BODY, x[6:], W))) < 1e-14


def test_constant_screw_zero_twist_is_hover():
    traj = constant_screw_nominal(BODY, np.zeros(6), 1.0, 0.1)
    assert not np.any(traj.states) and not np.any(traj.wrenches)


def test_pure_translation_needs_no_wrench():
    traj = constant_screw_nominal(BODY, [0, 0, 0, 1.0, -2.0, 0.5], 1.0, 0.1)
    assert np.array_equal(traj.wrenches, np.zeros_like(traj.wrenches))


def test_generic_screw_open_loop_reproduces_nominal():
    traj = constant_screw_nominal(BODY, V0, 10.0, 0.01)
    roll = rollout_open_loop(BODY, traj, SimConfig(0.01, 10.0))
    assert np.max(np.abs(roll.states - traj.states)) < 1e-8


def test_constant_screw_horizon_outside_chart():
    with pytest.raises(ChartSingularity):
        constant_screw_nominal(BODY, [0, 0, 1.0, 0, 0, 0], 7.0, 0.1)


def test_integrate_reports_chart_exit_with_partial_rollout():
    x0 = np.concatenate([np.zeros(6), [0, 0, 1.0, 0, 0, 0]])
    with pytest.raises(ChartSingularity) as info:
        integrate(MassInertia.identity(), x0, ZERO, SimConfig(0.1, 10.0))
    err = info.value
    # the RK4 stages of the step from t = 6.2 probe t = 6.3 > 2 pi
    assert err.knot == 62
    assert err.partial.states.shape == (63, 12)
    assert np.linalg.norm(err.partial.states[-1, :3]) < 2 * np.pi


def test_integrate_reports_non_finite_state():
    def wrench(t, x):
        return np.full(6, np.inf) if t > 0.25 else np.zeros(6)

    with pytest.raises(NonFiniteState) as info:
        integrate(BODY, np.zeros(12), wrench, SimConfig(0.1, 1.0))
    assert info.value.knot == 2
    assert info.value.partial.times.size == 3


def _final_state(integrator, dt, T=1.0):
    x0 = np.concatenate([np.zeros(6), V0 * 3])
    return integrate(BODY, x0, ZERO, SimConfig(dt, T, integrator)).states[-1]


@pytest.mark.parametrize("integrator, ratio, tol", [("rk4", 16.0, 1.5), ("euler", 2.0, 0.1)])
def test_integrator_order(integrator, ratio, tol):
    a, b, c = (_final_state(integrator, dt) for dt in (0.04, 0.02, 0.01))
    observed = np.linalg.norm(a - b) / np.linalg.norm(b - c)
    assert abs(observed - ratio) < tol


def test_rollout_grid_must_match_nominal():
    traj = hover_nominal(1.0, 0.01)
    with pytest.raises(GridMismatch):
        rollout_open_loop(BODY, traj, SimConfig(0.02, 1.0))


def test_rollout_metrics_without_perturbation():
    traj = constant_screw_nominal(BODY, V0, 3.0, 0.01)
    w = CostWeights(1.0, 1.0, 1.0)
    sched = riccati_backward(BODY, traj, w)
    roll = rollout_closed_loop(BODY, traj, sched, SimConfig(0.01, 3.0), w)
    assert roll.err_norms.shape == (301,)
    assert roll.final_error < 1e-8 and roll.rms_error < 1e-8
    assert roll.cost < 1e-12


def test_closed_loop_beats_open_loop_on_hover(rng):
    traj = hover_nominal(10.0, 0.01)
    w = CostWeights(1.0, 1.0, 1.0)
    sched = riccati_backward(MassInertia.identity(), traj, w)
    d = rng.standard_normal(12)
    cfg = SimConfig(0.01, 10.0, initial_perturbation=0.05 * d / np.linalg.norm(d),
                    disturbance=WrenchPulse(2.0, 0.5, np.array([0, 0, 0.1, 0, 0.1, 0])))
    closed = rollout_closed_loop(MassInertia.identity(), traj, sched, cfg, w)
    opened = rollout_open_loop(MassInertia.identity(), traj, cfg, w)
    assert closed.cost < opened.cost
    assert closed.err_norms[0] == pytest.approx(0.05)
    # the applied wrench includes the disturbance pulse
    k = int(round(2.2 / 0.01))
    np.testing.assert_allclose(opened.wrenches[k], [0, 0, 0.1, 0, 0.1, 0])
