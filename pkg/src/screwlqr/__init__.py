"""Screw-coordinate linearization and time-varying LQR on SE(3)."""

from .dynamics import MassInertia, forward_dynamics, inverse_dynamics, state_derivative
from .errors import (AngleAtBranchBoundary, ChartSingularity, ConfigError, GridMismatch,
                     NonFiniteState, RiccatiDivergence, ScrewLQRError, TimeOutOfHorizon)
from .liealg import Ad, Pose, ad, dexpinv_se3, exp_se3, log_se3
from .linearize import StateJacobian, linearize_dynamics
from .sim import SimConfig, constant_screw_nominal, hover_nominal, rollout_closed_loop
from .tvlqr import CostWeights, GainSchedule, NominalTrajectory, riccati_backward

__version__ = "0.1.0"
