"""Run configuration loaded from a YAML file.

Example::

    seed: 7
    output_dir: out
    body:
      mass: 2.0
      inertia: [1.0, 2.0, 3.5]      # principal moments, or
                                    # [ixx, iyy, izz, ixy, ixz, iyz]
    nominal:
      kind: constant_screw          # or hover
      twist: [0.2, -0.1, 0.15, 0.5, 0.2, -0.1]
      duration: 10.0
      dt: 0.01
    weights:
      q: 1.0                        # scalar, 12 diagonal entries or 12x12
      qf: 1.0
      r: 1.0
    sim:
      integrator: rk4
      perturbation_norm: 0.05
      disturbance: {start: 2.0, duration: 0.5, wrench: [0, 0, 0.1, 0, 0, 0]}

All quantities are SI.  Validation errors name the offending field and, when
the field is present in the file, its line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .dynamics import MassInertia
from .errors import ConfigError
from .liealg import Pose, exp_se3
from .sim import SimConfig, WrenchPulse
from .tvlqr import CostWeights


@dataclass(frozen=True)
class NominalSpec:
    kind: str = "hover"
    twist: np.ndarray = field(default_factory=lambda: np.zeros(6))
    duration: float = 10.0
    dt: float = 0.01
    anchor: Pose = field(default_factory=Pose.identity)


@dataclass(frozen=True)
class SimSpec:
    integrator: str = "rk4"
    perturbation_norm: float = 0.05
    initial_perturbation: Optional[np.ndarray] = None
    disturbance: Optional[WrenchPulse] = None


@dataclass(frozen=True)
class RunConfig:
    body: MassInertia = field(default_factory=MassInertia.identity)
    nominal: NominalSpec = field(default_factory=NominalSpec)
    weights: CostWeights = field(
        default_factory=lambda: CostWeights(np.eye(12), np.eye(12), np.eye(6)))
    sim: SimSpec = field(default_factory=SimSpec)
    output_dir: Path = Path("out")
    seed: int = 0
    check_samples: int = 200

    def perturbation(self) -> np.ndarray:
        """Initial state error: explicit, or a seeded random direction."""
        if self.sim.initial_perturbation is not None:
            return self.sim.initial_perturbation
        if self.sim.perturbation_norm == 0.0:
            return np.zeros(12)
        d = np.random.default_rng(self.seed).standard_normal(12)
        return self.sim.perturbation_norm * d / np.linalg.norm(d)

    def sim_config(self) -> SimConfig:
        return SimConfig(dt=self.nominal.dt, duration=self.nominal.duration,
                         integrator=self.sim.integrator,
                         disturbance=self.sim.disturbance,
                         initial_perturbation=self.perturbation())


_SCHEMA = {
    "seed": None, "output_dir": None, "check_samples": None,
    "body": {"mass": None, "inertia": None},
    "nominal": {"kind": None, "twist": None, "duration": None, "dt": None, "anchor": None},
    "weights": {"q": None, "qf": None, "r": None},
    "sim": {"integrator": None, "perturbation_norm": None, "initial_perturbation": None,
            "disturbance": {"start": None, "duration": None, "wrench": None}},
}


def _lines(node, prefix=""):
    out = {}
    if isinstance(node, yaml.MappingNode):
        for key, val in node.value:
            path = f"{prefix}{key.value}"
            out[path] = key.start_mark.line + 1
            out.update(_lines(val, path + "."))
    return out


class _Reader:
    def __init__(self, data, lines):
        self.data = data
        self.lines = lines

    def fail(self, path, msg):
        raise ConfigError(path, msg, self.lines.get(path))

    def get(self, path, default=None):
        node = self.data
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def number(self, path, default, positive=False, nonneg=False):
        v = self.get(path, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
            self.fail(path, f"expected a finite number, got {v!r}")
        if positive and not v > 0:
            self.fail(path, f"must be positive, got {v!r}")
        if nonneg and v < 0:
            self.fail(path, f"must be non-negative, got {v!r}")
        return float(v)

    def vector(self, path, sizes, default=None):
        v = self.get(path, default)
        try:
            a = np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            self.fail(path, f"expected a numeric list, got {v!r}")
        if a.ndim != 1 or a.size not in sizes or not np.all(np.isfinite(a)):
            self.fail(path, f"expected {' or '.join(map(str, sizes))} finite numbers")
        return a

    def check_keys(self, schema=_SCHEMA, node=None, prefix=""):
        node = self.data if node is None else node
        if not isinstance(node, dict):
            self.fail(prefix.rstrip(".") or "<root>", "expected a mapping")
        for key, val in node.items():
            path = f"{prefix}{key}"
            if key not in schema:
                self.fail(path, "unknown field")
            if isinstance(schema[key], dict) and val is not None:
                self.check_keys(schema[key], val, path + ".")


def _parse(data, lines) -> RunConfig:
    rd = _Reader(data, lines)
    rd.check_keys()

    mass = rd.number("body.mass", 1.0, positive=True)
    inertia = rd.vector("body.inertia", (3, 6), [1.0, 1.0, 1.0])
    try:
        if inertia.size == 3:
            body = MassInertia.principal(inertia, mass)
        else:
            body = MassInertia.from_unique(*inertia, mass)
    except ValueError as exc:
        rd.fail("body.inertia", str(exc))

    kind = rd.get("nominal.kind", "hover")
    if kind not in ("hover", "constant_screw"):
        rd.fail("nominal.kind", f"expected 'hover' or 'constant_screw', got {kind!r}")
    twist = rd.vector("nominal.twist", (6,), [0.0] * 6)
    if kind == "hover":
        twist = np.zeros(6)
    dt = rd.number("nominal.dt", 0.01, positive=True)
    duration = rd.number("nominal.duration", 10.0, positive=True)
    if duration < dt:
        rd.fail("nominal.duration", "must be at least dt")
    anchor = exp_se3(rd.vector("nominal.anchor", (6,), [0.0] * 6))
    nominal = NominalSpec(kind, twist, duration, dt, anchor)

    def weight(name, n):
        v = rd.get(f"weights.{name}", 1.0)
        try:
            return np.asarray(v, dtype=float) if not isinstance(v, (int, float)) else float(v)
        except (TypeError, ValueError):
            rd.fail(f"weights.{name}", f"expected scalar, list or matrix, got {v!r}")

    try:
        weights = CostWeights(weight("q", 12), weight("qf", 12), weight("r", 6))
    except ValueError as exc:
        name = str(exc).split()[0]
        rd.fail(f"weights.{name}", str(exc))

    integrator = rd.get("sim.integrator", "rk4")
    if integrator not in ("rk4", "euler"):
        rd.fail("sim.integrator", f"expected 'rk4' or 'euler', got {integrator!r}")
    pnorm = rd.number("sim.perturbation_norm", 0.05, nonneg=True)
    pert = None
    if rd.get("sim.initial_perturbation") is not None:
        pert = rd.vector("sim.initial_perturbation", (12,))
    pulse = None
    if rd.get("sim.disturbance") is not None:
        pulse = WrenchPulse(rd.number("sim.disturbance.start", 0.0, nonneg=True),
                            rd.number("sim.disturbance.duration", 0.0, nonneg=True),
                            rd.vector("sim.disturbance.wrench", (6,), [0.0] * 6))
    sim = SimSpec(integrator, pnorm, pert, pulse)

    seed = rd.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        rd.fail("seed", f"expected a non-negative integer, got {seed!r}")
    samples = rd.get("check_samples", 200)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        rd.fail("check_samples", f"expected a positive integer, got {samples!r}")
    out = rd.get("output_dir", "out")
    if not isinstance(out, str):
        rd.fail("output_dir", "expected a path string")
    return RunConfig(body, nominal, weights, sim, Path(out), seed, samples)


def parse_config(text: str) -> RunConfig:
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError("<yaml>", str(exc.problem), mark.line + 1 if mark else None) from exc
    if data is None:
        data = {}
    lines = _lines(root) if root is not None else {}
    return _parse(data, lines)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)
