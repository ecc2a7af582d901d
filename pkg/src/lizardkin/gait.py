"""Actuator sweep profiles for walking, trotting and turning, and their rollout.

Each actuator follows ``offset + amplitude * w(u)`` where ``u`` is the
phase-shifted fraction of the period and ``w`` is a duty-shaped cosine: it
falls from +1 to -1 during the first ``duty`` of the cycle (stance) and
returns during the rest (swing).  ``duty = 1`` gives a plain cosine.

Actuator order is (a1, a2, a3, a4), driving legs 1, 2, 3 and 4.  Diagonal
pairs are legs 1+3 and 2+4.  All numeric defaults here are tuning choices
checked against the feasibility and singularity sweeps in the test suite.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BadParams, KinematicsError
from .robot import ActuatorCommand, RobotConfig, RobotState, full_singularity, solve

logger = logging.getLogger(__name__)

__all__ = [
    "GaitKind",
    "GaitProfile",
    "Sample",
    "Trajectory",
    "waveform",
    "profile",
    "rollout",
    "sample_count",
]

DEG = math.pi / 180.0
DEFAULT_PERIOD = 2.0
# 40 deg already overstretches a body loop at the sweep extremes
WALK_AMPLITUDE = 30 * DEG
TROT_AMPLITUDE = 30 * DEG
TURN_OUTER = 30 * DEG
TURN_INNER = 10 * DEG
TURN_DUTY = 0.5
DIAGONAL_PHASE = (0.0, math.pi, 0.0, math.pi)


class GaitKind(enum.Enum):
    WALK = "walk"
    TROT = "trot"
    TURN_LEFT = "turn-left"
    TURN_RIGHT = "turn-right"


Quad = tuple[float, float, float, float]


def _quad(values, name) -> Quad:
    try:
        out = tuple(float(v) for v in values)
    except TypeError:
        out = (float(values),) * 4
    if len(out) != 4:
        raise BadParams(f"{name} needs 4 values, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise BadParams(f"{name} must be finite")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class GaitProfile:
    kind: GaitKind
    amplitude: Quad
    phase: Quad
    offset: Quad
    period: float = DEFAULT_PERIOD
    duty: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", GaitKind(self.kind))
        for name in ("amplitude", "phase", "offset"):
            object.__setattr__(self, name, _quad(getattr(self, name), name))
        if not (math.isfinite(self.period) and self.period > 0):
            raise BadParams(f"period must be > 0, got {self.period}")
        if not 0 < self.duty <= 1:
            raise BadParams(f"duty must lie in (0, 1], got {self.duty}")
        if any(a < 0 for a in self.amplitude):
            raise BadParams("amplitudes must be >= 0")

    def check_range(self, config: RobotConfig) -> None:
        """Reject sweeps that leave the configured joint range."""
        for k, (amp, off, mid) in enumerate(zip(self.amplitude, self.offset, config.neutral.as_tuple())):
            lo, hi = off - amp - mid, off + amp - mid
            if max(abs(lo), abs(hi)) > config.joint_range + 1e-12:
                raise BadParams(
                    f"a{k + 1} sweeps {math.degrees(off - amp):.2f}..{math.degrees(off + amp):.2f} deg, "
                    f"outside {math.degrees(mid):.1f} +/- {math.degrees(config.joint_range):.1f} deg"
                )

    def command(self, t: float) -> ActuatorCommand:
        values = []
        for amp, ph, off in zip(self.amplitude, self.phase, self.offset):
            u = (t / self.period + ph / (2 * math.pi)) % 1.0
            values.append(off + amp * waveform(u, self.duty))
        return ActuatorCommand.from_sequence(values)

    def mirrored(self) -> "GaitProfile":
        """Bilateral mirror: swap the left (a1, a4) and right (a2, a3) actuators."""
        def swap(q):
            return (q[1], q[0], q[3], q[2])
        kind = {
            GaitKind.TURN_LEFT: GaitKind.TURN_RIGHT,
            GaitKind.TURN_RIGHT: GaitKind.TURN_LEFT,
        }.get(self.kind, self.kind)
        return replace(self, kind=kind, amplitude=swap(self.amplitude), phase=swap(self.phase),
                       offset=swap(self.offset))


def waveform(u: float, duty: float) -> float:
    """Duty-shaped cosine on the unit cycle; +1 at u = 0, -1 at u = duty."""
    u = u % 1.0
    if duty >= 1.0:
        return math.cos(2 * math.pi * u)
    if u < duty:
        return math.cos(math.pi * u / duty)
    return -math.cos(math.pi * (u - duty) / (1.0 - duty))


def profile(kind, config: RobotConfig | None = None, **params) -> GaitProfile:
    """Default profile of a gait kind; keyword ``params`` override any field.

    ``amplitude`` may be a scalar (applied to all four actuators).  For turns,
    ``outer`` and ``inner`` set the two side amplitudes instead.
    """
    kind = GaitKind(kind)
    config = config or RobotConfig()
    offset = params.pop("offset", config.neutral.as_tuple())
    outer = params.pop("outer", TURN_OUTER)
    inner = params.pop("inner", TURN_INNER)
    unknown = set(params) - {"amplitude", "phase", "period", "duty"}
    if unknown:
        raise BadParams(f"unknown gait parameters: {sorted(unknown)}")

    if kind is GaitKind.WALK:
        base = dict(amplitude=WALK_AMPLITUDE, phase=DIAGONAL_PHASE, duty=0.75)
    elif kind is GaitKind.TROT:
        base = dict(amplitude=TROT_AMPLITUDE, phase=DIAGONAL_PHASE, duty=0.5)
    else:
        # left-driving actuators are a1 and a4
        base = dict(amplitude=(inner, outer, outer, inner), phase=DIAGONAL_PHASE, duty=TURN_DUTY)
    base.update(params)
    base.setdefault("period", DEFAULT_PERIOD)
    prof = GaitProfile(kind=GaitKind.TURN_LEFT if kind is GaitKind.TURN_RIGHT else kind,
                       offset=offset, **base)
    if kind is GaitKind.TURN_RIGHT:
        prof = prof.mirrored()
    prof.check_range(config)
    return prof


@dataclass(frozen=True)
class Sample:
    t: float
    cmd: ActuatorCommand
    state: RobotState
    flags: tuple[bool, bool, bool]  # gain, loss, any leg


@dataclass
class Trajectory:
    profile: GaitProfile
    samples: list[Sample] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def foot_paths(self) -> np.ndarray:
        """Array of shape (n_samples, 4, 2)."""
        return np.array([s.state.foot_tips for s in self.samples], dtype=float)

    def singular_count(self) -> int:
        return sum(1 for s in self.samples if any(s.flags))

    def max_residual(self, config: RobotConfig) -> float:
        return max((s.state.max_residual(config) for s in self.samples), default=0.0)


def sample_count(period: float, n_cycles: float, dt: float) -> int:
    # guard against 2*period/dt landing a hair below an integer
    return int(math.floor(n_cycles * period / dt + 1e-9)) + 1


def rollout(config: RobotConfig, prof: GaitProfile, n_cycles: float = 2, dt: float | None = None,
            tol: float = 1e-8) -> Trajectory:
    """Sample ``prof`` at t = 0, dt, 2 dt, ... and solve the robot at each step."""
    if dt is None:
        dt = prof.period / 200
    if not dt > 0:
        raise BadParams("dt must be > 0")
    if not n_cycles > 0:
        raise BadParams("n_cycles must be > 0")
    prof.check_range(config)
    traj = Trajectory(prof)
    for i in range(sample_count(prof.period, n_cycles, dt)):
        t = i * dt
        cmd = prof.command(t)
        try:
            state = solve(config, cmd, check_range=False)
        except KinematicsError as exc:
            exc.args = (f"t = {t:.6g} s: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise
        rep = full_singularity(config, state, tol)
        traj.samples.append(Sample(t, cmd, state, (rep.gain, rep.loss, any(rep.legs))))
    logger.debug("rollout %s: %d samples", prof.kind.value, len(traj.samples))
    return traj
