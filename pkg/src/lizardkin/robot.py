"""The assembled lizard: head, tail, two RRPRR body sides and four legs.

Actuators drive theta1 (A1), theta4 (A2), theta8 (A3) and theta5 (A4), each
in the measurement described in :mod:`lizardkin.core`.  :func:`solve` runs
the sub-systems in order: head five-bar, front legs, tail five-bar, rear
legs, then the two body sides, whose end angles are imposed by the ternary
links.  Springs are treated as exact angle pass-through to the legs.

Frames
------
Head and tail points are reported in their five-bar frames; the tail works
below its base line by default (``tail_assembly=-1``), mirroring the head.
Body points are reported in the body-loop frames.  Foot tips are in the
chassis frame (x to the right, y forward) through each leg's mount pose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fivebar, fourbar
from .core import JointState, LinkSet, LoopId, loop_residual, mirror_angle, wrap_angle
from .errors import CommandOutOfRange, CouplingInfeasible, KinematicsError, NoAssembly
from .fivebar import FiveBarGeometry
from .fourbar import FourBarGeometry

__all__ = [
    "LegMount",
    "RobotConfig",
    "ActuatorCommand",
    "RobotState",
    "SingularityReport",
    "solve",
    "assemble_k_matrices",
    "full_singularity",
    "singular_factors",
    "kstar_closed_form",
    "passive_scale",
    "active_scale",
    "ACTIVE_COLUMNS",
    "PASSIVE_COLUMNS",
    "NEUTRAL",
]

DEG = math.pi / 180.0


@dataclass(frozen=True)
class LegMount:
    """Planar pose of a leg frame on the chassis.

    ``mirror`` flips the leg's local x axis before rotating, so right-hand
    legs are mirror images of the left-hand ones.
    """

    x: float
    y: float
    heading: float
    mirror: bool = False

    def to_world(self, point) -> tuple[float, float]:
        px, py = point
        if self.mirror:
            px = -px
        c, s = math.cos(self.heading), math.sin(self.heading)
        return (self.x + c * px - s * py, self.y + s * px + c * py)


def default_mounts() -> tuple[LegMount, LegMount, LegMount, LegMount]:
    # legs 1..4: front-left, front-right, back-right, back-left; the rear
    # mounts are turned half a revolution so every foot points outward
    return (
        LegMount(-40.0, 67.5, 90 * DEG),
        LegMount(40.0, 67.5, -90 * DEG, mirror=True),
        LegMount(40.0, -67.5, 90 * DEG, mirror=True),
        LegMount(-40.0, -67.5, -90 * DEG),
    )


@dataclass(frozen=True)
class ActuatorCommand:
    """Actuator angles (rad): a1 -> theta1, a2 -> theta4, a3 -> theta8, a4 -> theta5."""

    a1: float
    a2: float
    a3: float
    a4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    @classmethod
    def from_sequence(cls, values) -> "ActuatorCommand":
        a1, a2, a3, a4 = (float(v) for v in values)
        return cls(a1, a2, a3, a4)


# actuator neutral pose: head links tilted 15 deg outward, tail links 15 deg
# inward, so no active block of K is singular at rest
NEUTRAL = ActuatorCommand(105 * DEG, 105 * DEG, -75 * DEG, -75 * DEG)


@dataclass(frozen=True)
class RobotConfig:
    links: LinkSet = field(default_factory=LinkSet)
    leg_geoms: tuple[FourBarGeometry, ...] | None = None
    leg_mounts: tuple[LegMount, ...] = field(default_factory=default_mounts)
    neutral: ActuatorCommand = NEUTRAL
    joint_range: float = 45 * DEG
    head_assembly: int = 1
    tail_assembly: int = -1
    body_branch: tuple[int, int] = (1, 1)
    leg_branch: int = fourbar.OPEN
    toe: float = 0.0

    def __post_init__(self):
        if self.leg_geoms is None:
            g = FourBarGeometry(self.links.lg1, self.links.lg12, self.links.lg13, self.links.lg10)
            object.__setattr__(self, "leg_geoms", (g,) * 4)
        if len(self.leg_geoms) != 4 or len(self.leg_mounts) != 4:
            raise ValueError("four legs required")
        if not self.joint_range > 0:
            raise ValueError("joint_range must be > 0")
        for v in (self.head_assembly, self.tail_assembly, self.leg_branch, *self.body_branch):
            if v not in (1, -1):
                raise ValueError("branch selectors are +1 or -1")

    @property
    def head_geom(self) -> FiveBarGeometry:
        L = self.links
        return FiveBarGeometry(L.l0, L.l1, L.l2, L.l3, L.l4)

    @property
    def tail_geom(self) -> FiveBarGeometry:
        L = self.links
        return FiveBarGeometry(L.l5, L.l6, L.l7, L.l8, L.l9)

    @property
    def slider_ranges(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (0.0, self.links.l10), (0.0, self.links.l15)

    def check_command(self, cmd: ActuatorCommand) -> None:
        names = ("a1", "a2", "a3", "a4")
        for name, value, mid in zip(names, cmd.as_tuple(), self.neutral.as_tuple()):
            if abs(wrap_angle(value - mid)) > self.joint_range + 1e-12:
                raise CommandOutOfRange(
                    f"{name} = {math.degrees(value):.3f} deg outside "
                    f"{math.degrees(mid):.1f} +/- {math.degrees(self.joint_range):.1f} deg"
                )


Point = tuple[float, float]


@dataclass(frozen=True)
class RobotState:
    joints: JointState
    head_point: Point
    tail_point: Point
    body_points: tuple[Point, Point]
    foot_tips: tuple[Point, Point, Point, Point]

    def residuals(self, config: RobotConfig) -> dict[LoopId, np.ndarray]:
        return {loop: loop_residual(config.links, self.joints, loop) for loop in LoopId}

    def max_residual(self, config: RobotConfig) -> float:
        return max(float(np.max(np.abs(r))) for r in self.residuals(config).values())

    def coupling_errors(self, config: RobotConfig) -> np.ndarray:
        """The six coupling constraints evaluated at this state (rad)."""
        q, L = self.joints, config.links
        raw = (
            q.theta10 + q.theta11,
            q.theta14 + q.theta15,
            q.theta1 - q.theta12 + L.c1,
            q.theta4 - q.theta16 + L.c2,
            q.theta9 - q.theta5 + L.c3,
            q.theta13 - q.theta8 + L.c4,
        )
        return np.array([wrap_angle(v) for v in raw])


def _fivebar_in_robot(geom, first, second, assembly, name):
    try:
        st = fivebar.fk(geom, first, mirror_angle(second), assembly)
    except KinematicsError as exc:
        raise NoAssembly(f"{name}: {exc}", name) from exc
    return st.theta2, mirror_angle(st.theta3), st.endpoint


def _leg(config, k, theta):
    try:
        st = fourbar.leg_fk(config.leg_geoms[k], theta, config.leg_branch, config.toe)
    except KinematicsError as exc:
        raise NoAssembly(f"leg{k + 1}: {exc}", f"leg{k + 1}") from exc
    return st, config.leg_mounts[k].to_world(st.foot_tip)


def _body_side(prox, near, far, prox2, ground, t_prox, t_prox2, branch, slot, name):
    """Passive angle and slider position of one RRPRR side.

    The distal pair is held at +/- theta by the coupling, so the closure
    along the ground direction fixes theta and the slider absorbs the rest.
    """
    c = -(prox * math.cos(t_prox) + prox2 * math.cos(t_prox2) + ground) / (near + far)
    if abs(c) > 1.0:
        raise CouplingInfeasible(f"{name}: cannot span the ground link (cos = {c:.6g})", name)
    t_far = branch * math.acos(c)
    t_near = -t_far
    offset = prox * math.sin(t_prox) + near * math.sin(t_near) + far * math.sin(t_far) - prox2 * math.sin(t_prox2)
    s = ground / 2 + offset
    lo, hi = slot
    if not lo - 1e-9 <= s <= hi + 1e-9:
        raise CouplingInfeasible(f"{name}: slider at {s:.6g} mm outside [{lo}, {hi}]", name)
    return t_near, t_far, s


def solve(config: RobotConfig, cmd: ActuatorCommand, check_range: bool = True) -> RobotState:
    """Forward position analysis of the whole robot for one actuator command."""
    if check_range:
        config.check_command(cmd)
    L = config.links
    t1, t4, t8, t5 = cmd.a1, cmd.a2, cmd.a3, cmd.a4

    t2, t3, head_point = _fivebar_in_robot(config.head_geom, t1, t4, config.head_assembly, "head")
    leg1, tip1 = _leg(config, 0, t1)
    leg2, tip2 = _leg(config, 1, t4)
    t6, t7, tail_point = _fivebar_in_robot(config.tail_geom, t5, t8, config.tail_assembly, "tail")
    leg4, tip4 = _leg(config, 3, t5)
    leg3, tip3 = _leg(config, 2, t8)

    slot_left, slot_right = config.slider_ranges
    t12 = L.c1 + t1
    t9 = t5 - L.c3
    t10, t11, s_left = _body_side(
        L.l11, L.l12, L.l13, L.l14, L.l10, t9, t12, config.body_branch[0], slot_left, "left body"
    )
    t16 = L.c2 + t4
    t13 = t8 - L.c4
    t15, t14, s_right = _body_side(
        L.l16, L.l18, L.l17, L.l19, L.l15, t13, t16, config.body_branch[1], slot_right, "right body"
    )

    legs = tuple((st.theta_lg1, st.theta_lg12, st.theta_lg13) for st in (leg1, leg2, leg3, leg4))
    joints = JointState(
        t1, t2, t3, t4, t5, t6, t7, t8, t9, t10, t11, t12, t13, t14, t15, t16,
        legs=legs, s_left=s_left, s_right=s_right,
    )
    left_point = (
        (L.l13 * math.cos(t11) + L.l14 * math.cos(t12)) / 2,
        (L.l13 * math.sin(t11) + L.l14 * math.sin(t12)) / 2,
    )
    right_point = (
        (L.l19 * math.cos(t16) + L.l18 * math.cos(t15)) / 2,
        (L.l19 * math.sin(t16) + L.l18 * math.sin(t15)) / 2,
    )
    return RobotState(
        joints=joints,
        head_point=tuple(head_point),
        tail_point=tuple(tail_point),
        body_points=(left_point, right_point),
        foot_tips=(tip1, tip2, tip3, tip4),
    )


# column order of the active and passive matrices
ACTIVE_COLUMNS = ("theta1", "theta4", "theta5", "theta8", "theta5", "theta1", "theta8", "theta4")
PASSIVE_COLUMNS = ("theta2", "theta3", "theta6", "theta7", "theta11", "theta10", "theta14", "theta15")


def assemble_k_matrices(config: RobotConfig, state: RobotState | JointState) -> tuple[np.ndarray, np.ndarray]:
    """Active (K) and passive (Kstar) 8x8 matrices of sub-system I.

    Rows pair up as head, tail, left body, right body.  Each active column
    belongs to one block (see ``ACTIVE_COLUMNS``), so K is block diagonal.
    """
    q = state.joints if isinstance(state, RobotState) else state
    L = config.links
    s, c = math.sin, math.cos
    K = np.zeros((8, 8))
    Ks = np.zeros((8, 8))

    K[0:2, 0:2] = [[-L.l1 * s(q.theta1), -L.l4 * s(q.theta4)],
                   [L.l1 * c(q.theta1), -L.l4 * c(q.theta4)]]
    K[2:4, 2:4] = [[-L.l6 * s(q.theta5), -L.l9 * s(q.theta8)],
                   [L.l6 * c(q.theta5), -L.l9 * c(q.theta8)]]
    K[4:6, 4:6] = [[L.l11 * s(L.c3 - q.theta5), -L.l14 * s(L.c1 + q.theta1)],
                   [L.l11 * c(L.c3 - q.theta5), -L.l14 * c(L.c1 + q.theta1)]]
    K[6:8, 6:8] = [[L.l16 * s(L.c4 - q.theta8), -L.l19 * s(L.c2 + q.theta4)],
                   [L.l16 * c(L.c4 - q.theta8), -L.l19 * c(L.c2 + q.theta4)]]

    Ks[0:2, 0:2] = [[-L.l2 * s(q.theta2), -L.l3 * s(q.theta3)],
                    [L.l2 * c(q.theta2), -L.l3 * c(q.theta3)]]
    Ks[2:4, 2:4] = [[-L.l7 * s(q.theta6), -L.l8 * s(q.theta7)],
                    [L.l7 * c(q.theta6), -L.l8 * c(q.theta7)]]
    Ks[4:6, 4:6] = [[-L.l13 * s(q.theta11), L.l12 * s(q.theta11)],
                    [L.l13 * c(q.theta11), L.l12 * c(q.theta11)]]
    Ks[6:8, 6:8] = [[-L.l17 * s(q.theta14), L.l18 * s(q.theta14)],
                    [L.l17 * c(q.theta14), L.l18 * c(q.theta14)]]
    return K, Ks


def singular_factors(state: RobotState | JointState) -> dict[str, float]:
    q = state.joints if isinstance(state, RobotState) else state
    return {
        "sin(2*theta11)": math.sin(2 * q.theta11),
        "sin(2*theta14)": math.sin(2 * q.theta14),
        "sin(theta2+theta3)": math.sin(q.theta2 + q.theta3),
        "sin(theta6+theta7)": math.sin(q.theta6 + q.theta7),
    }


def passive_scale(L: LinkSet) -> float:
    """Link-length product multiplying the passive determinant."""
    return L.l2 * L.l3 * L.l7 * L.l8 * L.l12 * L.l13 * L.l17 * L.l18


def active_scale(L: LinkSet) -> float:
    """Link-length product multiplying the active determinant."""
    return L.l1 * L.l4 * L.l6 * L.l9 * L.l11 * L.l14 * L.l16 * L.l19


def kstar_closed_form(config: RobotConfig, state: RobotState | JointState) -> float:
    """Factored determinant of the passive matrix."""
    q = state.joints if isinstance(state, RobotState) else state
    a = q.theta2 + q.theta3
    b = q.theta6 + q.theta7
    return (
        passive_scale(config.links)
        * math.sin(2 * q.theta11)
        * math.sin(2 * q.theta14)
        * (math.cos(a - b) - math.cos(a + b))
        / 2
    )


@dataclass(frozen=True)
class SingularityReport:
    gain: bool
    loss: bool
    vanishing_factors: tuple[str, ...]
    det_k: float
    det_kstar: float
    legs: tuple[bool, bool, bool, bool]

    @property
    def any(self) -> bool:
        return self.gain or self.loss or any(self.legs)


def full_singularity(config: RobotConfig, state: RobotState | JointState, tol: float = 1e-8) -> SingularityReport:
    """Gain (passive matrix) and loss (active matrix) singularity bookkeeping.

    Determinants are compared against ``tol`` times the product of the link
    lengths that scale them, so ``tol`` is dimensionless.
    """
    q = state.joints if isinstance(state, RobotState) else state
    K, Ks = assemble_k_matrices(config, q)
    det_k = float(np.linalg.det(K))
    det_ks = float(np.linalg.det(Ks))
    vanishing = tuple(name for name, v in singular_factors(q).items() if abs(v) < tol)
    legs = []
    for geom, (t_in, t_cp, t_out) in zip(config.leg_geoms, q.legs):
        legs.append(fourbar.leg_singular(geom, fourbar.FourBarState(t_in, t_cp, t_out, (0.0, 0.0)), tol))
    return SingularityReport(
        gain=abs(det_ks) < tol * passive_scale(config.links),
        loss=abs(det_k) < tol * active_scale(config.links),
        vanishing_factors=vanishing,
        det_k=det_k,
        det_kstar=det_ks,
        legs=tuple(legs),
    )
