"""Shared types, the mobility count and loop-closure residuals.

Angle measurement used by :class:`JointState`
---------------------------------------------
Every five-bar in the body has a *first* chain whose angles are measured
counter-clockwise from the local +x axis and a *second* chain whose angles
are measured clockwise from the local -x axis (the mirror image of the
first).  The second-chain joints are

* head: theta3, theta4
* tail: theta7, theta8
* left body: theta12 (link l14)
* right body: theta16 (link l19)

With that measurement a bilaterally symmetric pose has equal first/second
chain values (theta1 == theta4), the coupling assignments theta_lg2 := theta4
and theta16 = C2 + theta4 are rigid rotations, and the active/passive
Jacobians assembled in :mod:`lizardkin.robot` are exact partial derivatives
of the residuals below.  The standalone :mod:`lizardkin.fivebar` module uses
plain counter-clockwise angles; :func:`mirror_angle` converts between the two.

Leg couplers are stored relative to the input link (absolute coupler angle is
``theta_lg1 + theta_lg2``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

__all__ = [
    "JointCounts",
    "LinkSet",
    "JointState",
    "LoopId",
    "mobility",
    "loop_residual",
    "wrap_angle",
    "mirror_angle",
]

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(angle, TAU)
    if a <= -math.pi:
        a += TAU
    elif a > math.pi:
        a -= TAU
    return a


def mirror_angle(angle: float) -> float:
    """Convert between counter-clockwise and mirrored (second-chain) measurement."""
    return wrap_angle(math.pi - angle)


@dataclass(frozen=True)
class JointCounts:
    """Link/joint census for the planar mobility formula.

    ``n_links`` counts the ground link.
    """

    n_links: int
    n_joints: int
    joint_freedoms: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "joint_freedoms", tuple(int(f) for f in self.joint_freedoms))
        if self.n_links < 2:
            raise ValueError("n_links must be >= 2")
        if self.n_joints < 1:
            raise ValueError("n_joints must be >= 1")
        if len(self.joint_freedoms) != self.n_joints:
            raise ValueError("need one freedom count per joint")
        if any(f < 1 for f in self.joint_freedoms):
            raise ValueError("every joint freedom must be >= 1")


def mobility(counts: JointCounts) -> int:
    """Planar Grubler-Kutzbach mobility ``3(N - 1 - j) + sum(f_i)``.

    >>> mobility(JointCounts(4, 4, (1, 1, 1, 1)))
    1
    """
    n, j = counts.n_links, counts.n_joints
    return 3 * (n - 1 - j) + sum(counts.joint_freedoms)


_HALF_PI = math.pi / 2


@dataclass(frozen=True)
class LinkSet:
    """All link lengths (mm) and ternary-link angles (rad) of the robot.

    Defaults are the synthesized robot.  ``l17`` is the right-body distal
    link paired with ``l18`` (both 45 mm); ``l16`` is its 30 mm proximal link.
    """

    l0: float = 20.0
    l1: float = 30.0
    l2: float = 50.0
    l3: float = 50.0
    l4: float = 30.0
    l5: float = 20.0
    l6: float = 30.0
    l7: float = 50.0
    l8: float = 50.0
    l9: float = 30.0
    l10: float = 135.0
    l11: float = 30.0
    l12: float = 45.0
    l13: float = 45.0
    l14: float = 30.0
    l15: float = 135.0
    l16: float = 30.0
    l17: float = 45.0
    l18: float = 45.0
    l19: float = 30.0
    lg1: float = 45.0
    lg10: float = 50.0
    lg12: float = 50.0
    lg13: float = 45.0
    c1: float = _HALF_PI
    c2: float = _HALF_PI
    c3: float = _HALF_PI
    c4: float = _HALF_PI

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite")
            if not f.name.startswith("c") and value <= 0:
                raise ValueError(f"link length {f.name} must be > 0, got {value}")

    def link(self, index: int) -> float:
        return getattr(self, f"l{index}")


LegAngles = tuple[float, float, float]
_NEUTRAL_LEG: LegAngles = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class JointState:
    """Joint angles (rad) and slider positions (mm) of the assembled robot.

    ``legs[k]`` holds ``(theta_lg(k+1)1, theta_lg(k+1)2, theta_lg(k+1)3)``:
    input, coupler (relative to input) and output angle of leg ``k + 1``.
    All angles are wrapped to (-pi, pi] on construction.
    """

    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0
    theta4: float = 0.0
    theta5: float = 0.0
    theta6: float = 0.0
    theta7: float = 0.0
    theta8: float = 0.0
    theta9: float = 0.0
    theta10: float = 0.0
    theta11: float = 0.0
    theta12: float = 0.0
    theta13: float = 0.0
    theta14: float = 0.0
    theta15: float = 0.0
    theta16: float = 0.0
    legs: tuple[LegAngles, LegAngles, LegAngles, LegAngles] = field(
        default=(_NEUTRAL_LEG,) * 4
    )
    s_left: float = 0.0
    s_right: float = 0.0

    def __post_init__(self):
        for i in range(1, 17):
            name = f"theta{i}"
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, wrap_angle(value))
        if len(self.legs) != 4:
            raise ValueError("expected four legs")
        legs = tuple(tuple(wrap_angle(float(a)) for a in leg) for leg in self.legs)
        if any(len(leg) != 3 for leg in legs):
            raise ValueError("each leg carries three angles")
        object.__setattr__(self, "legs", legs)

    def theta(self, index: int) -> float:
        return getattr(self, f"theta{index}")

    def replace(self, **changes) -> "JointState":
        return replace(self, **changes)


class LoopId(enum.Enum):
    HEAD = "head"
    TAIL = "tail"
    LEFT_BODY = "left_body"
    RIGHT_BODY = "right_body"
    LEG1 = "leg1"
    LEG2 = "leg2"
    LEG3 = "leg3"
    LEG4 = "leg4"

    @property
    def leg_index(self) -> int | None:
        if self.value.startswith("leg"):
            return int(self.value[3:])
        return None


def _fivebar_residual(base, p1, p2, p3, p4, t1, t2, t3, t4):
    # first chain counter-clockwise, second chain mirrored
    c, s = math.cos, math.sin
    return (
        p1 * c(t1) + p2 * c(t2) + p3 * c(t3) + p4 * c(t4) - base,
        p1 * s(t1) + p2 * s(t2) - p3 * s(t3) - p4 * s(t4),
    )


def _body_residual(ground, prox, d_near, d_far, prox2, t_prox, t_near, t_far, t_prox2, slider):
    c, s = math.cos, math.sin
    return (
        prox * c(t_prox) + d_near * c(t_near) + d_far * c(t_far) + prox2 * c(t_prox2) + ground,
        prox * s(t_prox) + d_near * s(t_near) + d_far * s(t_far) - prox2 * s(t_prox2) - slider,
    )


def leg_residual(lg1, lg10, lg12, lg13, t_in, t_coupler, t_out):
    """Residual of ``LG1 + LG12 - LG13 - LG10`` with a relative coupler angle."""
    c, s = math.cos, math.sin
    a = t_in + t_coupler
    return (
        lg1 * c(t_in) + lg12 * c(a) - lg13 * c(t_out) - lg10,
        lg1 * s(t_in) + lg12 * s(a) - lg13 * s(t_out),
    )


def slider_offset(links: LinkSet, s: float, side: str) -> float:
    """Transverse slider offset from the centre of its travel slot (mm)."""
    ground = links.l10 if side == "left" else links.l15
    return s - ground / 2.0


def loop_residual(links: LinkSet, state: JointState, loop_id: LoopId) -> np.ndarray:
    """Two scalar components (mm) of one vector loop; zero iff it closes."""
    loop_id = LoopId(loop_id)
    L, q = links, state
    if loop_id is LoopId.HEAD:
        r = _fivebar_residual(L.l0, L.l1, L.l2, L.l3, L.l4, q.theta1, q.theta2, q.theta3, q.theta4)
    elif loop_id is LoopId.TAIL:
        r = _fivebar_residual(L.l5, L.l6, L.l7, L.l8, L.l9, q.theta5, q.theta6, q.theta7, q.theta8)
    elif loop_id is LoopId.LEFT_BODY:
        r = _body_residual(
            L.l10, L.l11, L.l12, L.l13, L.l14,
            q.theta9, q.theta10, q.theta11, q.theta12,
            slider_offset(L, q.s_left, "left"),
        )
    elif loop_id is LoopId.RIGHT_BODY:
        r = _body_residual(
            L.l15, L.l16, L.l18, L.l17, L.l19,
            q.theta13, q.theta15, q.theta14, q.theta16,
            slider_offset(L, q.s_right, "right"),
        )
    else:
        t_in, t_cp, t_out = q.legs[loop_id.leg_index - 1]
        r = leg_residual(L.lg1, L.lg10, L.lg12, L.lg13, t_in, t_cp, t_out)
    return np.array(r, dtype=float)
