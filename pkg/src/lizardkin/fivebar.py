"""Planar RRRRR five-bar: closed-form position kinematics, Jacobians, singularities.

Local frame: base pivots at (-l0/2, 0) and (+l0/2, 0); every angle measured
counter-clockwise from +x.  Link l1 (angle theta1) and l2 (theta2) form the
left chain, l4 (theta4) and l3 (theta3) the right chain, and the chains meet
at the endpoint.  The loop closes when::

    l1 cos t1 + l2 cos t2 - l3 cos t3 - l4 cos t4 - l0 = 0
    l1 sin t1 + l2 sin t2 - l3 sin t3 - l4 sin t4      = 0
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, NoAssembly, OutOfWorkspace

__all__ = [
    "FiveBarGeometry",
    "FiveBarState",
    "BranchSelector",
    "SingularityFlags",
    "coefficients",
    "fk",
    "ik",
    "loop_residual",
    "jacobians",
    "endpoint_jacobians",
    "velocity_jacobian",
    "is_singular",
]

DENOMINATOR_TOL = 1e-12
SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class FiveBarGeometry:
    l0: float
    l1: float
    l2: float
    l3: float
    l4: float

    def __post_init__(self):
        for name in ("l0", "l1", "l2", "l3", "l4"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.l1 + self.l2 > self.l0 / 2:
            raise ValueError("l1 + l2 must exceed l0/2 for the chains to meet")

    @classmethod
    def symmetric(cls, l0, l1, l2):
        return cls(l0=l0, l1=l1, l2=l2, l3=l2, l4=l1)

    @property
    def left_pivot(self) -> np.ndarray:
        return np.array([-self.l0 / 2, 0.0])

    @property
    def right_pivot(self) -> np.ndarray:
        return np.array([self.l0 / 2, 0.0])

    def scaled(self, factor: float) -> "FiveBarGeometry":
        return FiveBarGeometry(*(factor * v for v in (self.l0, self.l1, self.l2, self.l3, self.l4)))


def _sign(value: int) -> int:
    if value not in (1, -1):
        raise ValueError(f"branch signs are +1 or -1, got {value!r}")
    return value


@dataclass(frozen=True)
class BranchSelector:
    """Working mode of the two serial chains.

    ``+1`` puts an elbow on the outer side of the line from its base pivot to
    the endpoint (left of it for the left chain, right of it for the right
    chain).  ``(+1, +1)`` and ``(-1, -1)`` are the two mirror-symmetric modes.
    """

    elbow_left: int = 1
    elbow_right: int = 1

    def __post_init__(self):
        _sign(self.elbow_left)
        _sign(self.elbow_right)

    @classmethod
    def all(cls) -> list["BranchSelector"]:
        return [cls(a, b) for a in (1, -1) for b in (1, -1)]


@dataclass(frozen=True)
class FiveBarState:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    endpoint: tuple[float, float]

    def elbows(self, geom: FiveBarGeometry) -> tuple[np.ndarray, np.ndarray]:
        e1 = geom.left_pivot + geom.l1 * np.array([math.cos(self.theta1), math.sin(self.theta1)])
        e2 = geom.right_pivot + geom.l4 * np.array([math.cos(self.theta4), math.sin(self.theta4)])
        return e1, e2

    def working_mode(self, geom: FiveBarGeometry) -> BranchSelector:
        """Branch under which :func:`ik` maps ``endpoint`` back to this state."""
        p = np.asarray(self.endpoint)
        e1, e2 = self.elbows(geom)
        left = _cross(p - geom.left_pivot, e1 - geom.left_pivot)
        right = _cross(p - geom.right_pivot, e2 - geom.right_pivot)
        return BranchSelector(1 if left >= 0 else -1, 1 if right <= 0 else -1)


@dataclass(frozen=True)
class SingularityFlags:
    gain: bool
    loss: bool


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def coefficients(geom: FiveBarGeometry, theta1: float, theta4: float) -> dict[str, float]:
    """Half-angle quadratic coefficients for theta3 (A, B, C) and theta2 (D, E, F).

    theta3 solves ``A t^2 + B t + C = 0`` and theta2 solves
    ``D t^2 + E t + F = 0`` with ``t = tan(theta/2)``.
    """
    l0, l1, l2, l3, l4 = geom.l0, geom.l1, geom.l2, geom.l3, geom.l4
    s1, c1 = math.sin(theta1), math.cos(theta1)
    s4, c4 = math.sin(theta4), math.cos(theta4)
    k1 = l4 * s4 - l1 * s1
    k2 = l4 * c4 - l1 * c1 + l0
    k3 = -l4 * s4 + l1 * s1
    # ground term enters with -l0: the left elbow seen from the right one
    k4 = -l4 * c4 + l1 * c1 - l0
    return {
        "K1": k1, "K2": k2, "K3": k3, "K4": k4,
        "A": (l3**2 - 2 * k2 * l3 - l2**2 + k2**2 + k1**2) / 2,
        "B": 2 * k1 * l3,
        "C": (l3**2 + 2 * k2 * l3 - l2**2 + k2**2 + k1**2) / 2,
        "D": (l3**2 - l2**2 + 2 * k4 * l2 - k4**2 - k3**2) / 2,
        "E": -2 * k3 * l2,
        "F": (l3**2 - l2**2 - 2 * k4 * l2 - k4**2 - k3**2) / 2,
    }


def half_angle_root(a: float, b: float, c: float, sign: int, what: str = "mechanism") -> float:
    """``2 atan((-b + sign*sqrt(b^2 - 4ac)) / 2a)`` evaluated without cancellation."""
    disc = b * b - 4 * a * c
    if disc < 0:
        # tangential double roots come out slightly negative from rounding
        if disc < -1e-12 * max(a * a, b * b, c * c):
            raise NoAssembly(f"{what}: negative discriminant {disc:.3g}", what)
        disc = 0.0
    if abs(2 * a) < DENOMINATOR_TOL:
        raise DegenerateDenominator(f"{what}: |2A| < {DENOMINATOR_TOL:g} (fold-back pose)")
    sq = math.sqrt(disc)
    if -b * sign >= 0:
        return 2 * math.atan2(-b + sign * sq, 2 * a)
    # other root of the same quadratic, written as 2c / (-b - sign*sq)
    return 2 * math.atan2(2 * c, -b - sign * sq)


def _wrap(angle: float) -> float:
    return math.atan2(math.sin(angle), math.cos(angle))


def fk(geom: FiveBarGeometry, theta1: float, theta4: float, assembly: int = 1) -> FiveBarState:
    """Forward position kinematics from the two active angles.

    ``assembly=+1`` places the endpoint to the left of the directed line from
    the left elbow to the right elbow (above the elbows for the usual upright
    pose); ``-1`` is its reflection.  Both half-angle quadratics take the
    root sign ``-assembly``.
    """
    sign = -_sign(assembly)
    k = coefficients(geom, theta1, theta4)
    theta3 = half_angle_root(k["A"], k["B"], k["C"], sign, "five-bar theta3")
    theta2 = half_angle_root(k["D"], k["E"], k["F"], sign, "five-bar theta2")
    x = -geom.l0 / 2 + geom.l1 * math.cos(theta1) + geom.l2 * math.cos(theta2)
    y = geom.l1 * math.sin(theta1) + geom.l2 * math.sin(theta2)
    return FiveBarState(_wrap(theta1), _wrap(theta2), _wrap(theta3), _wrap(theta4), (x, y))


def _chain_angle(pivot, point, proximal, distal, elbow_sign, what):
    dx, dy = point[0] - pivot[0], point[1] - pivot[1]
    d = math.hypot(dx, dy)
    if d == 0.0:
        raise OutOfWorkspace(f"{what}: endpoint coincides with the base pivot")
    cos_alpha = (d * d + proximal**2 - distal**2) / (2 * proximal * d)
    if abs(cos_alpha) > 1 + 1e-12:
        raise OutOfWorkspace(f"{what}: endpoint at distance {d:.6g} outside reach")
    alpha = math.acos(max(-1.0, min(1.0, cos_alpha)))
    return math.atan2(dy, dx) + elbow_sign * alpha


def ik(geom: FiveBarGeometry, endpoint, branch: BranchSelector = BranchSelector()) -> tuple[float, float]:
    """Active angles (theta1, theta4) placing the endpoint at ``endpoint``."""
    p = (float(endpoint[0]), float(endpoint[1]))
    t1 = _chain_angle(geom.left_pivot, p, geom.l1, geom.l2, branch.elbow_left, "left chain")
    t4 = _chain_angle(geom.right_pivot, p, geom.l4, geom.l3, -branch.elbow_right, "right chain")
    return _wrap(t1), _wrap(t4)


def loop_residual(geom: FiveBarGeometry, theta1, theta2, theta3, theta4) -> np.ndarray:
    c, s = math.cos, math.sin
    return np.array([
        geom.l1 * c(theta1) + geom.l2 * c(theta2) - geom.l3 * c(theta3) - geom.l4 * c(theta4) - geom.l0,
        geom.l1 * s(theta1) + geom.l2 * s(theta2) - geom.l3 * s(theta3) - geom.l4 * s(theta4),
    ])


def state_residual(geom: FiveBarGeometry, state: FiveBarState) -> np.ndarray:
    return loop_residual(geom, state.theta1, state.theta2, state.theta3, state.theta4)


def jacobians(geom: FiveBarGeometry, state: FiveBarState) -> tuple[np.ndarray, np.ndarray]:
    """Partials of the loop residual: K wrt (theta1, theta4), Kstar wrt (theta2, theta3)."""
    s1, c1 = math.sin(state.theta1), math.cos(state.theta1)
    s2, c2 = math.sin(state.theta2), math.cos(state.theta2)
    s3, c3 = math.sin(state.theta3), math.cos(state.theta3)
    s4, c4 = math.sin(state.theta4), math.cos(state.theta4)
    K = np.array([[-geom.l1 * s1, geom.l4 * s4], [geom.l1 * c1, -geom.l4 * c4]])
    Kstar = np.array([[-geom.l2 * s2, geom.l3 * s3], [geom.l2 * c2, -geom.l3 * c3]])
    return K, Kstar


def endpoint_jacobians(geom: FiveBarGeometry, state: FiveBarState) -> tuple[np.ndarray, np.ndarray]:
    """Input-output matrices (A, B) with ``A @ p_dot + B @ theta_dot = 0``.

    Rows are the two distal-link length constraints, halved.
    """
    t1, t2, t3, t4 = state.theta1, state.theta2, state.theta3, state.theta4
    A = np.array([
        [geom.l2 * math.cos(t2), geom.l2 * math.sin(t2)],
        [geom.l3 * math.cos(t3), geom.l3 * math.sin(t3)],
    ])
    B = np.diag([
        -geom.l1 * geom.l2 * math.sin(t2 - t1),
        -geom.l4 * geom.l3 * math.sin(t3 - t4),
    ])
    return A, B


def velocity_jacobian(geom: FiveBarGeometry, state: FiveBarState) -> np.ndarray:
    """J mapping (theta1_dot, theta4_dot) to endpoint velocity: ``-A^-1 B``."""
    A, B = endpoint_jacobians(geom, state)
    return -np.linalg.solve(A, B)


def is_singular(geom: FiveBarGeometry, state: FiveBarState, tol: float = SINGULAR_TOL) -> SingularityFlags:
    """Gain: distal links collinear.  Loss: a chain fully stretched or folded."""
    _, Kstar = jacobians(geom, state)
    _, B = endpoint_jacobians(geom, state)
    gain = abs(np.linalg.det(Kstar)) < tol * geom.l2 * geom.l3
    loss = abs(B[0, 0] * B[1, 1]) < tol * geom.l1 * geom.l2 * geom.l3 * geom.l4
    return SingularityFlags(gain=bool(gain), loss=bool(loss))
