"""Four-bar leg linkage (sub-system II): closed-form positions and singularity test.

Local frame: input pivot at the origin, output pivot at (lg10, 0).  The input
link lg1 sits at theta_lg1, the coupler lg12 at theta_lg1 + theta_lg12
(relative angle, as in the leg Jacobians) and the output link lg13 at
theta_lg13, all counter-clockwise from +x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import leg_residual
from .fivebar import half_angle_root

__all__ = [
    "FourBarGeometry",
    "FourBarState",
    "leg_coefficients",
    "leg_fk",
    "leg_jacobians",
    "leg_singular",
]

OPEN, CROSSED = 1, -1


@dataclass(frozen=True)
class FourBarGeometry:
    lg1: float = 45.0
    lg12: float = 50.0
    lg13: float = 45.0
    lg10: float = 50.0

    def __post_init__(self):
        for name in ("lg1", "lg12", "lg13", "lg10"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def is_parallelogram(self) -> bool:
        return math.isclose(self.lg1, self.lg13) and math.isclose(self.lg12, self.lg10)

    def grashof(self) -> str:
        """'grashof', 'non-grashof' or 'change-point' (s + l vs p + q)."""
        links = sorted((self.lg1, self.lg12, self.lg13, self.lg10))
        lhs, rhs = links[0] + links[3], links[1] + links[2]
        if math.isclose(lhs, rhs):
            return "change-point"
        return "grashof" if lhs < rhs else "non-grashof"


@dataclass(frozen=True)
class FourBarState:
    theta_lg1: float
    theta_lg12: float
    theta_lg13: float
    foot_tip: tuple[float, float]

    @property
    def coupler_angle(self) -> float:
        """Absolute coupler direction."""
        return math.atan2(math.sin(self.theta_lg1 + self.theta_lg12),
                          math.cos(self.theta_lg1 + self.theta_lg12))


def leg_coefficients(geom: FourBarGeometry, theta_lg1: float) -> dict[str, float]:
    """Half-angle coefficients: output angle from (G, H, I), coupler from (J, K, L)."""
    a, b, c, d = geom.lg1, geom.lg12, geom.lg13, geom.lg10
    ct, st = math.cos(theta_lg1), math.sin(theta_lg1)
    k1, k2, k4 = d / a, d / c, d / b
    k3 = (a * a - b * b + c * c + d * d) / (2 * a * c)
    k5 = (c * c - d * d - a * a - b * b) / (2 * a * b)
    return {
        "G": ct - k1 - k2 * ct + k3,
        "H": -2 * st,
        "I": k1 - (k2 + 1) * ct + k3,
        "J": ct - k1 + k4 * ct + k5,
        "K": -2 * st,
        "L": k1 + (k4 - 1) * ct + k5,
    }


def _solve(geom, theta_lg1, sign):
    k = leg_coefficients(geom, theta_lg1)
    out = half_angle_root(k["G"], k["H"], k["I"], sign, "leg output")
    coupler = half_angle_root(k["J"], k["K"], k["L"], sign, "leg coupler")
    return coupler, out


def _is_open(geom, theta_lg1, coupler, out) -> bool:
    # open circuit: the quadrilateral O-A-C-B is convex, so C and O lie on
    # opposite sides of the diagonal A-B
    ax, ay = geom.lg1 * math.cos(theta_lg1), geom.lg1 * math.sin(theta_lg1)
    cx, cy = ax + geom.lg12 * math.cos(coupler), ay + geom.lg12 * math.sin(coupler)
    bx, by = geom.lg10 - ax, -ay
    side_c = bx * (cy - ay) - by * (cx - ax)
    side_o = bx * (-ay) - by * (-ax)
    return side_c * side_o <= 0


def leg_fk(geom: FourBarGeometry, theta_lg1: float, branch: int = OPEN, toe: float = 0.0) -> FourBarState:
    """Positions of the leg for input angle ``theta_lg1``.

    ``branch=+1`` is the open circuit (for a parallelogram, the parallel one),
    ``-1`` the crossed circuit.  Both roots of the two half-angle quadratics
    share one sign; the sign realizing the requested circuit is chosen here.
    """
    if branch not in (OPEN, CROSSED):
        raise ValueError("branch must be +1 (open) or -1 (crossed)")
    coupler, out = _solve(geom, theta_lg1, 1)
    if _is_open(geom, theta_lg1, coupler, out) != (branch == OPEN):
        coupler, out = _solve(geom, theta_lg1, -1)
    reach = geom.lg13 + toe
    tip = (geom.lg10 + reach * math.cos(out), reach * math.sin(out))
    rel = coupler - theta_lg1
    return FourBarState(
        _wrap(theta_lg1), _wrap(rel), _wrap(out), tip,
    )


def _wrap(a):
    return math.atan2(math.sin(a), math.cos(a))


def leg_residual_state(geom: FourBarGeometry, state: FourBarState) -> np.ndarray:
    return np.array(leg_residual(geom.lg1, geom.lg10, geom.lg12, geom.lg13,
                                 state.theta_lg1, state.theta_lg12, state.theta_lg13))


def leg_jacobians(geom: FourBarGeometry, state: FourBarState) -> tuple[np.ndarray, np.ndarray]:
    """(K, Kstar) of the leg loop.

    K splits the input-angle partial into coupler and input-link columns
    (their sum is d(residual)/d(theta_lg1)); Kstar columns are partials wrt (theta_lg13,
    theta_lg12).
    """
    t1, t12, t13 = state.theta_lg1, state.theta_lg12, state.theta_lg13
    a = t1 + t12
    K = np.array([
        [-geom.lg12 * math.sin(a), -geom.lg1 * math.sin(t1)],
        [geom.lg12 * math.cos(a), geom.lg1 * math.cos(t1)],
    ])
    Kstar = np.array([
        [geom.lg13 * math.sin(t13), -geom.lg12 * math.sin(a)],
        [-geom.lg13 * math.cos(t13), geom.lg12 * math.cos(a)],
    ])
    return K, Kstar


def leg_singular(geom: FourBarGeometry, state: FourBarState, tol: float = 1e-8) -> bool:
    """Coupler and output link collinear: sin(theta_lg1 + theta_lg12 - theta_lg13) ~ 0."""
    return abs(math.sin(state.theta_lg1 + state.theta_lg12 - state.theta_lg13)) < tol
