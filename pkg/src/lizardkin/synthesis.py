"""Performance-chart dimensional synthesis of the symmetric five-bar.

Non-dimensional parameters r1, r2, r3 (proximal link, distal link, half base)
live on the simplex ``r1 + r2 + r3 = 0.9``; a dimensional factor converts
them to millimetres.  Charts sample the theoretical workspace and the local
conditioning index over the upper half-plane.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fivebar
from .errors import (
    AssemblyViolation,
    NoUpperRegion,
    RangeViolation,
    SimplexViolation,
    SingularHere,
)
from .fivebar import BranchSelector, FiveBarGeometry

logger = logging.getLogger(__name__)

SIMPLEX_SUM = 0.9
SIMPLEX_TOL = 1e-12
# relative slack on the reach circles so tangent points count as reachable
BOUNDARY_TOL = 1e-9
LCI_SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class NonDimParams:
    r1: float
    r2: float
    r3: float


@dataclass(frozen=True)
class Dimensionalized:
    d: float
    l0: float
    l1: float
    l2: float

    @property
    def geometry(self) -> FiveBarGeometry:
        return FiveBarGeometry.symmetric(self.l0, self.l1, self.l2)


def validate_params(r1: float, r2: float, r3: float) -> NonDimParams:
    if abs(r1 + r2 + r3 - SIMPLEX_SUM) > SIMPLEX_TOL:
        raise SimplexViolation(f"r1 + r2 + r3 = {r1 + r2 + r3:.12g}, expected {SIMPLEX_SUM}")
    if not 0 < r1 < SIMPLEX_SUM:
        raise RangeViolation(f"r1 = {r1} outside (0, {SIMPLEX_SUM})")
    if not 0 < r2 < SIMPLEX_SUM:
        raise RangeViolation(f"r2 = {r2} outside (0, {SIMPLEX_SUM})")
    if not 0 < r3 < SIMPLEX_SUM / 2:
        raise RangeViolation(f"r3 = {r3} outside (0, {SIMPLEX_SUM / 2})")
    if r1 + r2 < r3:
        raise AssemblyViolation("r1 + r2 < r3: the chains cannot meet")
    return NonDimParams(r1, r2, r3)


def dimensionalize(params: NonDimParams, r3_physical: float) -> Dimensionalized:
    """Scale so that the half base equals ``r3_physical`` mm."""
    if not r3_physical > 0:
        raise ValueError("r3_physical must be > 0")
    d = r3_physical / params.r3
    return Dimensionalized(d=d, l0=2 * r3_physical, l1=params.r1 * d, l2=params.r2 * d)


def normalize(l0: float, l1: float, l2: float) -> NonDimParams:
    """Inverse of :func:`dimensionalize` for a symmetric five-bar."""
    big_r = (l1, l2, l0 / 2)
    d = sum(big_r) / SIMPLEX_SUM
    return validate_params(*(v / d for v in big_r))


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int = 200
    ny: int = 200

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 samples per axis")
        if not (self.x_range[1] > self.x_range[0] and self.y_range[1] > self.y_range[0]):
            raise ValueError("grid ranges must be increasing")

    @classmethod
    def default(cls, geom: FiveBarGeometry, nx: int = 200, ny: int = 200) -> "GridSpec":
        reach = max(geom.l1 + geom.l2, geom.l4 + geom.l3)
        return cls((-reach, reach), (0.0, reach), nx, ny)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(*self.x_range, self.nx), np.linspace(*self.y_range, self.ny))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        xs, ys = self.axes()
        return np.meshgrid(xs, ys, indexing="ij")


@dataclass
class ChartGrid:
    """Scalar field sampled on a grid, indexed ``[ix, iy]``.

    ``values`` is NaN wherever ``mask`` is false.
    """

    spec: GridSpec
    mask: np.ndarray
    values: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return self.spec.axes()[0]

    @property
    def y(self) -> np.ndarray:
        return self.spec.axes()[1]


def _reach_ok(dist, inner, outer):
    slack = BOUNDARY_TOL * outer
    return (dist >= inner - slack) & (dist <= outer + slack)


def in_workspace(geom: FiveBarGeometry, x, y):
    """True where both chains can reach the point; works on arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d_left = np.hypot(x + geom.l0 / 2, y)
    d_right = np.hypot(x - geom.l0 / 2, y)
    return _reach_ok(d_left, abs(geom.l1 - geom.l2), geom.l1 + geom.l2) & _reach_ok(
        d_right, abs(geom.l4 - geom.l3), geom.l4 + geom.l3
    )


def workspace_mask(geom: FiveBarGeometry, grid: GridSpec) -> ChartGrid:
    gx, gy = grid.mesh()
    return ChartGrid(grid, in_workspace(geom, gx, gy))


@dataclass(frozen=True)
class MicResult:
    r_mic: float
    y_mic: float

    def contains(self, x, y):
        return np.hypot(np.asarray(x), np.asarray(y) - self.y_mic) <= self.r_mic


def mic(geom: FiveBarGeometry) -> MicResult:
    """Maximal inscribed circle of the upper workspace, centred on the y-axis.

    The centre sits where both pivots are ``max(l1, l2)`` away, midway
    between the inner and outer reach circles.
    """
    l1, l2 = geom.l1, geom.l2
    r_mic = (l1 + l2 - abs(l1 - l2)) / 2
    radicand = (l1 + l2 + abs(l1 - l2)) ** 2 / 4 - (geom.l0 / 2) ** 2
    if radicand < 0:
        raise NoUpperRegion(f"y_MIC radicand {radicand:.6g} < 0")
    return MicResult(r_mic=r_mic, y_mic=math.sqrt(radicand))


def condition_lci(J: np.ndarray) -> float:
    """Inverse spectral condition number, 0 for a singular matrix."""
    s = np.linalg.svd(J, compute_uv=False)
    if s[0] == 0 or s[-1] <= LCI_SINGULAR_TOL * s[0]:
        return 0.0
    return float(s[-1] / s[0])


def lci(geom: FiveBarGeometry, endpoint, branch: BranchSelector = BranchSelector()) -> float:
    """Local conditioning index of the five-bar at ``endpoint``."""
    t1, t4 = fivebar.ik(geom, endpoint, branch)
    p = np.asarray(endpoint, dtype=float)
    e1 = geom.left_pivot + geom.l1 * np.array([math.cos(t1), math.sin(t1)])
    e2 = geom.right_pivot + geom.l4 * np.array([math.cos(t4), math.sin(t4)])
    t2 = math.atan2(p[1] - e1[1], p[0] - e1[0])
    t3 = math.atan2(p[1] - e2[1], p[0] - e2[0])
    state = fivebar.FiveBarState(t1, t2, t3, t4, (float(p[0]), float(p[1])))
    A, B = fivebar.endpoint_jacobians(geom, state)
    if abs(np.linalg.det(A)) < LCI_SINGULAR_TOL * geom.l2 * geom.l3:
        raise SingularHere(f"gain-type singularity at {tuple(p)}")
    if abs(B[0, 0] * B[1, 1]) < LCI_SINGULAR_TOL * geom.l1 * geom.l2 * geom.l3 * geom.l4:
        raise SingularHere(f"loss-type singularity at {tuple(p)}")
    return condition_lci(fivebar.velocity_jacobian(geom, state))


def _lci_many(geom: FiveBarGeometry, x: np.ndarray, y: np.ndarray, branch: BranchSelector) -> np.ndarray:
    """Vectorized :func:`lci`; 0 at singular points."""
    l0, l1, l2, l3, l4 = geom.l0, geom.l1, geom.l2, geom.l3, geom.l4

    def chain(px, prox, dist, sign):
        dx, dy = x - px, y
        d = np.hypot(dx, dy)
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_a = np.clip((d * d + prox**2 - dist**2) / (2 * prox * d), -1.0, 1.0)
        t = np.arctan2(dy, dx) + sign * np.arccos(cos_a)
        ex, ey = px + prox * np.cos(t), prox * np.sin(t)
        return t, np.arctan2(y - ey, x - ex)

    t1, t2 = chain(-l0 / 2, l1, l2, branch.elbow_left)
    t4, t3 = chain(l0 / 2, l4, l3, -branch.elbow_right)
    A = np.empty(x.shape + (2, 2))
    A[..., 0, 0], A[..., 0, 1] = l2 * np.cos(t2), l2 * np.sin(t2)
    A[..., 1, 0], A[..., 1, 1] = l3 * np.cos(t3), l3 * np.sin(t3)
    b1 = -l1 * l2 * np.sin(t2 - t1)
    b2 = -l4 * l3 * np.sin(t3 - t4)
    det_a = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    singular = (np.abs(det_a) < LCI_SINGULAR_TOL * l2 * l3) | (
        np.abs(b1 * b2) < LCI_SINGULAR_TOL * l1 * l2 * l3 * l4
    )
    safe_det = np.where(singular, 1.0, det_a)
    # J = -A^-1 diag(b1, b2)
    J = np.empty_like(A)
    J[..., 0, 0] = -A[..., 1, 1] * b1 / safe_det
    J[..., 0, 1] = A[..., 0, 1] * b2 / safe_det
    J[..., 1, 0] = A[..., 1, 0] * b1 / safe_det
    J[..., 1, 1] = -A[..., 0, 0] * b2 / safe_det
    s = np.linalg.svd(J, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s[..., 0] > 0, s[..., -1] / s[..., 0], 0.0)
    ratio = np.where(ratio <= LCI_SINGULAR_TOL, 0.0, ratio)
    return np.where(singular, 0.0, ratio)


def lci_chart(
    geom: FiveBarGeometry,
    grid: GridSpec,
    branch: BranchSelector = BranchSelector(),
    workers: int = 1,
) -> ChartGrid:
    """LCI over the workspace part of ``grid``; rows may be split across threads."""
    chart = workspace_mask(geom, grid)
    gx, gy = grid.mesh()
    values = np.full(gx.shape, np.nan)
    rows = np.array_split(np.arange(grid.nx), max(1, workers))

    def fill(idx):
        if idx.size == 0:
            return
        m = chart.mask[idx]
        block = np.full(m.shape, np.nan)
        block[m] = _lci_many(geom, gx[idx][m], gy[idx][m], branch)
        values[idx] = block

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill, rows))
    else:
        for idx in rows:
            fill(idx)
    chart.values = values
    return chart


def mic_median_lci(geom: FiveBarGeometry, chart: ChartGrid, circle: MicResult | None = None) -> float:
    circle = circle or mic(geom)
    gx, gy = chart.spec.mesh()
    inside = circle.contains(gx, gy) & chart.mask
    if not inside.any():
        raise ValueError("no chart samples inside the inscribed circle")
    return float(np.median(chart.values[inside]))
