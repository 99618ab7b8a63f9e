"""Multi-points and sampled multi-curves: the six-fold boundary bookkeeping.

A multi-point is six plane vectors u_0..u_5 with u_j + u_{j+2} + u_{j+4} = 0,
u_{j+3} = -u_j and wedge(u_j, u_{j+2}) = sqrt(3)/2; indices are cyclic mod 6.
The hexagon they span is balanced, with area normalized to sqrt(12).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import MissingAcceleration, RankUndefined, RankZero, WedgeMismatch
from .sl2 import FrameMatrix, PlaneVector, wedge

MULTIPOINT_TOL = 1e-9
# A sampled curve counts as linear when |wedge(v, acc)| < RANK_TOL * |v|^2.
RANK_TOL = 1e-9

HALF_SQRT3 = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class MultiPoint:
    """Six boundary positions satisfying the multi-point relations."""

    points: tuple[PlaneVector, ...]

    def __post_init__(self) -> None:
        if len(self.points) != 6:
            raise WedgeMismatch("a multi-point needs exactly six positions")
        pts = self.points
        for j in range(6):
            chain = pts[j] + pts[(j + 2) % 6] + pts[(j + 4) % 6]
            if chain.norm() > MULTIPOINT_TOL:
                raise WedgeMismatch(f"u_{j} + u_{j+2} + u_{j+4} is {chain.norm():.3e} from zero")
            mirror = pts[j] + pts[(j + 3) % 6]
            if mirror.norm() > MULTIPOINT_TOL:
                raise WedgeMismatch(f"u_{j+3} is not -u_{j}")
            w = wedge(pts[j], pts[(j + 2) % 6])
            if abs(w - HALF_SQRT3) > MULTIPOINT_TOL:
                raise WedgeMismatch(f"wedge(u_{j}, u_{j+2}) = {w!r}, expected sqrt(3)/2")

    def __getitem__(self, j: int) -> PlaneVector:
        return self.points[j % 6]

    def transformed(self, g: FrameMatrix) -> "MultiPoint":
        return MultiPoint(tuple(g.apply(p) for p in self.points))


def standard_multipoint() -> MultiPoint:
    """The sixth roots of unity u*_j = (cos(pi j / 3), sin(pi j / 3))."""
    pts = []
    for j in range(6):
        ang = math.pi * j / 3.0
        pts.append(PlaneVector(math.cos(ang), math.sin(ang)))
    return MultiPoint(tuple(pts))


STANDARD = standard_multipoint()


def multipoint_from_pair(u0: PlaneVector, u2: PlaneVector) -> MultiPoint:
    """Complete a multi-point from u_0 and u_2; they must wedge to sqrt(3)/2."""
    w = wedge(u0, u2)
    if abs(w - HALF_SQRT3) > MULTIPOINT_TOL:
        raise WedgeMismatch(f"wedge(u0, u2) = {w!r}, expected sqrt(3)/2")
    u4 = -(u0 + u2)
    return MultiPoint((u0, u0 + u2, u2, -u0, u4, -u2))


@dataclass(frozen=True)
class CurveSample:
    """One sampled point of one boundary curve."""

    t: float
    position: PlaneVector
    velocity: PlaneVector
    acceleration: PlaneVector | None = None

    def __post_init__(self) -> None:
        if self.velocity.norm() == 0.0:
            raise WedgeMismatch("curve sample has zero velocity")


def convexity_value(sample: CurveSample) -> float:
    """wedge(velocity, acceleration); nonnegative along convex boundaries."""
    if sample.acceleration is None:
        raise MissingAcceleration(f"sample at t={sample.t} carries no acceleration")
    return wedge(sample.velocity, sample.acceleration)


@dataclass(frozen=True)
class RankLabel:
    """Count of strictly curved even-index curves (1, 2 or 3)."""

    value: int

    def __post_init__(self) -> None:
        if self.value not in (1, 2, 3):
            raise RankZero(f"rank {self.value} is not admissible")


def _is_curved(samples: Sequence[CurveSample], label: str) -> bool:
    """Classify one sampled curve as linear (False) or strictly curved (True)."""
    if len(samples) < 8:
        raise RankUndefined(f"curve {label}: need at least 8 samples, got {len(samples)}")
    values = []
    scales = []
    for s in samples:
        values.append(convexity_value(s))
        v = s.velocity.norm()
        scales.append(RANK_TOL * v * v)
    if all(abs(w) < tol for w, tol in zip(values, scales)):
        return False
    interior = list(zip(values, scales))[1:-1]
    if all(w > tol for w, tol in interior):
        return True
    raise RankUndefined(f"curve {label}: samples mix linear and curved behaviour")


def rank_classify(curves: Sequence[Sequence[CurveSample]]) -> RankLabel:
    """Rank of a sampled multi-curve: curved count over even indices 0, 2, 4."""
    if len(curves) != 6:
        raise RankUndefined(f"expected six sampled curves, got {len(curves)}")
    curved = sum(1 for j in (0, 2, 4) if _is_curved(curves[j], f"j={j}"))
    if curved == 0:
        raise RankZero("no even-index curve is strictly curved")
    return RankLabel(curved)
