"""Rank-one links in the square representation.

A hyperbolic link is a multi-curve with one strictly curved even-index
curve.  After an SL2 change of coordinates the two linear even curves run
along the lines x = a and y = a:

    sigma_{j+2}(t) = a (1, t)          on x = a,
    sigma_{j+4}(t) = a (s, 1),  s = (1 - k)/t,   on y = a,
    sigma_j(t)     = a (-1 - s, -1 - t)          on (x + a)(y + a) = a^2 (1 - k),

with k = sqrt(3)/(2 a^2) in (0, 1) and t confined to -1 < t < k - 1 so that
both s and t stay in (-1, 0).  Odd-index curves are the central reflections.
The link runs from t0 to t1 = t0 + tau*(k - 1 - t0), tau in [0, 1); tau = 0
marks a degenerate (single-point) link.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVelocity,
    NotRankOneCompatible,
    ParameterOutOfRange,
    ScaleTooSmall,
)
from .multicurve import STANDARD, CurveSample, MultiPoint
from .sl2 import (
    SQRT3,
    FrameMatrix,
    PlaneVector,
    ProjectiveTangent,
    TangentElement,
    adjoint,
    star_check,
    wedge,
)

# Scales below sqrt(sqrt(3)/2) give k >= 1 and no hyperbola.
MIN_SCALE_SQ = SQRT3 / 2.0
# Velocity pairs closer to dependence than this reject the link solve.
VELOCITY_TOL = 1e-13
# Endpoint slack for parameter range checks on t.
RANGE_TOL = 1e-12


def k_of(a: float) -> float:
    """Hyperbola parameter k = sqrt(3)/(2 a^2); requires a^2 > sqrt(3)/2."""
    if a <= 0.0:
        raise ScaleTooSmall(f"scale a = {a!r} must be positive")
    k = SQRT3 / (2.0 * a * a)
    if k >= 1.0:
        raise ScaleTooSmall(f"a = {a!r} gives k = {k!r} >= 1")
    return k


@dataclass(frozen=True)
class SquareRep:
    """Square-representation parameters (a, t0, tau) of one link at index j."""

    a: float
    t0: float
    tau: float
    j: int

    def __post_init__(self) -> None:
        k = k_of(self.a)
        if not -1.0 < self.t0 < k - 1.0:
            raise ParameterOutOfRange(
                f"t0 = {self.t0!r} outside (-1, {k - 1.0!r}) for a = {self.a!r}"
            )
        if not 0.0 <= self.tau <= 1.0:
            raise ParameterOutOfRange(f"tau = {self.tau!r} outside [0, 1]")
        if self.j not in (0, 2, 4):
            raise ParameterOutOfRange(f"hyperbolic index j = {self.j!r} not in (0, 2, 4)")

    @property
    def k(self) -> float:
        return k_of(self.a)


def t_end(rep: SquareRep) -> float:
    """Final parameter t1 = t0 + tau*(k - 1 - t0)."""
    return rep.t0 + rep.tau * (rep.k - 1.0 - rep.t0)


def link_area(rep: SquareRep) -> float:
    """Sum of the three even sector areas swept by the link.

    Closed form a^2 [ (1-k)(1/t0 - 1/t1) + (t1 - t0) - (1-k) ln(t0/t1) ];
    zero for a degenerate link.
    """
    if rep.tau == 0.0:
        return 0.0
    k = rep.k
    t0, t1 = rep.t0, t_end(rep)
    return rep.a * rep.a * (
        (1.0 - k) * (1.0 / t0 - 1.0 / t1) + (t1 - t0) - (1.0 - k) * math.log(t0 / t1)
    )


def _check_range(rep: SquareRep, t: float) -> None:
    t1 = t_end(rep)
    lo, hi = min(rep.t0, t1), max(rep.t0, t1)
    if not lo - RANGE_TOL <= t <= hi + RANGE_TOL:
        raise ParameterOutOfRange(f"t = {t!r} outside link range [{lo!r}, {hi!r}]")


def _base_samples(rep: SquareRep, t: float):
    """Position, velocity, acceleration of the three canonical even curves."""
    a, k = rep.a, rep.k
    s = (1.0 - k) / t
    ds = -(1.0 - k) / (t * t)
    dds = 2.0 * (1.0 - k) / (t * t * t)
    hyp = (
        PlaneVector(a * (-1.0 - s), a * (-1.0 - t)),
        PlaneVector(-a * ds, -a),
        PlaneVector(-a * dds, 0.0),
    )
    line_x = (
        PlaneVector(a, a * t),
        PlaneVector(0.0, a),
        PlaneVector(0.0, 0.0),
    )
    line_y = (
        PlaneVector(a * s, a),
        PlaneVector(a * ds, 0.0),
        PlaneVector(a * dds, 0.0),
    )
    return hyp, line_x, line_y


@dataclass(frozen=True)
class MultiCurveSample:
    """All six curves of a link sampled at one parameter value."""

    t: float
    samples: tuple[CurveSample, ...]

    @property
    def multipoint(self) -> MultiPoint:
        return MultiPoint(tuple(s.position for s in self.samples))


def canonical_multipoint(rep: SquareRep, t: float) -> MultiCurveSample:
    """Sample positions, velocities and accelerations at parameter t."""
    _check_range(rep, t)
    hyp, line_x, line_y = _base_samples(rep, t)
    by_residue = {0: hyp, 2: line_x, 4: line_y}
    samples = []
    for m in range(6):
        r = (m - rep.j) % 6
        if r in by_residue:
            pos, vel, acc = by_residue[r]
        else:
            pos, vel, acc = by_residue[(r + 3) % 6]
            pos, vel, acc = -pos, -vel, -acc
        samples.append(CurveSample(t, pos, vel, acc))
    return MultiCurveSample(t, tuple(samples))


@dataclass(frozen=True)
class LinkState:
    """Frame and oriented projective tangent at a link endpoint.

    For states on a convex boundary the tangent pulled back to the circle
    representation, adjoint(frame^{-1}, tangent), satisfies the star
    inequalities; this is checked on use, not on construction.
    """

    frame: FrameMatrix
    tangent: ProjectiveTangent


def circle_tangent(state: LinkState) -> TangentElement:
    """The state's tangent conjugated back to the circle representation."""
    return adjoint(state.frame.inverse(), state.tangent.rep)


def state_is_convex(state: LinkState) -> bool:
    """Star inequalities for the pulled-back tangent."""
    return star_check(circle_tangent(state))


def transform_state(g: FrameMatrix, state: LinkState) -> LinkState:
    return LinkState(
        g.compose(state.frame),
        ProjectiveTangent.from_tangent(adjoint(g, state.tangent.rep)),
    )


def _columns_inverse(p1: PlaneVector, p2: PlaneVector) -> tuple[float, float, float, float]:
    """Entries of the inverse of the matrix with columns p1, p2 (not in SL2)."""
    w = wedge(p1, p2)
    return (p2.y / w, -p2.x / w, -p1.y / w, p1.x / w)


def _canonical_frame(rep: SquareRep, t: float) -> FrameMatrix:
    """The unique frame sending u*_m to sigma_m(t) for every index m."""
    hyp, line_x, _ = _base_samples(rep, t)
    ia, ib, ic, id_ = _columns_inverse(STANDARD[rep.j], STANDARD[rep.j + 2])
    p1, p2 = hyp[0], line_x[0]
    return FrameMatrix(
        p1.x * ia + p2.x * ic,
        p1.x * ib + p2.x * id_,
        p1.y * ia + p2.y * ic,
        p1.y * ib + p2.y * id_,
    )


def _canonical_tangent(rep: SquareRep, t: float) -> TangentElement:
    """Velocity matrix X(t) with sigma_m'(t) = X(t) sigma_m(t)."""
    hyp, line_x, _ = _base_samples(rep, t)
    p1, p2 = hyp[0], line_x[0]
    v1, v2 = hyp[1], line_x[1]
    w = wedge(p1, p2)
    m00 = (v1.x * p2.y - v2.x * p1.y) / w
    m01 = (-v1.x * p2.x + v2.x * p1.x) / w
    m10 = (v1.y * p2.y - v2.y * p1.y) / w
    m11 = (-v1.y * p2.x + v2.y * p1.x) / w
    return TangentElement(0.5 * (m00 - m11), m01, m10)


def frame_at(rep: SquareRep, t: float) -> LinkState:
    """Link state at parameter t of the canonical square representation."""
    _check_range(rep, t)
    return LinkState(
        _canonical_frame(rep, t),
        ProjectiveTangent.from_tangent(_canonical_tangent(rep, t)),
    )


def propagate(state: LinkState, tau: float, j: int) -> tuple[LinkState, SquareRep]:
    """Advance a state through one link of turning fraction tau at index j.

    Recovers the unique square representation compatible with the state:
    the edge velocities d2 = X p_{j+2} and d4 = X p_{j+4} are aligned with
    the +y and -x axes by a unit-determinant map, whose residual diagonal
    freedom is fixed by requiring both mapped edge points to share the
    coordinate value a.  The recovered t0 must land in (-1, k-1).
    """
    if not 0.0 <= tau < 1.0:
        raise ParameterOutOfRange(f"tau = {tau!r} outside [0, 1)")
    if j not in (0, 2, 4):
        raise ParameterOutOfRange(f"hyperbolic index j = {j!r} not in (0, 2, 4)")
    x = state.tangent.rep
    p2 = state.frame.apply(STANDARD[j + 2])
    p4 = state.frame.apply(STANDARD[j + 4])
    d2 = x.apply(p2)
    d4 = x.apply(p4)
    w = wedge(d2, d4)
    scale = d2.norm() * d4.norm()
    if scale == 0.0 or abs(w) < VELOCITY_TOL * scale:
        raise DegenerateVelocity("edge velocities are linearly dependent")
    if w < 0.0:
        raise NotRankOneCompatible("edge velocities wind clockwise; star conditions fail")
    if not star_check(adjoint(state.frame.inverse(), x)):
        raise NotRankOneCompatible("state tangent violates the star inequalities")
    # h0 sends d2 to (0, w) and d4 to (-1, 0) with determinant one.
    h0 = FrameMatrix(d2.y / w, -d2.x / w, d4.y, -d4.x)
    q2 = h0.apply(p2)
    q4 = h0.apply(p4)
    if q2.x <= 0.0 or q4.y <= 0.0:
        raise NotRankOneCompatible("edge points map off the positive axes")
    a = math.sqrt(q2.x * q4.y)
    if a * a <= MIN_SCALE_SQ:
        raise NotRankOneCompatible(f"recovered scale a = {a!r} gives no hyperbola")
    t0 = q2.y / q4.y
    s0 = q4.x / q2.x
    k = SQRT3 / (2.0 * a * a)
    if not (-1.0 < t0 < k - 1.0 and -1.0 < s0 < k - 1.0):
        raise NotRankOneCompatible(
            f"recovered start t0 = {t0!r}, s0 = {s0!r} outside (-1, {k - 1.0!r})"
        )
    rep = SquareRep(a, t0, tau, j)
    if tau == 0.0:
        return state, rep
    t1 = t_end(rep)
    g = state.frame.compose(_canonical_frame(rep, t0).inverse())
    frame_out = g.compose(_canonical_frame(rep, t1))
    tangent_out = ProjectiveTangent.from_tangent(adjoint(g, _canonical_tangent(rep, t1)))
    return LinkState(frame_out, tangent_out), rep


def link_map(state: LinkState, rep: SquareRep) -> FrameMatrix:
    """The frame g with state = g applied to the canonical link start."""
    return state.frame.compose(_canonical_frame(rep, rep.t0).inverse())


def link_multicurve(rep: SquareRep, samples: int = 16,
                    g: FrameMatrix | None = None) -> list[list[CurveSample]]:
    """Six sampled curves of one link, optionally moved by a frame g."""
    lo, hi = rep.t0, t_end(rep)
    if rep.tau == 0.0:
        raise ParameterOutOfRange("cannot sample a zero-length link")
    curves: list[list[CurveSample]] = [[] for _ in range(6)]
    for t in np.linspace(lo, hi, max(samples, 2)):
        mc = canonical_multipoint(rep, float(t))
        for m, s in enumerate(mc.samples):
            if g is None:
                curves[m].append(s)
            else:
                curves[m].append(CurveSample(
                    s.t, g.apply(s.position), g.apply(s.velocity),
                    g.apply(s.acceleration)))
    return curves


# Vectorized sampling used by closure checks, polylines and quadrature.

def curve_points(rep: SquareRep, ts: np.ndarray, m: int) -> np.ndarray:
    """Positions of curve m at parameters ts, shape (len(ts), 2)."""
    a, k = rep.a, rep.k
    t = np.asarray(ts, dtype=float)
    s = (1.0 - k) / t
    r = (m - rep.j) % 6
    sign = 1.0
    if r % 2 == 1:
        # odd curves are central reflections of the even ones
        r = (r + 3) % 6
        sign = -1.0
    out = np.empty((t.size, 2))
    if r == 0:
        out[:, 0] = a * (-1.0 - s)
        out[:, 1] = a * (-1.0 - t)
    elif r == 2:
        out[:, 0] = a
        out[:, 1] = a * t
    elif r == 4:
        out[:, 0] = a * s
        out[:, 1] = a
    else:
        raise ParameterOutOfRange(f"curve index residue {r} is not even")
    return sign * out


def frame_grid(rep: SquareRep, ts: np.ndarray) -> np.ndarray:
    """Canonical frames at parameters ts as an array of shape (len(ts), 2, 2)."""
    hyp = curve_points(rep, ts, rep.j)
    edge = curve_points(rep, ts, rep.j + 2)
    ia, ib, ic, id_ = _columns_inverse(STANDARD[rep.j], STANDARD[rep.j + 2])
    inv_mat = np.array([[ia, ib], [ic, id_]])
    cols = np.empty((len(hyp), 2, 2))
    cols[:, 0, 0] = hyp[:, 0]
    cols[:, 1, 0] = hyp[:, 1]
    cols[:, 0, 1] = edge[:, 0]
    cols[:, 1, 1] = edge[:, 1]
    return cols @ inv_mat
