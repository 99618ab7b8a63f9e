"""Plane vectors, unit-determinant frames, and traceless tangents.

Frames act on column vectors: (x, y) -> (alpha*x + beta*y, gamma*x + delta*y).
Tangents (a, b, c) stand for the traceless matrix [[a, b], [c, -a]].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateVelocity, FrameDeterminantError

# Construction rejects frames whose determinant cannot be repaired by scaling.
DET_REJECT_TOL = 1e-9
# After repair the determinant is within this bound of one.
DET_TOL = 1e-12

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True, slots=True)
class PlaneVector:
    """Point or direction in the plane."""

    x: float
    y: float

    def __add__(self, other: "PlaneVector") -> "PlaneVector":
        return PlaneVector(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "PlaneVector") -> "PlaneVector":
        return PlaneVector(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "PlaneVector":
        return PlaneVector(-self.x, -self.y)

    def scaled(self, factor: float) -> "PlaneVector":
        return PlaneVector(factor * self.x, factor * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def wedge(u: PlaneVector, v: PlaneVector) -> float:
    """Signed parallelogram area u ^ v = u.x*v.y - u.y*v.x."""
    return u.x * v.y - u.y * v.x


@dataclass(frozen=True, slots=True)
class FrameMatrix:
    """Element of SL2(R); determinant is re-projected to one on construction."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        det = self.alpha * self.delta - self.beta * self.gamma
        if abs(det - 1.0) > DET_REJECT_TOL:
            raise FrameDeterminantError(f"frame determinant {det!r} too far from 1")
        if abs(det - 1.0) > DET_TOL:
            # det is within 1e-9 of 1, hence positive; rescale to kill drift.
            fix = 1.0 / math.sqrt(det)
            object.__setattr__(self, "alpha", self.alpha * fix)
            object.__setattr__(self, "beta", self.beta * fix)
            object.__setattr__(self, "gamma", self.gamma * fix)
            object.__setattr__(self, "delta", self.delta * fix)

    def det(self) -> float:
        return self.alpha * self.delta - self.beta * self.gamma

    def apply(self, v: PlaneVector) -> PlaneVector:
        return PlaneVector(
            self.alpha * v.x + self.beta * v.y,
            self.gamma * v.x + self.delta * v.y,
        )

    def compose(self, other: "FrameMatrix") -> "FrameMatrix":
        """Matrix product self * other (other acts first)."""
        return FrameMatrix(
            self.alpha * other.alpha + self.beta * other.gamma,
            self.alpha * other.beta + self.beta * other.delta,
            self.gamma * other.alpha + self.delta * other.gamma,
            self.gamma * other.beta + self.delta * other.delta,
        )

    def __matmul__(self, other: "FrameMatrix") -> "FrameMatrix":
        return self.compose(other)

    def inverse(self) -> "FrameMatrix":
        return FrameMatrix(self.delta, -self.beta, -self.gamma, self.alpha)

    def entries(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


IDENTITY = FrameMatrix(1.0, 0.0, 0.0, 1.0)


def rotation(angle: float) -> FrameMatrix:
    """Counterclockwise rotation frame."""
    c, s = math.cos(angle), math.sin(angle)
    return FrameMatrix(c, -s, s, c)


# Closure of a chain composes the initial frame with this rotation.
ROT60 = rotation(math.pi / 3.0)


def frame_distance(g: FrameMatrix, h: FrameMatrix) -> float:
    """Max-norm of the entrywise difference."""
    return max(abs(p - q) for p, q in zip(g.entries(), h.entries()))


def apply(g: FrameMatrix, v: PlaneVector) -> PlaneVector:
    return g.apply(v)


@dataclass(frozen=True, slots=True)
class TangentElement:
    """Traceless 2x2 matrix [[a, b], [c, -a]] in coordinates (a, b, c)."""

    a: float
    b: float
    c: float

    def apply(self, v: PlaneVector) -> PlaneVector:
        return PlaneVector(self.a * v.x + self.b * v.y, self.c * v.x - self.a * v.y)

    def det(self) -> float:
        return -self.a * self.a - self.b * self.c

    def norm(self) -> float:
        return math.sqrt(self.a * self.a + self.b * self.b + self.c * self.c)

    def scaled(self, factor: float) -> "TangentElement":
        return TangentElement(factor * self.a, factor * self.b, factor * self.c)


def adjoint(g: FrameMatrix, x: TangentElement) -> TangentElement:
    """Conjugated tangent g X g^{-1}, again traceless."""
    al, be, ga, de = g.entries()
    # First column of X g^{-1} then of g (X g^{-1}); inverse is the adjugate.
    m00 = x.a * de + x.b * (-ga)
    m01 = x.a * (-be) + x.b * al
    m10 = x.c * de - x.a * (-ga)
    m11 = x.c * (-be) - x.a * al
    return TangentElement(
        al * m00 + be * m10,
        al * m01 + be * m11,
        ga * m00 + de * m10,
    )


def star_check(x: TangentElement) -> bool:
    """Strict convexity inequalities sqrt(3)|a| < c and 3b + c < 0."""
    return SQRT3 * abs(x.a) < x.c and 3.0 * x.b + x.c < 0.0


def exp_tangent(x: TangentElement, t: float) -> FrameMatrix:
    """Closed-form exponential exp(t X) of a traceless 2x2 matrix."""
    # X^2 = -det(X) I, so the series splits into cosine and sinc parts.
    q = x.det() * t * t
    if abs(q) < 1e-12:
        cos_part = 1.0 - q / 2.0 + q * q / 24.0
        sinc = t * (1.0 - q / 6.0 + q * q / 120.0)
    elif q > 0.0:
        w = math.sqrt(q)
        cos_part = math.cos(w)
        sinc = t * math.sin(w) / w
    else:
        w = math.sqrt(-q)
        cos_part = math.cosh(w)
        sinc = t * math.sinh(w) / w
    return FrameMatrix(
        cos_part + sinc * x.a,
        sinc * x.b,
        sinc * x.c,
        cos_part - sinc * x.a,
    )


@dataclass(frozen=True, slots=True)
class ProjectiveTangent:
    """Positive-scalar class of a tangent, stored with unit Euclidean norm.

    Only positive rescalings are identified, so the stored sign carries the
    curve orientation: a counterclockwise boundary tangent X at a point p
    satisfies wedge(p, X p) > 0, and under the star inequalities the triple
    (c, -b, a) has its first nonzero entry positive.
    """

    rep: TangentElement

    @staticmethod
    def from_tangent(x: TangentElement) -> "ProjectiveTangent":
        n = x.norm()
        if n < 1e-300:
            raise DegenerateVelocity("cannot project a zero tangent")
        return ProjectiveTangent(x.scaled(1.0 / n))

    def components(self) -> tuple[float, float, float]:
        return (self.rep.a, self.rep.b, self.rep.c)

    def distance(self, other: "ProjectiveTangent") -> float:
        """1 - <r1, r2>: zero exactly on equal oriented classes."""
        r, s = self.rep, other.rep
        return 1.0 - (r.a * s.a + r.b * s.b + r.c * s.c)
