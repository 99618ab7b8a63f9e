"""Calculus-of-variations checks on frame paths.

The boundary area is a line integral in the frame entries. On a path
expressed relative to its initial frame, summing the six sector wedges
collapses to (3/2) * integral of (alpha dgamma - gamma dalpha)
+ (beta ddelta - delta dbeta), which equals the full domain area (twice
the chain area) on chain-derived paths and pi on the unit-circle path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainParams, assemble
from .errors import ParameterOutOfRange, SignCondition, StarViolation, WedgeMismatch
from .hyperlink import frame_grid, t_end
from .multicurve import STANDARD
from .sl2 import SQRT3, FrameMatrix, TangentElement, star_check, wedge

MIN_GRID = 16
IDENTITY_TOL = 1e-8
LEMMA_TOL = 1e-10


@dataclass(frozen=True)
class FramePath:
    """Frames sampled along a parameter grid, relative to the starting frame."""

    grid: tuple[float, ...]
    frames: tuple[FrameMatrix, ...]

    def __post_init__(self) -> None:
        if len(self.grid) < MIN_GRID:
            raise ParameterOutOfRange(
                f"frame path needs at least {MIN_GRID} grid points, got {len(self.grid)}"
            )
        if len(self.grid) != len(self.frames):
            raise ParameterOutOfRange("grid and frame counts differ")
        g = np.asarray(self.grid)
        if not np.all(np.diff(g) > 0.0):
            raise ParameterOutOfRange("grid parameters must increase strictly")
        first = self.frames[0]
        off = max(
            abs(first.alpha - 1.0), abs(first.beta),
            abs(first.gamma), abs(first.delta - 1.0),
        )
        if off > IDENTITY_TOL:
            raise ParameterOutOfRange(
                "frame path must start at the identity; relativize with from_absolute"
            )

    def entries(self) -> np.ndarray:
        """Path entries as an array of shape (n, 4): alpha, beta, gamma, delta."""
        return np.array([f.entries() for f in self.frames])


def from_absolute(grid, frames) -> FramePath:
    """Relativize absolute frames by the inverse of the first one."""
    frames = tuple(frames)
    inv0 = frames[0].inverse()
    return FramePath(tuple(float(t) for t in grid),
                     tuple(inv0.compose(f) for f in frames))


def rotation_path(span: float = math.pi / 3.0, samples: int = 64) -> FramePath:
    """Rotations through the given span, starting at the identity."""
    grid = np.linspace(0.0, span, samples)
    frames = tuple(
        FrameMatrix(math.cos(t), -math.sin(t), math.sin(t), math.cos(t))
        for t in grid
    )
    return FramePath(tuple(float(t) for t in grid), frames)


def chain_path(chain: ChainParams, per_link: int = 256) -> FramePath:
    """The frame path traced by a chain, one unit of parameter per link."""
    if per_link < 2:
        raise ParameterOutOfRange("per_link must be at least 2")
    assembled = assemble(chain)
    inv0 = np.array(chain.initial.frame.inverse().entries()).reshape(2, 2)
    grid: list[float] = []
    mats: list[np.ndarray] = []
    pos = 0
    for state, rep in zip(assembled.states, assembled.reps):
        if rep.tau == 0.0:
            continue
        ts = np.linspace(rep.t0, t_end(rep), per_link)
        canon = frame_grid(rep, ts)
        canon0_inv = np.linalg.inv(canon[0])
        # state.frame = g * canonical(t0), so relative frames share one g
        move = inv0 @ np.array(state.frame.entries()).reshape(2, 2)
        rel = move @ canon0_inv @ canon
        start = 1 if pos > 0 else 0
        for i in range(start, per_link):
            grid.append(pos + (float(ts[i]) - rep.t0) / (t_end(rep) - rep.t0))
            mats.append(rel[i])
        pos += 1
    frames = tuple(FrameMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1]) for m in mats)
    return FramePath(tuple(grid), frames)


def area_functional(path: FramePath) -> float:
    """Domain area of a frame path by trapezoidal line integration."""
    e = path.entries()
    a, b, c, d = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    # trapezoid of alpha dgamma - gamma dalpha telescopes to a shoelace sum
    twist = (a[:-1] * c[1:] - a[1:] * c[:-1]) + (b[:-1] * d[1:] - b[1:] * d[:-1])
    return 1.5 * float(np.sum(twist))


def euler_lagrange_residual(path: FramePath) -> float:
    """Worst violation of the three conserved quantities of extremal paths."""
    e = path.entries()
    a, b, c, d = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    return float(max(
        np.max(np.abs(d * d + c * c - 1.0)),
        np.max(np.abs(a * a + b * b - 1.0)),
        np.max(np.abs(c * a + d * b)),
    ))


@dataclass(frozen=True)
class Sampled:
    """A function sampled on a grid, optionally with derivative samples."""

    values: np.ndarray
    deriv: np.ndarray | None = None


def second_variation_circle(u, w: Sampled, grid) -> float:
    """Quadrature of 4 u w' along the grid; indefinite in sign."""
    grid = np.asarray(grid, dtype=float)
    if len(grid) < MIN_GRID:
        raise ParameterOutOfRange("second variation grid needs at least 16 points")
    u_vals = np.asarray(u.values if isinstance(u, Sampled) else u, dtype=float)
    if w.deriv is None:
        raise ParameterOutOfRange("w must carry derivative samples")
    return float(np.trapezoid(4.0 * u_vals * np.asarray(w.deriv), grid))


def _wedge_coefficients(x: TangentElement, m: int) -> tuple[float, float, float]:
    """Coefficients of wedge(X u, V u) as a linear functional of V = (a', b', c')."""
    u = STANDARD[m]
    p, q = u.x, u.y
    return (-x.b * q * q - x.c * p * p, x.a * q * q - x.c * p * q,
            x.a * p * p + x.b * p * q)


def curvature_lemma_value(x: TangentElement) -> float:
    """Positive curvature combination forced once two of the three vanish.

    Requiring wedge(X u_j, (X' + X^2) u_j) = 0 at j = 0 and j = 2 pins the
    value at j = 4 regardless of which tangent derivative X' realizes the
    two conditions; the closed form is cross-checked against a least-squares
    realization before being returned.
    """
    if not star_check(x):
        raise StarViolation(f"({x.a!r}, {x.b!r}, {x.c!r}) is not a convex tangent")
    disc = x.a * x.a + x.b * x.c
    closed = 3.0 * SQRT3 * disc * disc / (3.0 * x.a + SQRT3 * x.c)

    rows, rhs = [], []
    for m in (0, 2):
        rows.append(_wedge_coefficients(x, m))
        u = STANDARD[m]
        rhs.append(disc * wedge(u, x.apply(u)))
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    u4 = STANDARD[4]
    ca, cb, cc = _wedge_coefficients(x, 4)
    direct = (ca * sol[0] + cb * sol[1] + cc * sol[2]
              - disc * wedge(u4, x.apply(u4)))
    if abs(direct - closed) > LEMMA_TOL * max(1.0, abs(closed)):
        raise WedgeMismatch(
            f"curvature value {direct!r} disagrees with closed form {closed!r}"
        )
    return closed


@dataclass(frozen=True)
class Rank2Report:
    """First-variation data for the rank-two reduction."""

    integral: float
    constraint_residual: float
    x_variation_sign: int


def rank2_first_variation(s: Sampled, x: Sampled, grid, z=None) -> Rank2Report:
    """Quadrature of (sqrt(3) s' - (1 + s^2) x') / 4 with the z-constraint.

    z may be a scalar, an array, or None; when None it is recovered from
    x'(s^2 - 1) = s' z so the constraint residual vanishes identically.
    The x-variation sign is the uniform sign of s s' / 2, or 0 if mixed.
    """
    grid = np.asarray(grid, dtype=float)
    sv = np.asarray(s.values, dtype=float)
    xv = np.asarray(x.values, dtype=float)
    if s.deriv is None or x.deriv is None:
        raise ParameterOutOfRange("s and x must carry derivative samples")
    sd = np.asarray(s.deriv, dtype=float)
    xd = np.asarray(x.deriv, dtype=float)
    if not (len(grid) == len(sv) == len(xv) == len(sd) == len(xd)):
        raise ParameterOutOfRange("grid and sample lengths differ")
    if np.min(sd) <= 0.0:
        raise SignCondition("s must increase strictly along the grid")

    lhs = xd * (sv * sv - 1.0)
    if z is None:
        z_vals = lhs / sd
    else:
        z_vals = np.broadcast_to(np.asarray(z, dtype=float), sv.shape)
    residual = float(np.max(np.abs(lhs - sd * z_vals)))

    integrand = 0.25 * (SQRT3 * sd - (1.0 + sv * sv) * xd)
    integral = float(np.trapezoid(integrand, grid))

    el = 0.5 * sv * sd
    if np.all(el > 0.0):
        sign = 1
    elif np.all(el < 0.0):
        sign = -1
    else:
        sign = 0
    return Rank2Report(integral, residual, sign)
