"""Closed hexameral domains: the smoothed octagon, densities, exports.

The area of a domain is twice the chain area (odd-index sectors mirror the
even ones), and the packing density of a balanced-hexagon normalized domain
is area / sqrt(12).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import (
    FEASIBLE_TOL,
    STRICT_TOL,
    AssembledChain,
    ChainParams,
    ClosureReport,
    LinkParam,
    assemble,
    chain_to_dict,
    closure_of,
    link_length,
)
from .errors import NotClosed
from .hyperlink import SquareRep, circle_tangent, curve_points, frame_at, link_map, t_end
from .multicurve import STANDARD, CurveSample, MultiPoint
from .sl2 import PlaneVector, TangentElement, wedge

SQRT12 = math.sqrt(12.0)

# Smoothed octagon constants in the square representation.
OCTAGON_SCALE = 12.0 ** 0.25 / math.sqrt(4.0 - math.sqrt(2.0))
OCTAGON_T0 = -1.0 / math.sqrt(2.0)
OCTAGON_TAU = 2.0 - math.sqrt(2.0)
OCTAGON_INDICES = (0, 2, 4, 0)

# Closed forms anchoring the acceptance values.
OCTAGON_LINK_AREA = (
    math.sqrt(3.0)
    * (8.0 - 8.0 * math.sqrt(2.0) + math.sqrt(2.0) * math.log(2.0))
    / (4.0 * (-4.0 + math.sqrt(2.0)))
)
OCTAGON_DENSITY = (8.0 - math.sqrt(32.0) - math.log(2.0)) / (math.sqrt(8.0) - 1.0)
CIRCLE_DENSITY = math.pi / SQRT12


@dataclass(frozen=True)
class BoundaryPolyline:
    """Sampled boundary: consecutive points distinct, positively oriented."""

    points: tuple[PlaneVector, ...]
    closed: bool

    def __post_init__(self) -> None:
        pts = self.points
        if len(pts) < 3:
            raise NotClosed("polyline needs at least three points")
        pairs = zip(pts, pts[1:] + (pts[0],) if self.closed else pts[1:])
        for p, q in pairs:
            if (p - q).norm() == 0.0:
                raise NotClosed("polyline has coincident consecutive points")
        if self.closed and self.area() <= 0.0:
            raise NotClosed("closed polyline is not positively oriented")

    def coords(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points])

    def area(self) -> float:
        """Shoelace area; for open polylines the chord closes the loop."""
        c = self.coords()
        x, y = c[:, 0], c[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def centrally_symmetric(self, tol: float = 1e-9) -> bool:
        """Does -p appear among the points for every point p?"""
        c = self.coords()
        n = len(c)
        if n % 2 != 0:
            return False
        # boundary order pairs p_i with p_{i + n/2} for a symmetric sampling
        return bool(np.max(np.abs(c + np.roll(c, n // 2, axis=0))) < tol)


@dataclass(frozen=True)
class HexameralDomain:
    """A closed chain together with its area and packing density."""

    chain: ChainParams
    assembled: AssembledChain
    closure: ClosureReport
    area: float
    density: float


def from_chain(chain: ChainParams, tol: float = FEASIBLE_TOL) -> HexameralDomain:
    """Validate closure and wrap a chain as a domain."""
    assembled = assemble(chain)
    report = closure_of(chain, assembled)
    if not report.closed(tol):
        raise NotClosed(
            f"chain is not closed: residual {report.residual():.3e}, "
            f"angle margin {report.angle_margin:.3e}"
        )
    area = 2.0 * assembled.area()
    return HexameralDomain(chain, assembled, report, area, area / SQRT12)


def density(dom: HexameralDomain) -> float:
    """Packing density area / sqrt(12) of a closed domain."""
    if not dom.closure.closed():
        raise NotClosed("domain chain fails the closure check")
    return 2.0 * dom.assembled.area() / SQRT12


def octagon_square_rep() -> SquareRep:
    return SquareRep(OCTAGON_SCALE, OCTAGON_T0, OCTAGON_TAU, 0)


def smoothed_octagon() -> HexameralDomain:
    """The smoothed octagon as a four-link closed chain."""
    rep = octagon_square_rep()
    initial = frame_at(rep, rep.t0)
    links = tuple(LinkParam(OCTAGON_TAU, j) for j in OCTAGON_INDICES)
    return from_chain(ChainParams(initial, links), tol=STRICT_TOL)


def boundary_polyline(dom: HexameralDomain, per_link: int = 64) -> BoundaryPolyline:
    """All six curve images over the fundamental interval, in boundary order."""
    coords = []
    for m in range(6):
        for state, rep in zip(dom.assembled.states, dom.assembled.reps):
            if rep.tau == 0.0:
                continue
            g = link_map(state, rep)
            g_mat = np.array([[g.alpha, g.beta], [g.gamma, g.delta]])
            ts = np.linspace(rep.t0, t_end(rep), per_link, endpoint=False)
            coords.append(curve_points(rep, ts, m) @ g_mat.T)
    pts = np.concatenate(coords)
    return BoundaryPolyline(tuple(PlaneVector(x, y) for x, y in pts), closed=True)


@dataclass(frozen=True)
class CircleReference:
    """Unit-circle comparison domain (rank three, density pi / sqrt(12))."""

    polyline: BoundaryPolyline
    density: float


def circle_reference(samples: int = 256) -> CircleReference:
    """Polyline of the unit circle; an odd sample count is rounded up to even."""
    n = max(6, samples + samples % 2)
    angles = 2.0 * math.pi * np.arange(n) / n
    pts = tuple(PlaneVector(math.cos(t), math.sin(t)) for t in angles)
    return CircleReference(BoundaryPolyline(pts, closed=True), CIRCLE_DENSITY)


def circle_multicurve(samples: int = 16) -> list[list[CurveSample]]:
    """The circle's six curves over one sixth of a turn, with derivatives."""
    ts = np.linspace(0.0, math.pi / 3.0, samples)
    curves = []
    for j in range(6):
        base = math.pi * j / 3.0
        curve = []
        for t in ts:
            p = PlaneVector(math.cos(base + t), math.sin(base + t))
            curve.append(CurveSample(float(t), p, PlaneVector(-p.y, p.x), -p))
        curves.append(curve)
    return curves


def star_profile(dom: HexameralDomain, per_link: int = 32) -> np.ndarray:
    """Star margins (c - sqrt(3)|a|, -(3b + c), det X) sampled along the boundary."""
    rows = []
    for rep in dom.assembled.reps:
        if rep.tau == 0.0:
            continue
        for t in np.linspace(rep.t0, t_end(rep), per_link):
            x = circle_tangent(frame_at(rep, float(t)))
            rows.append((
                x.c - math.sqrt(3.0) * abs(x.a),
                -(3.0 * x.b + x.c),
                x.det(),
            ))
    return np.array(rows)


def initial_multipoint(dom: HexameralDomain) -> MultiPoint:
    return STANDARD.transformed(dom.chain.initial.frame)


def _hexagon_vertices(points: list[PlaneVector], dirs: list[PlaneVector]) -> list[PlaneVector]:
    """Intersections of consecutive tangent lines: the balanced hexagon."""
    out = []
    for m in range(6):
        p, v = points[m], dirs[m]
        q, u = points[(m + 1) % 6], dirs[(m + 1) % 6]
        denom = wedge(v, u)
        t = wedge(q - p, u) / denom
        out.append(p + v.scaled(t))
    return out


def export_json(dom: HexameralDomain) -> dict:
    """Chain dialect extended with the domain's derived quantities."""
    doc = chain_to_dict(dom.chain)
    doc["area"] = dom.area
    doc["density"] = dom.density
    doc["link_length"] = link_length(dom.chain)
    doc["closure"] = {
        "frame_residual": dom.closure.frame_residual,
        "tangent_residual": dom.closure.tangent_residual,
        "angle_ok": dom.closure.angle_ok,
        "angle_margin": dom.closure.angle_margin,
    }
    return doc


def export_svg(dom: HexameralDomain, per_link: int = 64) -> str:
    """SVG 1.1 document: boundary, initial multi-point, balanced hexagon."""
    poly = boundary_polyline(dom, per_link)
    mp = initial_multipoint(dom)
    x = dom.chain.initial.tangent.rep
    dirs = [x.apply(mp[m]) for m in range(6)]
    hexagon = _hexagon_vertices([mp[m] for m in range(6)], dirs)

    all_pts = list(poly.points) + hexagon
    xs = [p.x for p in all_pts]
    ys = [p.y for p in all_pts]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y)
    margin = 0.05 * span
    scale = 1000.0 / (span + 2.0 * margin)

    def place(p: PlaneVector) -> tuple[float, float]:
        # y flipped so counterclockwise geometry renders counterclockwise
        return (
            (p.x - lo_x + margin) * scale,
            1000.0 - (p.y - lo_y + margin) * scale,
        )

    def path_of(points, close: bool) -> str:
        parts = []
        for i, p in enumerate(points):
            px, py = place(p)
            parts.append(f"{'M' if i == 0 else 'L'} {px:.3f} {py:.3f}")
        if close:
            parts.append("Z")
        return " ".join(parts)

    markers = []
    for m in range(6):
        px, py = place(mp[m])
        markers.append(
            f'  <circle cx="{px:.3f}" cy="{py:.3f}" r="6" fill="#c43b3b"/>'
        )
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'viewBox="0 0 1000 1000">',
        f'  <path d="{path_of(hexagon, True)}" fill="none" '
        'stroke="#999999" stroke-width="2"/>',
        f'  <path d="{path_of(poly.points, True)}" fill="none" '
        'stroke="#000000" stroke-width="3"/>',
        *markers,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
