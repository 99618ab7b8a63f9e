"""Chains of hyperbolic links and the rotation-by-pi/3 closure condition.

A chain is an initial link state plus a list of (tau, j) parameters.  A
closed chain covers the fundamental boundary interval: its final frame is
the initial frame composed with a rotation by pi/3 and its projective
tangent returns to the start.  The sweep angle of the relative position
frame^{-1} phi(t) u*_0 must grow monotonically from 0 to pi/3.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ChainFormatError,
    FrameDeterminantError,
    LinkLengthViolation,
    NotClosed,
    ParameterOutOfRange,
)
from .hyperlink import LinkState, SquareRep, frame_grid, link_area, link_map, propagate, t_end
from .multicurve import STANDARD
from .sl2 import ROT60, FrameMatrix, ProjectiveTangent, TangentElement, frame_distance

# Residual bound under which closure_report classifies a chain as closed.
FEASIBLE_TOL = 1e-6
# Stricter tier used by verification suites.
STRICT_TOL = 1e-9
ANGLE_TOL = 1e-9
ANGLE_SAMPLES = 64

SIXTH_TURN = math.pi / 3.0


class LinkParam(NamedTuple):
    tau: float
    j: int


@dataclass(frozen=True)
class ChainParams:
    """Initial state plus link parameters (tau in [0, 1), j in {0, 2, 4})."""

    initial: LinkState
    links: tuple[LinkParam, ...]

    def __post_init__(self) -> None:
        links = tuple(LinkParam(float(t), int(j)) for t, j in self.links)
        object.__setattr__(self, "links", links)
        for i, (tau, j) in enumerate(links):
            if not 0.0 <= tau < 1.0:
                raise ParameterOutOfRange(f"link {i}: tau = {tau!r} outside [0, 1)")
            if j not in (0, 2, 4):
                raise ParameterOutOfRange(f"link {i}: index j = {j!r} not in (0, 2, 4)")


@dataclass(frozen=True)
class AssembledChain:
    """Propagation record: states[0] is the initial state, one rep per link."""

    states: tuple[LinkState, ...]
    reps: tuple[SquareRep, ...]

    @property
    def final(self) -> LinkState:
        return self.states[-1]

    def area(self) -> float:
        return sum(link_area(r) for r in self.reps)


def assemble(chain: ChainParams) -> AssembledChain:
    """Propagate through every link; failures are annotated with the link index."""
    states = [chain.initial]
    reps = []
    for i, (tau, j) in enumerate(chain.links):
        try:
            state, rep = propagate(states[-1], tau, j)
        except Exception as exc:
            raise type(exc)(f"link {i}: {exc}") from exc
        states.append(state)
        reps.append(rep)
    return AssembledChain(tuple(states), tuple(reps))


def chain_area(chain: ChainParams) -> float:
    """Sum of link_area over the chain's recovered square representations."""
    return assemble(chain).area()


@dataclass(frozen=True)
class ClosureReport:
    frame_residual: float
    tangent_residual: float
    angle_ok: bool
    angle_margin: float

    def residual(self) -> float:
        return max(self.frame_residual, self.tangent_residual)

    def closed(self, tol: float = FEASIBLE_TOL) -> bool:
        return self.residual() <= tol and self.angle_ok


def _sweep_angles(chain: ChainParams, assembled: AssembledChain,
                  samples_per_link: int) -> np.ndarray:
    """Angles of frame(t0)^{-1} phi(t) u*_0 sampled along every link."""
    inv0 = chain.initial.frame.inverse()
    u0 = np.array([STANDARD[0].x, STANDARD[0].y])
    chunks = [np.zeros(1)]
    for state, rep in zip(assembled.states, assembled.reps):
        if rep.tau == 0.0:
            continue
        lead = inv0.compose(link_map(state, rep))
        ts = np.linspace(rep.t0, t_end(rep), samples_per_link)
        frames = frame_grid(rep, ts)
        lead_mat = np.array([[lead.alpha, lead.beta], [lead.gamma, lead.delta]])
        pts = (lead_mat @ frames) @ u0
        chunks.append(np.arctan2(pts[:, 1], pts[:, 0]))
    return np.concatenate(chunks)


def closure_report(chain: ChainParams, samples_per_link: int = ANGLE_SAMPLES) -> ClosureReport:
    """Frame and tangent closure residuals plus the sweep-angle check."""
    assembled = assemble(chain)
    return closure_of(chain, assembled, samples_per_link)


def closure_of(chain: ChainParams, assembled: AssembledChain,
               samples_per_link: int = ANGLE_SAMPLES) -> ClosureReport:
    """closure_report for a chain that is already assembled."""
    start, end = chain.initial, assembled.final
    frame_res = frame_distance(end.frame, start.frame.compose(ROT60))
    tangent_res = start.tangent.distance(end.tangent)
    margin = angle_margin_of(chain, assembled, samples_per_link)
    return ClosureReport(frame_res, tangent_res, margin >= -ANGLE_TOL, margin)


def angle_margin_of(chain: ChainParams, assembled: AssembledChain | None = None,
                    samples_per_link: int = ANGLE_SAMPLES) -> float:
    """Worst slack of the sweep-angle condition; negative means violated.

    The sweep angle must stay in [0, pi/3] and increase monotonically; the
    margin is the smallest of the two range slacks and the smallest sampled
    increment.  Valid for open segments as well as closed chains.
    """
    if assembled is None:
        assembled = assemble(chain)
    angles = _sweep_angles(chain, assembled, samples_per_link)
    low = float(angles.min())
    high = SIXTH_TURN - float(angles.max())
    mono = float(np.diff(angles).min()) if angles.size > 1 else 0.0
    return min(low, high, mono)


def _merge(tau_a: float, tau_b: float) -> float:
    """Turning fraction of two consecutive links on the same hyperbola."""
    return tau_a + tau_b - tau_a * tau_b


def normalize_links(chain: ChainParams) -> ChainParams:
    """Canonical link list: merged same-index runs, zero padding between jumps.

    Degenerate entries are dropped, adjacent links on the same hyperbolic
    index merge by the semigroup rule, and tau = 0 links are inserted so
    consecutive indices always advance by two.  Assembled geometry (area,
    closure) is unchanged.
    """
    stack: list[LinkParam] = []
    for tau, j in chain.links:
        if tau == 0.0:
            continue
        if stack and stack[-1].j == j:
            stack[-1] = LinkParam(_merge(stack[-1].tau, tau), j)
        else:
            stack.append(LinkParam(tau, j))
    padded: list[LinkParam] = []
    for link in stack:
        if padded:
            j = (padded[-1].j + 2) % 6
            while j != link.j:
                padded.append(LinkParam(0.0, j))
                j = (j + 2) % 6
        padded.append(link)
    return ChainParams(chain.initial, tuple(padded))


def link_length(chain: ChainParams, closure_tol: float = FEASIBLE_TOL) -> int:
    """Normalized link count n + 1 of a closed chain; checks n = 0 mod 3.

    The count is invariant under relabeling the starting multi-point, so no
    j0 = 0 normalization is applied before counting.
    """
    report = closure_report(chain)
    if report.residual() > closure_tol:
        raise NotClosed(
            f"closure residual {report.residual():.3e} exceeds {closure_tol:.1e}"
        )
    links = normalize_links(chain).links
    if not links:
        raise LinkLengthViolation("closed chain has no non-degenerate links")
    n = len(links) - 1
    if n % 3 != 0:
        raise LinkLengthViolation(f"normalized chain has n = {n}, not 0 mod 3")
    return len(links)


# JSON chain dialect.

def chain_to_dict(chain: ChainParams) -> dict:
    f = chain.initial.frame
    a, b, c = chain.initial.tangent.components()
    return {
        "initial": {
            "frame": [f.alpha, f.beta, f.gamma, f.delta],
            "tangent": [a, b, c],
        },
        "links": [{"tau": tau, "j": j} for tau, j in chain.links],
    }


def _reals(raw, n: int, what: str) -> list[float]:
    if not isinstance(raw, list) or len(raw) != n:
        raise ChainFormatError(f"{what} must be a list of {n} numbers")
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ChainFormatError(f"{what} must contain only numbers")
        out.append(float(v))
    return out


def chain_from_dict(data: dict) -> ChainParams:
    if not isinstance(data, dict):
        raise ChainFormatError("chain document must be a JSON object")
    try:
        initial = data["initial"]
        frame_raw = initial["frame"]
        tangent_raw = initial["tangent"]
        links_raw = data["links"]
    except (KeyError, TypeError) as exc:
        raise ChainFormatError(f"missing chain field: {exc}") from exc
    al, be, ga, de = _reals(frame_raw, 4, "initial.frame")
    try:
        frame = FrameMatrix(al, be, ga, de)
    except FrameDeterminantError as exc:
        raise ChainFormatError(str(exc)) from exc
    ta, tb, tc = _reals(tangent_raw, 3, "initial.tangent")
    tangent = ProjectiveTangent.from_tangent(TangentElement(ta, tb, tc))
    if not isinstance(links_raw, list):
        raise ChainFormatError("links must be a list")
    links = []
    for i, entry in enumerate(links_raw):
        if not isinstance(entry, dict) or set(entry) != {"tau", "j"}:
            raise ChainFormatError(f"link {i} must be an object with keys tau, j")
        tau, j = entry["tau"], entry["j"]
        if isinstance(tau, bool) or not isinstance(tau, (int, float)):
            raise ChainFormatError(f"link {i}: tau must be a number")
        if isinstance(j, bool) or not isinstance(j, int):
            raise ChainFormatError(f"link {i}: j must be an integer")
        links.append(LinkParam(float(tau), j))
    try:
        return ChainParams(LinkState(frame, tangent), tuple(links))
    except ParameterOutOfRange as exc:
        raise ChainFormatError(str(exc)) from exc


def save_chain(chain: ChainParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chain_to_dict(chain), fh, indent=2)
        fh.write("\n")


def load_chain(path: str) -> ChainParams:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChainFormatError(f"invalid JSON: {exc}") from exc
    return chain_from_dict(data)
