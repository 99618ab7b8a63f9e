"""Derivative-free searches over chain parameters.

Two experiments: minimizing density over closed five-link chains, and
refitting a six-link segment with five links between the same endpoint
states.  Both use Nelder-Mead with quadratic exterior penalties plus a
least-squares feasibility polish, so reported incumbents sit on the
constraint set rather than inside the penalty dead band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares, minimize

from .chain import (
    ANGLE_TOL,
    FEASIBLE_TOL,
    STRICT_TOL,
    AssembledChain,
    ChainParams,
    ClosureReport,
    LinkParam,
    angle_margin_of,
    assemble,
    closure_of,
)
from .domain import SQRT12, smoothed_octagon
from .errors import GeometryError, InfeasibleInput
from .hyperlink import LinkState, circle_tangent
from .sl2 import IDENTITY, ROT60, ProjectiveTangent, TangentElement, frame_distance

FIVE_LINK_PATTERN = (0, 2, 4, 2, 0)
TAU_HI = 1.0 - 1e-6
FAIL_PENALTY_SCALE = 7.0
IMPROVEMENT_MARGIN = 1e-9

DEFAULT_BOUNDS = (
    (-0.6, 0.6),
    (-0.99, -0.01),
    (0.0, TAU_HI),
    (0.0, TAU_HI),
    (0.0, TAU_HI),
    (0.0, TAU_HI),
    (0.0, TAU_HI),
)

_NO_CLOSURE = ClosureReport(math.inf, math.inf, False, -math.inf)


@dataclass(frozen=True)
class PenaltyWeights:
    """Positive weights for closure, angle, and assembly-failure penalties."""

    closure: float = 1.0e6
    angle: float = 1.0e6
    feasibility: float = 10.0

    def __post_init__(self) -> None:
        if min(self.closure, self.angle, self.feasibility) <= 0.0:
            raise InfeasibleInput("penalty weights must be positive")


@dataclass(frozen=True)
class SearchSpec:
    variable_count: int = 7
    bounds: tuple[tuple[float, float], ...] = DEFAULT_BOUNDS
    penalty_weights: PenaltyWeights = PenaltyWeights()
    restarts: int = 3
    max_evals: int = 6000
    seed: int = 0
    start: tuple[float, ...] | None = None
    trace: bool = False

    def __post_init__(self) -> None:
        if not self.bounds:
            raise InfeasibleInput("bounds must be nonempty")
        if self.variable_count != len(self.bounds):
            raise InfeasibleInput("variable_count disagrees with bounds")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise InfeasibleInput(f"empty bound interval ({lo!r}, {hi!r})")
        if self.restarts < 1:
            raise InfeasibleInput("restarts must be at least 1")
        if self.max_evals < 0:
            raise InfeasibleInput("max_evals must be nonnegative")
        if self.start is not None:
            object.__setattr__(self, "start", tuple(float(v) for v in self.start))
            if len(self.start) != self.variable_count:
                raise InfeasibleInput("start point has the wrong dimension")


@dataclass(frozen=True)
class SearchResult:
    best_params: tuple[float, ...]
    best_density: float
    closure: ClosureReport
    feasible: bool
    eval_count: int
    trace: tuple[tuple[int, float], ...] | None


def decode_five_link(params) -> ChainParams:
    """Seven search variables to a chain: two tangent components, five taus.

    The initial frame is the identity and the tangent is completed to unit
    norm with positive third component, using up the group action so the
    search space stays seven dimensional.
    """
    p = np.asarray(params, dtype=float)
    if p.shape != (7,):
        raise InfeasibleInput(f"expected 7 parameters, got shape {p.shape}")
    a, b = float(p[0]), float(p[1])
    r2 = a * a + b * b
    if r2 >= 1.0:
        raise InfeasibleInput("tangent components leave the unit disk")
    x = TangentElement(a, b, math.sqrt(1.0 - r2))
    initial = LinkState(IDENTITY, ProjectiveTangent.from_tangent(x))
    links = tuple(
        LinkParam(float(t), j) for t, j in zip(p[2:], FIVE_LINK_PATTERN)
    )
    return ChainParams(initial, links)


def _hinge(value: float, slack: float) -> float:
    return max(0.0, value - slack)


def _closure_penalty(report: ClosureReport, w: PenaltyWeights) -> float:
    pen = w.closure * (
        _hinge(report.frame_residual, FEASIBLE_TOL) ** 2
        + _hinge(report.tangent_residual, FEASIBLE_TOL) ** 2
    )
    pen += w.angle * _hinge(-report.angle_margin, ANGLE_TOL) ** 2
    return pen


def _evaluate_five_link(
    params, weights: PenaltyWeights
) -> tuple[float, float, ClosureReport | None]:
    try:
        chain = decode_five_link(params)
    except GeometryError:
        return 1.0, weights.feasibility * FAIL_PENALTY_SCALE, None
    try:
        assembled = assemble(chain)
    except GeometryError as exc:
        done = _links_assembled(exc)
        return 1.0, weights.feasibility * (1.0 + len(chain.links) - done), None
    report = closure_of(chain, assembled)
    density = 2.0 * assembled.area() / SQRT12
    return density, _closure_penalty(report, weights), report


def five_link_objective(
    params, weights: PenaltyWeights = PenaltyWeights()
) -> tuple[float, float]:
    """Density plus quadratic penalty; zero penalty exactly on feasible chains."""
    density, penalty, _ = _evaluate_five_link(params, weights)
    return density, penalty


def _links_assembled(exc: GeometryError) -> int:
    # assemble() prefixes failures with "link <i>: ", giving a usable slope
    text = str(exc)
    if text.startswith("link "):
        head = text[5:].split(":", 1)[0]
        if head.isdigit():
            return int(head)
    return 0


def octagon_embedding() -> np.ndarray:
    """The smoothed octagon as a seven-vector of the five-link search space."""
    dom = smoothed_octagon()
    unit = ProjectiveTangent.from_tangent(circle_tangent(dom.chain.initial))
    a, b, _ = unit.components()
    tau = dom.chain.links[0].tau
    return np.array([a, b, tau, tau, tau, 0.0, tau])


def _five_link_residuals(params) -> np.ndarray:
    """Closure equations as a residual vector for the feasibility polish."""
    try:
        chain = decode_five_link(params)
        assembled = assemble(chain)
    except GeometryError:
        return np.full(7, 1.0e3)
    start, end = chain.initial, assembled.final
    frame_diff = np.array(end.frame.entries()) - np.array(
        start.frame.compose(ROT60).entries()
    )
    tangent_diff = np.array(end.tangent.components()) - np.array(
        start.tangent.components()
    )
    return np.concatenate([frame_diff, tangent_diff])


def _manifold_descent(x0, lo, hi, measure, snap, iters=25,
                      fd_step=1e-7) -> np.ndarray:
    """Projected-gradient density descent along the closure manifold.

    Nelder-Mead stalls once the simplex straddles the constraint set, so the
    final approach re-snaps feasibility after every step and moves only in
    the numerical null space of the closure Jacobian.  Steps are accepted
    only when the snapped point stays feasible and lowers the density, which
    also keeps reported densities on the honest side of the dead band.
    """
    x = snap(np.asarray(x0, dtype=float))
    density, penalty, report = measure(x)
    if report is None or not report.closed(STRICT_TOL):
        return x
    n = len(x)
    for _ in range(iters):
        jac = np.empty((7, n))
        grad = np.empty(n)
        base = _five_link_residuals(x)
        for k in range(n):
            sign = 1.0 if x[k] + fd_step <= hi[k] else -1.0
            step = np.zeros(n)
            step[k] = sign * fd_step
            jac[:, k] = (_five_link_residuals(x + step) - base) / (sign * fd_step)
            grad[k] = (measure(x + step)[0] - density) / (sign * fd_step)
        _, sing, vt = np.linalg.svd(jac)
        null = vt[sing < 1e-4 * sing[0]] if sing[0] > 0.0 else vt
        if len(null) == 0:
            null = vt[-2:]
        direction = null.T @ (null @ grad)
        norm = np.linalg.norm(direction)
        if norm < 1e-14:
            break
        direction /= norm
        scale = 1e-2
        moved = False
        while scale > 1e-12:
            cand = snap(np.clip(x - scale * direction, lo, hi))
            cd, cp, crep = measure(cand)
            if (cp == 0.0 and crep is not None
                    and crep.closed(STRICT_TOL) and cd < density):
                x, density = cand, cd
                moved = True
                break
            scale /= 4.0
        if not moved:
            break
    return x


class _Incumbent:
    """Best point so far: strictly closed beats everything, then lower density.

    Feasibility demands closure at the strict tier, not merely a vanishing
    penalty: the penalty's dead band (residuals up to the feasibility
    tolerance) admits chains that fail to close by enough to shift density
    at the same order, and those must not be reported as feasible optima.
    """

    def __init__(self, trace_on: bool) -> None:
        self.params: np.ndarray | None = None
        self.density = math.inf
        self.penalty = math.inf
        self.feasible = False
        self.trace: list[tuple[int, float]] | None = [] if trace_on else None

    def offer(self, params: np.ndarray, density: float, penalty: float,
              report: ClosureReport | None, evals: int) -> None:
        feasible = report is not None and report.closed(STRICT_TOL)
        if self.params is None:
            better = True
        elif feasible != self.feasible:
            better = feasible
        elif feasible:
            better = density < self.density
        else:
            better = density + penalty < self.density + self.penalty
        if better:
            self.params = np.array(params, dtype=float)
            self.density, self.penalty, self.feasible = density, penalty, feasible
            if self.trace is not None and feasible:
                self.trace.append((evals, density))


def five_link_search(spec: SearchSpec) -> SearchResult:
    """Multi-start penalized Nelder-Mead with a least-squares polish."""
    rng = np.random.default_rng(spec.seed)
    weights = spec.penalty_weights
    lo = np.array([b[0] for b in spec.bounds])
    hi = np.array([b[1] for b in spec.bounds])
    evals = 0

    def measure(p) -> tuple[float, float, ClosureReport | None]:
        nonlocal evals
        evals += 1
        return _evaluate_five_link(p, weights)

    def objective(p) -> float:
        density, penalty, _ = measure(p)
        return density + penalty

    incumbent = _Incumbent(spec.trace)

    def offer(p) -> None:
        density, penalty, report = measure(p)
        incumbent.offer(p, density, penalty, report, evals)

    starts = []
    if spec.start is not None:
        starts.append(np.asarray(spec.start, dtype=float))
    while len(starts) < spec.restarts:
        starts.append(lo + (hi - lo) * rng.uniform(size=len(lo)))

    def snap(p) -> np.ndarray:
        return least_squares(
            _five_link_residuals, np.clip(p, lo, hi),
            bounds=(lo, hi), max_nfev=200,
        ).x

    if spec.max_evals == 0:
        offer(starts[0])
    else:
        budget = max(50, spec.max_evals // len(starts))
        for p0 in starts:
            offer(p0)
            # pull the start onto the closure manifold first: cold starts
            # otherwise leave Nelder-Mead on the assembly-failure plateau
            snapped = snap(p0)
            offer(snapped)
            if objective(snapped) < objective(p0):
                p0 = snapped
            res = minimize(
                objective, p0, method="Nelder-Mead", bounds=spec.bounds,
                options={"maxfev": budget, "xatol": 1e-9, "fatol": 1e-12,
                         "adaptive": True},
            )
            offer(np.clip(res.x, lo, hi))
            polished = snap(res.x)
            offer(polished)
            offer(_manifold_descent(polished, lo, hi, measure, snap))

    best = incumbent.params
    try:
        chain = decode_five_link(best)
        closure = closure_of(chain, assemble(chain))
    except GeometryError:
        closure = _NO_CLOSURE
    return SearchResult(
        tuple(float(v) for v in best),
        incumbent.density,
        closure,
        incumbent.feasible,
        evals,
        tuple(incumbent.trace) if incumbent.trace is not None else None,
    )


def _consecutive_distinct_patterns() -> list[tuple[int, ...]]:
    patterns = [(j,) for j in (0, 2, 4)]
    for _ in range(4):
        patterns = [p + (j,) for p in patterns for j in (0, 2, 4) if j != p[-1]]
    return patterns


def _cleaned_links(chain: ChainParams) -> list[LinkParam]:
    """Drop degenerate links and merge same-index neighbours."""
    stack: list[LinkParam] = []
    for tau, j in chain.links:
        if tau == 0.0:
            continue
        if stack and stack[-1].j == j:
            merged = stack[-1].tau + tau - stack[-1].tau * tau
            stack[-1] = LinkParam(merged, j)
        else:
            stack.append(LinkParam(tau, j))
    return stack


@dataclass(frozen=True)
class LinkReductionReport:
    six_area: float
    five_area: float
    five_links: tuple[LinkParam, ...]
    endpoint_residual: float
    feasible: bool
    improved: bool
    eval_count: int


def link_reduction_experiment(six_link: ChainParams,
                              spec: SearchSpec) -> LinkReductionReport:
    """Search five-link chains joining the endpoint states of a six-link one.

    Hyperbolic indices are enumerated over all consecutive-distinct patterns
    while the five turning fractions are optimized per pattern; the cleaned
    input links seed their own pattern, so degenerate six-link chains are
    refit exactly.
    """
    if len(six_link.links) != 6:
        raise InfeasibleInput(f"expected six links, got {len(six_link.links)}")
    try:
        assembled = assemble(six_link)
    except GeometryError as exc:
        raise InfeasibleInput(f"six-link segment does not assemble: {exc}")
    margin = angle_margin_of(six_link, assembled)
    if margin < -ANGLE_TOL:
        raise InfeasibleInput(
            f"six-link segment violates the angle condition by {-margin:.3e}"
        )

    target = assembled.final
    start_state = six_link.initial
    six_area = assembled.area()
    weights = spec.penalty_weights
    rng = np.random.default_rng(spec.seed)
    lo = np.zeros(5)
    hi = np.full(5, TAU_HI)
    evals = 0

    def build(pattern, taus) -> ChainParams:
        links = tuple(LinkParam(float(t), j) for t, j in zip(taus, pattern))
        return ChainParams(start_state, links)

    def residuals(pattern, taus) -> np.ndarray:
        try:
            fitted = assemble(build(pattern, taus))
        except GeometryError:
            return np.full(7, 1.0e3)
        frame_diff = np.array(fitted.final.frame.entries()) - np.array(
            target.frame.entries()
        )
        tangent_diff = np.array(fitted.final.tangent.components()) - np.array(
            target.tangent.components()
        )
        return np.concatenate([frame_diff, tangent_diff])

    def measure(pattern, taus) -> tuple[float, float, AssembledChain | None]:
        nonlocal evals
        evals += 1
        try:
            chain = build(pattern, taus)
            fitted = assemble(chain)
        except GeometryError as exc:
            done = _links_assembled(exc)
            return math.inf, weights.feasibility * (6.0 - done), None
        frame_res = frame_distance(fitted.final.frame, target.frame)
        tangent_res = fitted.final.tangent.distance(target.tangent)
        pen = weights.closure * (
            _hinge(frame_res, FEASIBLE_TOL) ** 2
            + _hinge(tangent_res, FEASIBLE_TOL) ** 2
        )
        pen += weights.angle * _hinge(
            -angle_margin_of(chain, fitted), ANGLE_TOL
        ) ** 2
        return fitted.area(), pen, fitted

    best_area = math.inf
    best_links: tuple[LinkParam, ...] = ()
    best_residual = math.inf
    best_feasible = False
    best_score = math.inf

    def offer(pattern, taus) -> None:
        nonlocal best_area, best_links, best_residual, best_feasible, best_score
        area, pen, fitted = measure(pattern, taus)
        if fitted is None:
            return
        residual = float(np.max(np.abs(residuals(pattern, taus))))
        # strict endpoint matching, for the same reason the five-link
        # search demands strict closure: dead-band fits shift the area
        feas = pen == 0.0 and residual <= STRICT_TOL
        score = area if feas else area + pen
        if best_links and feas == best_feasible:
            better = score < best_score
        elif best_links:
            better = feas
        else:
            better = True
        if better:
            best_area = area
            best_links = tuple(
                LinkParam(float(t), j) for t, j in zip(taus, pattern)
            )
            best_residual = residual
            best_feasible = feas
            best_score = score

    patterns = _consecutive_distinct_patterns()
    seed_links = _cleaned_links(six_link)
    seed_taus = None
    seed_pattern = None
    if 1 <= len(seed_links) <= 5:
        taus = [l.tau for l in seed_links] + [0.0] * (5 - len(seed_links))
        js = [l.j for l in seed_links]
        while len(js) < 5:
            js.append((js[-1] + 2) % 6 if js else 0)
        if all(x != y for x, y in zip(js, js[1:])):
            seed_pattern = tuple(js)
            seed_taus = np.array(taus)

    per_pattern = max(60, spec.max_evals // (len(patterns) + 1))
    for pattern in patterns:
        starts = [np.full(5, 0.3)]
        for _ in range(spec.restarts - 1):
            starts.append(rng.uniform(0.05, 0.9, size=5))
        if pattern == seed_pattern:
            starts.insert(0, seed_taus)
        for t0 in starts:
            def objective(taus):
                area, pen, _ = measure(pattern, taus)
                return (0.0 if math.isinf(area) else area) + pen

            res = minimize(
                objective, t0, method="Nelder-Mead",
                bounds=[(0.0, TAU_HI)] * 5,
                options={"maxfev": per_pattern, "xatol": 1e-10,
                         "fatol": 1e-12, "adaptive": True},
            )
            offer(pattern, np.clip(res.x, lo, hi))
            polish = least_squares(
                lambda t: residuals(pattern, t), np.clip(res.x, lo, hi),
                bounds=(lo, hi), max_nfev=120,
            )
            offer(pattern, polish.x)

    improved = best_feasible and best_area < six_area - IMPROVEMENT_MARGIN
    return LinkReductionReport(
        six_area, best_area, best_links, best_residual,
        best_feasible, improved, evals,
    )


def spec_to_dict(spec: SearchSpec) -> dict:
    return {
        "variable_count": spec.variable_count,
        "bounds": [list(b) for b in spec.bounds],
        "penalty_weights": {
            "closure": spec.penalty_weights.closure,
            "angle": spec.penalty_weights.angle,
            "feasibility": spec.penalty_weights.feasibility,
        },
        "restarts": spec.restarts,
        "max_evals": spec.max_evals,
        "seed": spec.seed,
        "start": None if spec.start is None else list(spec.start),
    }


def result_to_dict(result: SearchResult) -> dict:
    return {
        "best_params": list(result.best_params),
        "best_density": result.best_density,
        "feasible": result.feasible,
        "eval_count": result.eval_count,
        "closure": {
            "frame_residual": result.closure.frame_residual,
            "tangent_residual": result.closure.tangent_residual,
            "angle_ok": result.closure.angle_ok,
            "angle_margin": result.closure.angle_margin,
        },
        "trace": None if result.trace is None else [list(t) for t in result.trace],
    }
