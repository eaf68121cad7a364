"""Alternating linear minimizations between two compact convex sets.

The solver minimizes f(x, y) = ||x - y||^2 over P x Q touching the sets
only through linear minimization.  One iteration makes two LMO calls,
the second against the already-updated x:

    u <- argmin_{x' in P} <x - y, x'>;   x <- x + gamma_1 (u - x)
    v <- argmin_{y' in Q} <y - x, y'>;   y <- y + gamma_2 (v - y)

Step rules: agnostic gamma = 2/(t+2), or the short step
gamma_1 = min{<x - y, x - u> / ||x - u||^2, 1} (and symmetrically for
gamma_2), clamped to [0, 1].

With RATE_CONSTANT = 1 + 2*sqrt(2), the midpoints z_t = (x_t + y_t)/2
satisfy, under the agnostic rule,

    max{dist(z_t, P)^2, dist(z_t, Q)^2}
        <= ||x_t - y_t||^2 / 4
        <= RATE_CONSTANT * (D_P^2 + D_Q^2) / (t + 2) + dist(P, Q)^2 / 4,

and the running minimum over 1 <= t <= T of the dual quantity
||x_t - y_t||^2 - min_{x in P, y in Q} <x_t - y_t, x - y> is at most
6.75 * RATE_CONSTANT * (D_P^2 + D_Q^2) / (T + 2).  Those inequalities
power two disjointness certificates:

* parameterized: ||x_t - y_t||^2 exceeding the rule's threshold at
  iteration t is impossible when the sets intersect, so exceeding it
  proves P and Q disjoint (requires diameter bounds);
* parameter-free: a direction g = x_t - y_t with
  min_{x in P, y in Q} <g, x - y> > 0 separates the sets strictly; the
  margin is checkable with two LMO calls and needs no constants.

The adaptive variant interleaves those checks at iterations t = 2^k and
additionally tries to recover an exact intersection point by solving
the hull-intersection feasibility program over all vertices the LMOs
have returned so far; one LP solve is charged as one LMO call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cbcg import ConvexCombination, IterateTrace, NumericsError, StepRule, TraceRow
from .feasibility import FeasibilityProgram, solve_feasibility
from .oracles import (
    DEDUP_TOL,
    Array,
    DimensionMismatch,
    GeometryError,
    OracleSet,
    as_vector,
    support_gap,
    supports_projection,
)

RATE_CONSTANT = 1.0 + 2.0 * math.sqrt(2.0)

# Iterates closer than this are numerically in contact: the LMO
# direction is zero and further steps carry no information.
CONTACT_TOL = 1e-12

SHORT_STEP_GUARD = 1e-14


@dataclass
class AlmState:
    """Solver state after ``t`` completed iterations.

    ``seen_p``/``seen_q`` hold the start point plus every LMO output,
    deduplicated; the current iterates are convex combinations of them.
    ``lmo_calls`` counts every oracle call charged to the run, including
    the two initialization calls when no start was supplied.
    """

    set_p: OracleSet
    set_q: OracleSet
    x: Array
    y: Array
    t: int
    seen_p: list[Array]
    seen_q: list[Array]
    lmo_calls: int
    comb_x: ConvexCombination
    comb_y: ConvexCombination


@dataclass
class AlmResult:
    trace: IterateTrace
    state: AlmState
    distance_sq: list[float]
    margin: list[float] | None
    midpoint_gap: list[float] | None
    contact: bool

    @property
    def dual(self) -> list[float] | None:
        """Dual quantity ||x_t - y_t||^2 - min <x_t - y_t, x - y> per iterate."""
        if self.margin is None:
            return None
        return [d - m for d, m in zip(self.distance_sq, self.margin)]


@dataclass(frozen=True)
class IntersectionPoint:
    """A common point, witnessed as convex combinations on both sides."""

    point: Array
    weights_p: Array
    support_p: list[Array]
    weights_q: Array
    support_q: list[Array]
    lmo_calls: int
    iterations: int

    verdict = "intersection"


@dataclass(frozen=True)
class Disjoint:
    """A separating direction with strictly positive margin."""

    direction: Array
    margin: float
    lmo_calls: int
    iterations: int

    verdict = "disjoint"


@dataclass(frozen=True)
class Undecided:
    best_distance: float
    lmo_calls: int
    iterations: int

    verdict = "undecided"


Certificate = Union[IntersectionPoint, Disjoint, Undecided]


def default_start(set_p: OracleSet, set_q: OracleSet) -> tuple[Array, Array]:
    """Deterministic feasible starts: LMO along the all-ones direction."""
    ones = np.ones(set_p.dim)
    return set_p.lmo(ones), set_q.lmo(-ones)


def _add_seen(seen: list[Array], vertex: Array) -> bool:
    for s in seen:
        if float(np.linalg.norm(vertex - s)) <= DEDUP_TOL:
            return False
    seen.append(np.array(vertex, dtype=float))
    return True


def _gamma(rule: StepRule, t: int, num: float, den: float) -> float:
    if rule is StepRule.AGNOSTIC:
        return 2.0 / (t + 2)
    if math.sqrt(den) < SHORT_STEP_GUARD:
        return 0.0
    return min(max(num / den, 0.0), 1.0)


def _validate_pair(set_p: OracleSet, set_q: OracleSet) -> None:
    if set_p.dim != set_q.dim:
        raise DimensionMismatch(
            f"sets live in dimensions {set_p.dim} and {set_q.dim}"
        )


def _init(set_p, set_q, start):
    if start is None:
        x, y = default_start(set_p, set_q)
        return x, y, 2
    x = as_vector(start[0], set_p.dim, "start x").copy()
    y = as_vector(start[1], set_q.dim, "start y").copy()
    if not set_p.contains(x, tol=1e-8):
        raise GeometryError("start x is not in the first set")
    if not set_q.contains(y, tol=1e-8):
        raise GeometryError("start y is not in the second set")
    return x, y, 0


def alm_run(
    set_p: OracleSet,
    set_q: OracleSet,
    rule: StepRule,
    max_iters: int,
    start: tuple[Array, Array] | None = None,
    *,
    record_margin: bool = True,
    record_midpoint: bool = True,
    keep_points: bool = False,
    stop_on_contact: bool = True,
) -> AlmResult:
    """Run the alternating solver for up to ``max_iters`` iterations.

    Records ||x_t - y_t||^2 for every iterate, the separation margin
    (hence the dual quantity) when ``record_margin`` is set, and
    midpoint distances when both sets support projection.  The margin
    and midpoint probes are instrumentation and are not charged to the
    LMO counters.  The trace rows mirror the generic cyclic engine on
    the two-block distance objective, row for row.
    """
    _validate_pair(set_p, set_q)
    if max_iters < 1:
        raise GeometryError("max_iters must be >= 1")
    x, y, init_calls = _init(set_p, set_q, start)

    trace = IterateTrace(rule=rule, k=2)
    comb_x = ConvexCombination(x)
    comb_y = ConvexCombination(y)
    trace.combinations = [comb_x, comb_y]
    if keep_points:
        trace.points = [[x.copy(), y.copy()]]
    seen_p: list[Array] = [x.copy()]
    seen_q: list[Array] = [y.copy()]

    both_project = supports_projection(set_p) and supports_projection(set_q)
    distance_sq: list[float] = []
    margin: list[float] | None = [] if record_margin else None
    midpoint: list[float] | None = [] if both_project and record_midpoint else None

    def observe(d: Array, dsq: float) -> None:
        distance_sq.append(dsq)
        if margin is not None:
            margin.append(support_gap(set_p, set_q, d))
        if midpoint is not None:
            z = 0.5 * (x + y)
            midpoint.append(
                max(
                    float(np.linalg.norm(z - set_p.project(z))),
                    float(np.linalg.norm(z - set_q.project(z))),
                )
            )

    engine_calls = 0
    contact = False
    for t in range(max_iters):
        d = x - y
        dsq = float(np.dot(d, d))
        if not math.isfinite(dsq):
            raise NumericsError(f"non-finite iterate distance at iteration {t}")
        observe(d, dsq)
        if stop_on_contact and math.sqrt(dsq) <= CONTACT_TOL:
            contact = True
            break

        u = set_p.lmo(d)
        engine_calls += 1
        _add_seen(seen_p, u)
        diff = x - u
        num = float(np.dot(d, diff))
        gamma1 = _gamma(rule, t, num, float(np.dot(diff, diff)))
        trace.rows.append(TraceRow(2 * t, 0, dsq, 2.0 * num, gamma1, engine_calls))
        x = x + gamma1 * (u - x)
        comb_x.step(u, gamma1)

        d2 = y - x
        v = set_q.lmo(d2)
        engine_calls += 1
        _add_seen(seen_q, v)
        diff2 = y - v
        num2 = float(np.dot(d2, diff2))
        gamma2 = _gamma(rule, t, num2, float(np.dot(diff2, diff2)))
        trace.rows.append(
            TraceRow(2 * t + 1, 1, float(np.dot(d2, d2)), 2.0 * num2, gamma2, engine_calls)
        )
        y = y + gamma2 * (v - y)
        comb_y.step(v, gamma2)
        if keep_points:
            trace.points.append([x.copy(), y.copy()])

    if not contact:
        d = x - y
        observe(d, float(np.dot(d, d)))

    trace.final_points = [x, y]
    trace.final_objective = distance_sq[-1]
    state = AlmState(
        set_p=set_p,
        set_q=set_q,
        x=x,
        y=y,
        t=len(distance_sq) - 1,
        seen_p=seen_p,
        seen_q=seen_q,
        lmo_calls=init_calls + engine_calls,
        comb_x=comb_x,
        comb_y=comb_y,
    )
    return AlmResult(trace, state, distance_sq, margin, midpoint, contact)


def dual_quantity(state: AlmState) -> float:
    """||x - y||^2 - min_{x' in P, y' in Q} <x - y, x' - y'>; two LMO calls.

    Always nonnegative, and an upper bound on ||x - y||^2 - dist(P, Q)^2.
    """
    d = state.x - state.y
    return float(np.dot(d, d)) - support_gap(state.set_p, state.set_q, d)


def disjointness_threshold(t: int, d_p: float, d_q: float, rule: StepRule) -> float:
    """Largest ||x_t - y_t||^2 consistent with intersecting sets at iteration t."""
    if not (d_p > 0.0 and d_q > 0.0):
        raise GeometryError("diameters must be positive")
    if rule is StepRule.AGNOSTIC:
        return 4.0 * RATE_CONSTANT * (d_p ** 2 + d_q ** 2) / (t + 2)
    return 16.0 / (t + 4) * ((d_p + d_q) * max(d_p, d_q) + 2.0 * (d_p ** 2 + d_q ** 2))


def threshold_exceeded(dist_sq: float, t: int, d_p: float, d_q: float, rule: StepRule) -> bool:
    """Strict comparison against the rule's threshold; equality does not certify."""
    return dist_sq > disjointness_threshold(t, d_p, d_q, rule)


def certify_disjoint_parameterized(
    state: AlmState, d_p: float, d_q: float, rule: StepRule
) -> bool:
    """True only if the iterate gap provably exceeds any intersecting run.

    Sound: a True answer implies P and Q are disjoint, provided d_p and
    d_q upper-bound the true diameters and ``rule`` matches the run.
    """
    d = state.x - state.y
    return threshold_exceeded(float(np.dot(d, d)), state.t, d_p, d_q, rule)


def certificate_tolerance(gap_norm: float, d_p: float, d_q: float) -> float:
    """Scale-aware guard for strict positivity of the separation margin."""
    return 1e-10 * (1.0 + gap_norm * (d_p + d_q))


def certify_disjoint_free(state: AlmState) -> Disjoint | None:
    """Parameter-free certificate from the current direction x - y.

    Computes m = min_{x in P, y in Q} <x_t - y_t, x - y> with two LMO
    calls; m > 0 (beyond rounding noise) proves the sets disjoint.
    """
    g = state.x - state.y
    m = support_gap(state.set_p, state.set_q, g)
    guard = certificate_tolerance(
        float(np.linalg.norm(g)), state.set_p.diameter(), state.set_q.diameter()
    )
    if m > guard:
        return Disjoint(g.copy(), m, state.lmo_calls, state.t)
    return None


def _contact_certificate(comb_x, comb_y, x, calls, t) -> IntersectionPoint:
    return IntersectionPoint(
        point=x.copy(),
        weights_p=np.array(comb_x.weights),
        support_p=[s.copy() for s in comb_x.support],
        weights_q=np.array(comb_y.weights),
        support_q=[s.copy() for s in comb_y.support],
        lmo_calls=calls,
        iterations=t,
    )


def adaptive_run(
    set_p: OracleSet,
    set_q: OracleSet,
    rule: StepRule,
    max_iters: int,
    start: tuple[Array, Array] | None = None,
) -> tuple[Certificate, IterateTrace, AlmState]:
    """Adaptive solver: alternate, and at t = 2^k test both certificates.

    At each checkpoint the separation margin is probed first (two LMO
    calls, one of which is reused as the next iteration's first call);
    if it does not certify disjointness and the seen vertex sets have
    grown, the hull-intersection LP over all seen vertices is solved
    (charged as one LMO call).  A feasible LP yields an exact common
    point.  Runs on any geometry; the LP route is exact for polytopes.
    """
    _validate_pair(set_p, set_q)
    if max_iters < 1:
        raise GeometryError("max_iters must be >= 1")
    x, y, calls = _init(set_p, set_q, start)
    d_p = set_p.diameter()
    d_q = set_q.diameter()

    trace = IterateTrace(rule=rule, k=2)
    comb_x = ConvexCombination(x)
    comb_y = ConvexCombination(y)
    trace.combinations = [comb_x, comb_y]
    seen_p: list[Array] = [x.copy()]
    seen_q: list[Array] = [y.copy()]
    state = AlmState(set_p, set_q, x, y, 0, seen_p, seen_q, calls, comb_x, comb_y)

    cache_dir: Array | None = None
    cache_u: Array | None = None
    lp_support_size = -1
    best_distance = math.inf
    certificate: Certificate | None = None

    for t in range(max_iters):
        d = x - y
        dist = float(np.linalg.norm(d))
        best_distance = min(best_distance, dist)
        if dist <= CONTACT_TOL:
            certificate = _contact_certificate(comb_x, comb_y, x, calls, t)
            break

        if cache_dir is not None and np.array_equal(d, cache_dir):
            u = cache_u
        else:
            u = set_p.lmo(d)
            calls += 1
        cache_dir = None
        cache_u = None
        _add_seen(seen_p, u)
        diff = x - u
        num = float(np.dot(d, diff))
        gamma1 = _gamma(rule, t, num, float(np.dot(diff, diff)))
        trace.rows.append(TraceRow(2 * t, 0, dist * dist, 2.0 * num, gamma1, calls))
        x = x + gamma1 * (u - x)
        comb_x.step(u, gamma1)

        d2 = y - x
        v = set_q.lmo(d2)
        calls += 1
        _add_seen(seen_q, v)
        diff2 = y - v
        num2 = float(np.dot(d2, diff2))
        gamma2 = _gamma(rule, t, num2, float(np.dot(diff2, diff2)))
        trace.rows.append(
            TraceRow(2 * t + 1, 1, float(np.dot(d2, d2)), 2.0 * num2, gamma2, calls)
        )
        y = y + gamma2 * (v - y)
        comb_y.step(v, gamma2)

        if t >= 1 and t & (t - 1) == 0:
            g = x - y
            a = set_p.lmo(g)
            b = set_q.lmo(-g)
            calls += 2
            _add_seen(seen_p, a)
            _add_seen(seen_q, b)
            # The next iteration's first LMO uses this same direction.
            cache_dir = g
            cache_u = a
            margin = float(np.dot(g, a) - np.dot(g, b))
            if margin > certificate_tolerance(float(np.linalg.norm(g)), d_p, d_q):
                certificate = Disjoint(g.copy(), margin, calls, t + 1)
                break
            if len(seen_p) + len(seen_q) != lp_support_size:
                lp_support_size = len(seen_p) + len(seen_q)
                calls += 1
                combo = solve_feasibility(
                    FeasibilityProgram(np.array(seen_p), np.array(seen_q))
                )
                if combo is not None:
                    certificate = IntersectionPoint(
                        point=combo.point,
                        weights_p=combo.lam,
                        support_p=[s.copy() for s in seen_p],
                        weights_q=combo.kappa,
                        support_q=[s.copy() for s in seen_q],
                        lmo_calls=calls,
                        iterations=t + 1,
                    )
                    break

    state.x, state.y = x, y
    state.t = len(trace.rows) // 2
    state.lmo_calls = calls
    trace.final_points = [x, y]
    d = x - y
    trace.final_objective = float(np.dot(d, d))
    best_distance = min(best_distance, float(np.linalg.norm(d)))
    if certificate is None:
        certificate = Undecided(best_distance, calls, max_iters)
    return certificate, trace, state


def alm_adaptive(
    set_p: OracleSet,
    set_q: OracleSet,
    rule: StepRule,
    max_iters: int,
    start: tuple[Array, Array] | None = None,
) -> Certificate:
    """Certificate-only interface to the adaptive solver."""
    return adaptive_run(set_p, set_q, rule, max_iters, start)[0]
