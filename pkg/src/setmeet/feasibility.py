"""Linear feasibility over convex hulls given by point lists.

The central question: do conv(U) and conv(V) share a point?  Writing a
candidate as a convex combination on each side gives the linear program

    sum_u lam_u * u = sum_v kap_v * v,
    sum_u lam_u = 1,  sum_v kap_v = 1,  lam >= 0,  kap >= 0,

solved here by a dense phase-1 simplex method with Bland's anti-cycling
rule.  ``hull_distance`` complements the yes/no answer with the actual
distance between the hulls, via projected gradient descent on the
product of weight simplices plus an active-set polish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracles import DEDUP_TOL, Array, DimensionMismatch, GeometryError, VPolytope

# Phase-1 objective at or below this value counts as feasible.
FEASIBLE_TOL = 1e-9


def _points_matrix(points, name: str) -> Array:
    a = np.asarray(points, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2 or a.shape[0] == 0:
        raise GeometryError(f"{name} must be a nonempty list of points")
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"{name} contains non-finite entries")
    return a


def _dedup(points: Array) -> Array:
    kept: list[Array] = []
    for row in points:
        if all(float(np.linalg.norm(row - u)) > DEDUP_TOL for u in kept):
            kept.append(row)
    return np.array(kept, dtype=float)


@dataclass(frozen=True)
class FeasibilityProgram:
    """Candidate vertex lists for the two hulls, deduplicated."""

    u_points: Array
    v_points: Array

    def __post_init__(self):
        u = _dedup(_points_matrix(self.u_points, "u_points"))
        v = _dedup(_points_matrix(self.v_points, "v_points"))
        if u.shape[1] != v.shape[1]:
            raise DimensionMismatch(
                f"point lists have dimensions {u.shape[1]} and {v.shape[1]}"
            )
        object.__setattr__(self, "u_points", u)
        object.__setattr__(self, "v_points", v)

    @property
    def dimension(self) -> int:
        return self.u_points.shape[1]


@dataclass(frozen=True)
class FeasibleCombination:
    """Weights on each hull whose combinations meet at ``point``."""

    lam: Array
    kappa: Array
    point: Array
    residual: float


def phase_one_simplex(a_eq: Array, b_eq: Array, *, max_pivots: int = 100_000):
    """Minimize the artificial-variable sum for A z = b, z >= 0.

    Returns (objective, z).  The system is feasible iff the objective is
    (numerically) zero, in which case z is a feasible basic solution.
    Entering columns follow Bland's rule (lowest index with negative
    reduced cost) and ratio-test ties leave the lowest basic index, so
    the method cannot cycle.
    """
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    neg = b < 0.0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # Tableau columns: structural | artificial | rhs. Objective row holds
    # reduced costs; its rhs entry holds minus the current objective.
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, :n] = -a.sum(axis=0)
    t[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):
            if t[m, j] < -1e-10:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_ratio = math.inf
        for i in range(m):
            coef = t[i, enter]
            if coef > 1e-10:
                ratio = t[i, -1] / coef
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise RuntimeError("phase-1 simplex detected an unbounded ray")
        pivot = t[leave, enter]
        t[leave, :] /= pivot
        for r in range(m + 1):
            if r != leave and t[r, enter] != 0.0:
                t[r, :] -= t[r, enter] * t[leave, :]
        basis[leave] = enter
    else:
        raise RuntimeError("phase-1 simplex exceeded the pivot limit")

    z = np.zeros(n + m)
    for i, bi in enumerate(basis):
        z[bi] = t[i, -1]
    return float(-t[m, -1]), z[:n]


def solve_feasibility(prog: FeasibilityProgram) -> FeasibleCombination | None:
    """Weights meeting the hull-intersection program, or None if infeasible."""
    u, v = prog.u_points, prog.v_points
    ku, kv = u.shape[0], v.shape[0]
    n = prog.dimension

    a = np.zeros((n + 2, ku + kv))
    a[:n, :ku] = u.T
    a[:n, ku:] = -v.T
    a[n, :ku] = 1.0
    a[n + 1, ku:] = 1.0
    b = np.zeros(n + 2)
    b[n] = 1.0
    b[n + 1] = 1.0

    # Unit row norms keep the phase-1 tolerance uniform across scales.
    for i in range(n + 2):
        norm = float(np.linalg.norm(a[i]))
        if norm > 1e-12:
            a[i] /= norm
            b[i] /= norm

    objective, z = phase_one_simplex(a, b)
    if objective > FEASIBLE_TOL:
        return None
    lam, kappa = z[:ku], z[ku:]
    point_u = u.T @ lam
    point_v = v.T @ kappa
    residual = float(np.linalg.norm(point_u - point_v))
    residual = max(residual, abs(float(lam.sum()) - 1.0), abs(float(kappa.sum()) - 1.0))
    if residual > 1e-8:
        raise RuntimeError(f"feasible basis with residual {residual:.3e}")
    return FeasibleCombination(lam, kappa, 0.5 * (point_u + point_v), residual)


def _polish(m_rows: Array, ka: int, w: Array) -> Array | None:
    """Exact equality-QP solve on the active support of w.

    Minimizes ||M^T w||^2 subject to the two unit-sum constraints with
    inactive coordinates pinned at zero.  Coordinates turning negative
    are dropped one at a time.  Returns an improved feasible w or None.
    """
    total = w.size
    active = w > 1e-9
    active[: ka][np.argmax(w[:ka])] = True
    active[ka:][np.argmax(w[ka:])] = True
    for _ in range(total):
        idx = np.nonzero(active)[0]
        p = idx.size
        gram = m_rows[idx] @ m_rows[idx].T
        cons = np.zeros((2, p))
        cons[0, idx < ka] = 1.0
        cons[1, idx >= ka] = 1.0
        kkt = np.zeros((p + 2, p + 2))
        kkt[:p, :p] = gram
        kkt[:p, p:] = cons.T
        kkt[p:, :p] = cons
        rhs = np.zeros(p + 2)
        rhs[p:] = 1.0
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:p]
        if sol.min() >= -1e-12:
            out = np.zeros(total)
            out[idx] = np.maximum(sol, 0.0)
            sa, sb = float(out[:ka].sum()), float(out[ka:].sum())
            if sa <= 0.0 or sb <= 0.0:
                return None
            out[:ka] /= sa
            out[ka:] /= sb
            return out
        worst = idx[int(np.argmin(sol))]
        if active[:ka].sum() <= 1 and worst < ka:
            return None
        if active[ka:].sum() <= 1 and worst >= ka:
            return None
        active[worst] = False
    return None


def _project_rows_to_simplex(w: Array) -> Array:
    """Row-wise Euclidean projection onto the unit simplex."""
    r, k = w.shape
    u = np.sort(w, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    ks = np.arange(1, k + 1)
    cond = u - css / ks > 0.0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(r), rho] / (rho + 1.0)
    return np.maximum(w - tau[:, None], 0.0)


def hull_distance(
    a_points,
    b_points,
    *,
    check_feasibility: bool = True,
    restarts: int = 20,
    max_iters: int = 600,
) -> float:
    """Distance between conv(A) and conv(B) to absolute accuracy ~1e-7.

    Projected gradient descent on the product of weight simplices, run
    from deterministic vertex-indexed restarts in one vectorized batch,
    followed by an active-set polish of the best candidate.  When
    ``check_feasibility`` is set (the default) an LP solve first decides
    intersection, and intersecting hulls return exactly 0.0.
    """
    a = _points_matrix(a_points, "a_points")
    b = _points_matrix(b_points, "b_points")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"point lists have dimensions {a.shape[1]} and {b.shape[1]}"
        )
    if check_feasibility and solve_feasibility(FeasibilityProgram(a, b)) is not None:
        return 0.0
    ka, kb = a.shape[0], b.shape[0]
    if ka == 1 and kb == 1:
        return float(np.linalg.norm(a[0] - b[0]))

    m_rows = np.vstack([a, -b])  # difference point = M^T w
    gram = m_rows @ m_rows.T
    lip = float(np.linalg.eigvalsh(gram).max())
    if lip <= 0.0:
        return float(np.linalg.norm(a[0] - b[0]))
    step = 1.0 / lip

    w = np.zeros((restarts, ka + kb))
    for r in range(restarts):
        w[r, r % ka] = 1.0
        w[r, ka + (r // ka) % kb] = 1.0
    for _ in range(max_iters):
        grad = w @ gram
        new = np.hstack(
            [
                _project_rows_to_simplex(w[:, :ka] - step * grad[:, :ka]),
                _project_rows_to_simplex(w[:, ka:] - step * grad[:, ka:]),
            ]
        )
        move = float(np.abs(new - w).max())
        w = new
        if move <= 1e-13:
            break

    dists = np.linalg.norm(w @ m_rows, axis=1)
    best_row = int(np.argmin(dists))
    best = float(dists[best_row])
    polished = _polish(m_rows, ka, w[best_row])
    if polished is not None:
        best = min(best, float(np.linalg.norm(m_rows.T @ polished)))
    return best


def epsilon_pq(set_p: VPolytope, set_q: VPolytope) -> float:
    """Smallest positive distance among disjoint sub-hull pairs.

    Enumerates every nonempty subset pair of the two vertex lists, keeps
    the pairs whose hulls do not intersect, and returns their minimum
    hull distance.  Below this threshold, hulls of seen vertices are
    guaranteed to intersect.  Returns +inf when no disjoint pair exists.
    Exponential in the vertex counts; guarded to 16 vertices total.
    """
    u = set_p.vertices
    v = set_q.vertices
    if u.shape[0] + v.shape[0] > 16:
        raise GeometryError("epsilon_pq enumeration limited to 16 vertices total")
    best = math.inf
    for mu in range(1, 1 << u.shape[0]):
        sub_u = u[[i for i in range(u.shape[0]) if mu >> i & 1]]
        for mv in range(1, 1 << v.shape[0]):
            sub_v = v[[j for j in range(v.shape[0]) if mv >> j & 1]]
            d = hull_distance(sub_u, sub_v)
            if d > 0.0:
                best = min(best, d)
    return best


def membership(point, vertices) -> bool:
    """Whether ``point`` lies in the convex hull of ``vertices``."""
    p = _points_matrix(point, "point")
    return solve_feasibility(FeasibilityProgram(vertices, p)) is not None
