"""Independent brute-force oracles and loops used to verify the package.

Everything here deliberately avoids the package's own code paths where
the point is cross-checking: support minima are analytic formulas,
vanilla Frank-Wolfe is a separate loop, gradients come from central
differences.
"""

from __future__ import annotations

import numpy as np

from setmeet import Ball, Box, L1Ball, Simplex, StepRule, VPolytope


def support_min(geom, c):
    """min over the set of <c, x>, by closed form or vertex enumeration."""
    c = np.asarray(c, dtype=float)
    if isinstance(geom, Box):
        return float(np.minimum(c * geom.lower, c * geom.upper).sum())
    if isinstance(geom, Ball):
        return float(np.dot(c, geom.center)) - geom.radius * float(np.linalg.norm(c))
    if isinstance(geom, Simplex):
        return geom.scale * float(c.min())
    if isinstance(geom, L1Ball):
        return float(np.dot(c, geom.center)) - geom.radius * float(np.abs(c).max())
    if isinstance(geom, VPolytope):
        return float((geom.vertices @ c).min())
    raise TypeError(type(geom))


def brute_support_gap(set_p, set_q, g):
    """min over x in P, y in Q of <g, x - y>, without touching the LMOs."""
    return support_min(set_p, g) + support_min(set_q, -g)


def brute_vertex_argmin(vertices, c, rel_tol=1e-12):
    """Lowest index attaining the minimum inner product within tolerance."""
    values = vertices @ c
    m = float(values.min())
    for i, v in enumerate(values):
        if v <= m + rel_tol * abs(m):
            return i
    raise AssertionError("unreachable")


def vanilla_fw(geom, value, grad, start, iters):
    """Plain Frank-Wolfe with the agnostic step; mirrors nothing else."""
    x = np.array(start, dtype=float)
    rows = []
    for t in range(iters):
        g = grad(x)
        v = geom.lmo(g)
        gap = float(np.dot(g, x - v))
        gamma = 2.0 / (t + 2)
        rows.append((t, float(value(x)), gap, gamma))
        x = x + gamma * (v - x)
    return rows, x


def fd_gradient_check(problem, points, h=1e-6, rel=1e-5):
    """Central-difference check of every partial gradient at one point."""
    for i in range(problem.k):
        grad = problem.grad_block(points, i)
        for j in range(points[i].size):
            bumped = [p.copy() for p in points]
            bumped[i][j] += h
            up = problem.value(bumped)
            bumped[i][j] -= 2 * h
            down = problem.value(bumped)
            fd = (up - down) / (2 * h)
            assert abs(fd - grad[j]) <= rel * (1.0 + abs(grad[j])), (
                f"block {i} coord {j}: fd {fd} vs grad {grad[j]}"
            )


def agnostic_primal_bound(t, d_p, d_q, distance):
    """||x_t - y_t||^2 / 4 upper bound under the agnostic rule."""
    rate = 1.0 + 2.0 * np.sqrt(2.0)
    return rate * (d_p**2 + d_q**2) / (t + 2) + distance**2 / 4.0


def short_step_primal_bound(t, d_p, d_q, distance):
    """||x_t - y_t||^2 / 4 upper bound under the short-step rule."""
    c = (d_p + d_q + distance) * max(d_p, d_q) + 2.0 * (d_p**2 + d_q**2)
    return 4.0 * c / (t + 4) + distance**2 / 4.0


def primal_bound(rule, t, d_p, d_q, distance):
    if rule is StepRule.AGNOSTIC:
        return agnostic_primal_bound(t, d_p, d_q, distance)
    return short_step_primal_bound(t, d_p, d_q, distance)


def random_feasibility_program(rng):
    """Small random point lists, roughly half disjoint by construction."""
    n = int(rng.integers(1, 5))
    ku = int(rng.integers(1, 7))
    kv = int(rng.integers(1, 7))
    u = rng.uniform(-1.0, 1.0, size=(ku, n))
    v = rng.uniform(-1.0, 1.0, size=(kv, n))
    if rng.uniform() < 0.5:
        v[:, 0] += 2.5  # force separation along the first axis
    return u, v
