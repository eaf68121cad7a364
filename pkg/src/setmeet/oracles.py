"""Compact convex sets accessed through linear minimization.

Every geometry exposes

* ``lmo(c)``      -- a point minimizing <c, x> over the set (a vertex
  whenever the set has vertices),
* ``project(z)``  -- the Euclidean projection, for geometries with a
  closed form (boxes, balls, simplices),
* ``diameter()``  -- the exact Euclidean diameter,
* ``contains(x)`` -- feasibility test at a tolerance,
* ``sample(rng)`` -- a random feasible point, for tests and benchmarks.

Ties in linear minimization are broken deterministically: lowest-index
vertex for vertex lists, lexicographically smallest corner for boxes,
lowest-index signed basis vector for simplices and L1 balls.  A zero
direction is treated as an all-way tie.  Determinism makes iterate
traces byte-for-byte reproducible.

All values are immutable after construction and every operation is a
pure function, so sets can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

Array = np.ndarray

# Vertices whose objective values agree within this relative tolerance
# count as tied and fall through to the deterministic tie-break.
TIE_REL_TOL = 1e-12

# Euclidean tolerance for deduplicating vertex lists; prevents
# degenerate duplicate columns in downstream feasibility programs.
DEDUP_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid geometry parameters or invalid operation input."""


class DimensionMismatch(GeometryError):
    """Operands live in ambient spaces of different dimension."""


class ProjectionUnsupported(GeometryError):
    """The geometry has no closed-form Euclidean projection."""


def as_vector(x, dim: int | None = None, name: str = "vector") -> Array:
    """Coerce to a finite 1-D float array, optionally checking dimension."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise GeometryError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError(f"{name} contains non-finite entries")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"{name} has dimension {v.size}, expected {dim}")
    return v


def _frozen(x, name: str) -> Array:
    v = np.array(as_vector(x, name=name), dtype=float)
    v.setflags(write=False)
    return v


def _tie_argmin(values: Array) -> int:
    """Index of the first value within TIE_REL_TOL (relative) of the minimum.

    A purely relative tolerance keeps the tie set invariant under
    positive rescaling of the objective direction, so c and 2c always
    select the same vertex.
    """
    m = float(values.min())
    tol = TIE_REL_TOL * abs(m)
    return int(np.nonzero(values <= m + tol)[0][0])


def project_to_simplex(z: Array, scale: float = 1.0) -> Array:
    """Euclidean projection onto {x >= 0, sum(x) = scale}.

    Sorting-based threshold method: O(n log n) and exact.
    """
    z = np.asarray(z, dtype=float)
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - scale
    ks = np.arange(1, z.size + 1)
    rho = int(np.nonzero(u - css / ks > 0.0)[0][-1])
    tau = css[rho] / (rho + 1.0)
    return np.maximum(z - tau, 0.0)


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box {lower <= x <= upper} (componentwise)."""

    lower: Array
    upper: Array

    def __post_init__(self):
        lo = _frozen(self.lower, "lower")
        up = _frozen(self.upper, "upper")
        if lo.size != up.size:
            raise DimensionMismatch("Box bounds have different dimensions")
        if np.any(lo > up):
            raise GeometryError("Box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def dim(self) -> int:
        return self.lower.size

    def lmo(self, c) -> Array:
        c = as_vector(c, self.dim, "direction")
        # Zero coordinates tie; the lexicographically smallest corner
        # takes the lower bound there.
        return np.where(c > 0.0, self.lower, np.where(c < 0.0, self.upper, self.lower)).astype(float)

    def project(self, z) -> Array:
        z = as_vector(z, self.dim, "point")
        return np.clip(z, self.lower, self.upper)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim, "point")
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sample(self, rng: np.random.Generator) -> Array:
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball {||x - center|| <= radius}."""

    center: Array
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise GeometryError("Ball radius must be positive and finite")

    @property
    def dim(self) -> int:
        return self.center.size

    def lmo(self, c) -> Array:
        c = as_vector(c, self.dim, "direction")
        norm = float(np.linalg.norm(c))
        if norm == 0.0:
            # All-way tie: lexicographically smallest boundary point.
            v = self.center.copy()
            v[0] -= self.radius
            return v
        return self.center - (self.radius / norm) * c

    def project(self, z) -> Array:
        z = as_vector(z, self.dim, "point")
        delta = z - self.center
        norm = float(np.linalg.norm(delta))
        if norm <= self.radius:
            return z.copy()
        return self.center + (self.radius / norm) * delta

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim, "point")
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def sample(self, rng: np.random.Generator) -> Array:
        direction = rng.normal(size=self.dim)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            return self.center.copy()
        r = self.radius * rng.uniform() ** (1.0 / self.dim)
        return self.center + (r / norm) * direction


@dataclass(frozen=True, eq=False)
class Simplex:
    """Scaled probability simplex {x >= 0, sum(x) = scale}."""

    dimension: int
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "scale", float(self.scale))
        if self.dimension < 1:
            raise GeometryError("Simplex dimension must be >= 1")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise GeometryError("Simplex scale must be positive and finite")

    @property
    def dim(self) -> int:
        return self.dimension

    def lmo(self, c) -> Array:
        c = as_vector(c, self.dim, "direction")
        idx = _tie_argmin(self.scale * c)
        v = np.zeros(self.dim)
        v[idx] = self.scale
        return v

    def project(self, z) -> Array:
        z = as_vector(z, self.dim, "point")
        return project_to_simplex(z, self.scale)

    def diameter(self) -> float:
        # Distance between two distinct vertices scale*e_i, scale*e_j.
        if self.dimension == 1:
            return 0.0
        return self.scale * math.sqrt(2.0)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim, "point")
        return bool(np.all(x >= -tol) and abs(float(x.sum()) - self.scale) <= tol)

    def sample(self, rng: np.random.Generator) -> Array:
        return self.scale * rng.dirichlet(np.ones(self.dim))


@dataclass(frozen=True, eq=False)
class L1Ball:
    """L1-norm ball {||x - center||_1 <= radius}."""

    center: Array
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise GeometryError("L1Ball radius must be positive and finite")

    @property
    def dim(self) -> int:
        return self.center.size

    def lmo(self, c) -> Array:
        c = as_vector(c, self.dim, "direction")
        # Vertices are center +- radius*e_i, enumerated (+e_0, -e_0, +e_1, ...).
        base = float(np.dot(c, self.center))
        values = np.empty(2 * self.dim)
        values[0::2] = base + self.radius * c
        values[1::2] = base - self.radius * c
        idx = _tie_argmin(values)
        v = self.center.copy()
        v[idx // 2] += self.radius if idx % 2 == 0 else -self.radius
        return v

    def project(self, z) -> Array:
        raise ProjectionUnsupported(
            "L1Ball has no closed-form projection here; use the LMO-based solvers"
        )

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim, "point")
        return float(np.abs(x - self.center).sum()) <= self.radius + tol

    def sample(self, rng: np.random.Generator) -> Array:
        weights = rng.dirichlet(np.ones(self.dim))
        signs = rng.choice([-1.0, 1.0], size=self.dim)
        return self.center + self.radius * rng.uniform() * signs * weights


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of an explicit, deduplicated vertex list."""

    vertices: Array

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] == 0:
            raise GeometryError("VPolytope needs a nonempty 2-D vertex array")
        if not np.all(np.isfinite(v)):
            raise GeometryError("VPolytope vertices contain non-finite entries")
        kept: list[Array] = []
        for row in v:
            if all(float(np.linalg.norm(row - u)) > DEDUP_TOL for u in kept):
                kept.append(row)
        arr = np.array(kept, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def lmo(self, c) -> Array:
        c = as_vector(c, self.dim, "direction")
        idx = _tie_argmin(self.vertices @ c)
        return self.vertices[idx].copy()

    def project(self, z) -> Array:
        raise ProjectionUnsupported(
            "VPolytope has no closed-form projection; use the LMO-based solvers"
        )

    def diameter(self) -> float:
        diffs = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((diffs ** 2).sum(axis=2).max()))

    def contains(self, x, tol: float = 1e-7) -> bool:
        x = as_vector(x, self.dim, "point")
        from .feasibility import membership

        return membership(x, self.vertices)

    def sample(self, rng: np.random.Generator) -> Array:
        weights = rng.dirichlet(np.ones(self.vertices.shape[0]))
        return self.vertices.T @ weights


OracleSet = Union[Box, Ball, Simplex, L1Ball, VPolytope]

PROJECTABLE = (Box, Ball, Simplex)


def supports_projection(s: OracleSet) -> bool:
    return isinstance(s, PROJECTABLE)


def support_gap(set_p: OracleSet, set_q: OracleSet, g) -> float:
    """min over x in P, y in Q of <g, x - y>, using exactly two LMO calls.

    A strictly positive value proves the sets are disjoint: the
    hyperplane normal to g separates them with that margin.
    """
    g = as_vector(g, set_p.dim, "direction")
    if set_q.dim != set_p.dim:
        raise DimensionMismatch(
            f"sets live in dimensions {set_p.dim} and {set_q.dim}"
        )
    vp = set_p.lmo(g)
    vq = set_q.lmo(-g)
    return float(np.dot(g, vp) - np.dot(g, vq))
