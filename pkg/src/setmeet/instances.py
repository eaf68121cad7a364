"""Fixed benchmark instances with analytically known constants.

Shared by the `bench` CLI suites and the acceptance tests, so both
always check the same problems.  Distances, optimal values, and closest
points are hand-derived; geometry diameters are exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cbcg import BlockProblem, distance_problem
from .oracles import Ball, Box, L1Ball, OracleSet, Simplex, VPolytope

SQ2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TwoSetInstance:
    name: str
    set_p: OracleSet
    set_q: OracleSet
    distance: float  # dist(P, Q), analytic

    @property
    def intersecting(self) -> bool:
        return self.distance == 0.0


TWO_SET_INSTANCES: list[TwoSetInstance] = [
    TwoSetInstance("box-box-overlap", Box([0, 0], [2, 2]), Box([1, 1], [3, 3]), 0.0),
    TwoSetInstance("box-box-touch", Box([0, 0], [1, 1]), Box([1, 0], [2, 1]), 0.0),
    TwoSetInstance("ball-ball-overlap", Ball([0, 0], 1.0), Ball([1, 0], 1.0), 0.0),
    TwoSetInstance("ball-box-overlap", Ball([0, 0], 1.0), Box([0, -2], [3, 2]), 0.0),
    TwoSetInstance("simplex-box-overlap", Simplex(2, 1.0), Box([0, 0], [1, 1]), 0.0),
    TwoSetInstance(
        "tri-seg-touch",
        VPolytope([[0, 0], [2, 0], [0, 2]]),
        VPolytope([[1, 1], [3, 1]]),
        0.0,
    ),
    TwoSetInstance(
        "tri-tri-overlap",
        VPolytope([[0, 0], [2, 0], [0, 2]]),
        VPolytope([[0.5, 0.5], [2, 2], [-1, 2]]),
        0.0,
    ),
    TwoSetInstance("l1-box-overlap", L1Ball([0, 0], 1.0), Box([0, 0], [2, 2]), 0.0),
    TwoSetInstance("box-box-diagonal", Box([0, 0], [1, 1]), Box([2, 2], [3, 3]), SQ2),
    TwoSetInstance("ball-ball-gap", Ball([0, 0], 1.0), Ball([3, 0], 1.0), 1.0),
    TwoSetInstance("box-ball-gap", Box([0, 0], [1, 1]), Ball([3, 0], 1.0), 1.0),
    TwoSetInstance(
        "seg-seg-gap",
        VPolytope([[0, 0], [0, 1]]),
        VPolytope([[2, 0], [2, 1]]),
        2.0,
    ),
    TwoSetInstance("simplex-box-gap", Simplex(2, 1.0), Box([2, 2], [3, 3]), 1.5 * SQ2),
    TwoSetInstance(
        "tri-ball-gap",
        VPolytope([[0, 0], [1, 0], [0, 1]]),
        Ball([3, 3], 1.0),
        2.5 * SQ2 - 1.0,
    ),
    TwoSetInstance("l1-ball-gap", L1Ball([0, 0], 1.0), Ball([4, 0], 1.0), 2.0),
]


@dataclass(frozen=True)
class PocsInstance:
    name: str
    set_p: OracleSet
    set_q: OracleSet
    y0: tuple[float, ...]
    dist_y0: float  # dist(y0, Q_min), analytic
    d_hat: tuple[float, ...] | None  # offset towards Q between closest points
    q_min_point: tuple[float, ...]  # one point of Q_min, for monotonicity checks

    @property
    def intersecting(self) -> bool:
        return self.d_hat is None


POCS_INSTANCES: list[PocsInstance] = [
    PocsInstance(
        "balls-gap-axis",
        Ball([0, 0], 1.0),
        Ball([3, 0], 1.0),
        y0=(3.0, 0.0),
        dist_y0=1.0,
        d_hat=(1.0, 0.0),
        q_min_point=(2.0, 0.0),
    ),
    PocsInstance(
        "balls-gap-offaxis",
        Ball([0, 0], 1.0),
        Ball([3, 0], 1.0),
        y0=(4.0, 1.0),
        dist_y0=math.sqrt(5.0),
        d_hat=(1.0, 0.0),
        q_min_point=(2.0, 0.0),
    ),
    PocsInstance(
        "balls-overlap",
        Ball([0, 0], 1.0),
        Ball([1, 0], 1.0),
        y0=(1.0, 1.0),
        dist_y0=SQ2 - 1.0,
        d_hat=None,
        q_min_point=(1.0 / SQ2, 1.0 / SQ2),
    ),
    PocsInstance(
        "boxes-gap",
        Box([0, 0], [1, 1]),
        Box([2, 0], [3, 1]),
        y0=(2.5, 2.0),
        dist_y0=math.sqrt(1.25),
        d_hat=(1.0, 0.0),
        q_min_point=(2.0, 1.0),
    ),
    PocsInstance(
        "box-ball-overlap",
        Box([0, 0], [2, 2]),
        Ball([2, 2], 1.0),
        y0=(0.0, 0.0),
        dist_y0=2.0 * SQ2 - 1.0,
        d_hat=None,
        q_min_point=(2.0 - 1.0 / SQ2, 2.0 - 1.0 / SQ2),
    ),
    PocsInstance(
        "simplex-box-gap-3d",
        Simplex(3, 1.0),
        Box([0, 0, 0], [0.2, 0.2, 0.2]),
        y0=(0.5, 0.3, 0.1),
        dist_y0=math.sqrt(0.11),
        d_hat=(-0.4 / 3.0, -0.4 / 3.0, -0.4 / 3.0),
        q_min_point=(0.2, 0.2, 0.2),
    ),
    PocsInstance(
        "simplex-in-box",
        Simplex(2, 1.0),
        Box([0, 0], [1, 1]),
        y0=(1.0, 1.0),
        dist_y0=1.0 / SQ2,
        d_hat=None,
        q_min_point=(0.5, 0.5),
    ),
    # Closest pair: x* = (0.5, 0.5) on the simplex, y* = (1, 1) shifted
    # by 0.5/sqrt(2) down the diagonal; d = y* - x* has coordinates
    # 0.5 - 0.25*sqrt(2), and dist(y0, Q_min) = ||y*|| = sqrt(2) - 0.5.
    PocsInstance(
        "ball-simplex-gap",
        Simplex(2, 1.0),
        Ball([1, 1], 0.5),
        y0=(0.0, 0.0),
        dist_y0=SQ2 - 0.5,
        d_hat=(0.5 - 0.25 * SQ2, 0.5 - 0.25 * SQ2),
        q_min_point=(1.0 - 0.25 * SQ2, 1.0 - 0.25 * SQ2),
    ),
]


@dataclass(frozen=True)
class AdaptiveInstance:
    """An intersecting V-polytope pair for exact-point recovery."""

    name: str
    set_p: VPolytope
    set_q: VPolytope


ADAPTIVE_INSTANCES: list[AdaptiveInstance] = [
    AdaptiveInstance(
        "tri-seg-touch",
        VPolytope([[0, 0], [2, 0], [0, 2]]),
        VPolytope([[1, 1], [3, 1]]),
    ),
    AdaptiveInstance(
        "tri-tri",
        VPolytope([[0, 0], [2, 0], [0, 2]]),
        VPolytope([[1, 0], [3, 0], [1, 2]]),
    ),
    AdaptiveInstance(
        "square-square",
        VPolytope([[0, 0], [2, 0], [2, 2], [0, 2]]),
        VPolytope([[1, 1], [3, 1], [3, 3], [1, 3]]),
    ),
    AdaptiveInstance(
        "seg-through-tri",
        VPolytope([[-1, 1], [3, 1]]),
        VPolytope([[0, 0], [2, 0], [0, 2]]),
    ),
    AdaptiveInstance(
        "tetra-seg-3d",
        VPolytope([[0, 0, 0], [2, 0, 0], [0, 2, 0], [0, 0, 2]]),
        VPolytope([[0.5, 0.5, 0.5], [2, 2, 2]]),
    ),
    AdaptiveInstance(
        "point-in-square",
        VPolytope([[1, 1]]),
        VPolytope([[0, 0], [2, 0], [2, 2], [0, 2]]),
    ),
    AdaptiveInstance(
        "crossing-segs",
        VPolytope([[0, 0], [2, 2]]),
        VPolytope([[0, 2], [2, 0]]),
    ),
]


@dataclass(frozen=True)
class BlockInstance:
    name: str
    problem: BlockProblem
    start: tuple[tuple[float, ...], ...]
    fstar: float
    sweeps: int


def _target_problem(blocks: Sequence[OracleSet], targets: Sequence[Sequence[float]]) -> BlockProblem:
    """Separable quadratic f = sum_i ||x_i - c_i||^2."""
    cs = [np.asarray(c, dtype=float) for c in targets]

    def value(points):
        return float(sum(np.dot(p - c, p - c) for p, c in zip(points, cs)))

    def grad_block(points, i):
        return 2.0 * (points[i] - cs[i])

    return BlockProblem(
        blocks=tuple(blocks),
        value=value,
        grad_block=grad_block,
        lipschitz=2.0,
        block_lipschitz=tuple(2.0 for _ in blocks),
    )


def _ring_problem(blocks: Sequence[OracleSet]) -> BlockProblem:
    """Three-block f = ||x-y||^2 + ||y-z||^2 + ||z-x||^2; L = 6, L_i = 4."""

    def value(points):
        x, y, z = points
        return float(np.dot(x - y, x - y) + np.dot(y - z, y - z) + np.dot(z - x, z - x))

    def grad_block(points, i):
        x, y, z = points
        if i == 0:
            return 2.0 * (x - y) + 2.0 * (x - z)
        if i == 1:
            return 2.0 * (y - x) + 2.0 * (y - z)
        return 2.0 * (z - x) + 2.0 * (z - y)

    return BlockProblem(
        blocks=tuple(blocks),
        value=value,
        grad_block=grad_block,
        lipschitz=6.0,
        block_lipschitz=(4.0, 4.0, 4.0),
    )


def block_instances() -> list[BlockInstance]:
    """k in {1, 2, 3} problems with analytically known optima."""
    simplex3 = Simplex(3, 1.0)
    return [
        BlockInstance(
            "k1-simplex-center",
            _target_problem([simplex3], [(1 / 3, 1 / 3, 1 / 3)]),
            start=((1.0, 0.0, 0.0),),
            fstar=0.0,
            sweeps=120,
        ),
        BlockInstance(
            "k1-box-corner",
            _target_problem([Box([0, 0], [1, 1])], [(2.0, 2.0)]),
            start=((0.0, 0.0),),
            fstar=2.0,
            sweeps=120,
        ),
        BlockInstance(
            "k2-boxes-overlap",
            distance_problem(Box([0, 0], [2, 2]), Box([1, 1], [3, 3])),
            start=((0.0, 0.0), (3.0, 3.0)),
            fstar=0.0,
            sweeps=150,
        ),
        BlockInstance(
            "k2-balls-gap",
            distance_problem(Ball([0, 0], 1.0), Ball([3, 0], 1.0)),
            start=((0.0, -1.0), (3.0, 1.0)),
            fstar=1.0,
            sweeps=150,
        ),
        BlockInstance(
            "k3-separable",
            _target_problem(
                [Box([0, 0], [1, 1]), Ball([0, 0], 1.0), Simplex(2, 1.0)],
                [(2.0, 2.0), (0.0, 3.0), (1.0, 1.0)],
            ),
            start=((0.0, 0.0), (0.0, -1.0), (1.0, 0.0)),
            fstar=2.0 + 4.0 + 0.5,
            sweeps=120,
        ),
        BlockInstance(
            "k3-ring-boxes",
            _ring_problem(
                [Box([0, 0], [2, 2]), Box([1, 1], [3, 3]), Box([1, 0], [2, 3])]
            ),
            start=((0.0, 0.0), (3.0, 3.0), (2.0, 0.0)),
            fstar=0.0,
            sweeps=150,
        ),
    ]
