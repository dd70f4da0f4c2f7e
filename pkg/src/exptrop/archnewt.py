"""Archimedean Newton polytope: lifted points and the univariate lower hull."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ExpSum
from .errors import InvalidInputError

CROSS_RTOL = 1e-9
SLOPE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class LiftedPoints:
    """Rows ``(a_j, -Re(b_j))`` in input order."""

    points: np.ndarray

    @property
    def freqs(self) -> np.ndarray:
        return self.points[:, :-1]

    @property
    def heights(self) -> np.ndarray:
        return self.points[:, -1]


@dataclass(frozen=True)
class Edge:
    slope: float
    left: int
    right: int


@dataclass(frozen=True)
class LowerHull1D:
    """Lower convex chain of a univariate lifted point set.

    Indices refer to terms of the originating sum, not to sorted positions.
    ``on_edge[k]`` lists every term whose lifted point lies on edge ``k``,
    endpoints included, ordered by frequency.
    """

    vertex_indices: tuple[int, ...]
    edges: tuple[Edge, ...]
    on_edge: tuple[tuple[int, ...], ...]

    @property
    def slopes(self) -> tuple[float, ...]:
        return tuple(e.slope for e in self.edges)

    def to_dict(self) -> dict:
        return {
            "vertex_indices": list(self.vertex_indices),
            "edges": [
                {"slope": e.slope, "left": e.left, "right": e.right, "on_edge": list(on)}
                for e, on in zip(self.edges, self.on_edge)
            ],
        }


def lift(g: ExpSum) -> LiftedPoints:
    pts = np.column_stack([g.freqs, -g.beta])
    pts.setflags(write=False)
    return LiftedPoints(pts)


def _cross(o, a, b) -> tuple[float, float]:
    """Cross product of (a - o) x (b - o) and a magnitude scale for it."""
    dx1, dy1 = a[0] - o[0], a[1] - o[1]
    dx2, dy2 = b[0] - o[0], b[1] - o[1]
    return dx1 * dy2 - dy1 * dx2, abs(dx1 * dy2) + abs(dy1 * dx2)


def lower_hull_1d(p: LiftedPoints | ExpSum) -> LowerHull1D:
    """Lower convex chain via a monotone scan; collinear points are not vertices."""
    if isinstance(p, ExpSum):
        p = lift(p)
    if p.points.shape[1] != 2:
        raise InvalidInputError("lower_hull_1d needs a univariate sum")
    pts = p.points
    order = np.argsort(pts[:, 0], kind="stable")
    chain: list[int] = []
    for idx in order:
        while len(chain) >= 2:
            cr, scale = _cross(pts[chain[-2]], pts[chain[-1]], pts[idx])
            if cr > CROSS_RTOL * scale:
                break
            chain.pop()
        chain.append(int(idx))

    edges, on_edge = [], []
    for left, right in zip(chain, chain[1:]):
        (x0, y0), (x1, y1) = pts[left], pts[right]
        slope = (y1 - y0) / (x1 - x0)
        members = []
        for idx in order:
            if x0 <= pts[idx, 0] <= x1:
                cr, scale = _cross(pts[left], pts[right], pts[idx])
                if abs(cr) <= CROSS_RTOL * scale:
                    members.append(int(idx))
        edges.append(Edge(float(slope), left, right))
        on_edge.append(tuple(members))
    return LowerHull1D(tuple(chain), tuple(edges), tuple(on_edge))


def _find_edge(h: LowerHull1D, w: float) -> Edge:
    for e in h.edges:
        if abs(e.slope - w) <= SLOPE_RTOL * (1.0 + abs(w)):
            return e
    raise InvalidInputError(f"{w!r} is not a slope of the lower hull")


def right_vertex_index(h: LowerHull1D, w: float) -> int:
    """Term index of the right endpoint of the lower edge of slope w."""
    return _find_edge(h, w).right


def left_vertex_index(h: LowerHull1D, w: float) -> int:
    return _find_edge(h, w).left
