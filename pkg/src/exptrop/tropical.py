"""Tropical varieties of exponential sums.

A point w is tropical when ``max_j (a_j . w + Re b_j)`` is attained at least
twice. Univariate varieties come from lower-hull slopes; in higher
dimension everything goes through cell queries and linear algebra.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .archnewt import lower_hull_1d
from .core import ExpSum, minimal_spacing, rank_tol, term_magnitudes_log
from .errors import InvalidInputError

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
ACTIVE_RTOL = 1e-9
POINT_RTOL = 1e-8


def active_tol(values: np.ndarray) -> float:
    return ACTIVE_RTOL * (1.0 + float(np.max(np.abs(values))))


def _require_univariate(g: ExpSum, what: str):
    if g.n != 1:
        raise InvalidInputError(f"{what} needs a univariate sum (got n={g.n})")


@dataclass(frozen=True)
class Trop1D:
    points: tuple[float, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"points": list(self.points), "left": list(self.left), "right": list(self.right)}


def trop_points_1d(g: ExpSum) -> Trop1D:
    """Slopes of the lower edges of the Newton polygon, with incident vertices."""
    _require_univariate(g, "trop_points_1d")
    hull = lower_hull_1d(g)
    return Trop1D(tuple(e.slope for e in hull.edges),
                  tuple(e.left for e in hull.edges),
                  tuple(e.right for e in hull.edges))


@dataclass(frozen=True)
class Component:
    """A run of tropical points whose open epsilon-neighbourhoods overlap."""

    w_min: float
    w_max: float
    size: int
    left: int
    right: int
    span: float
    lo: float
    hi: float


@dataclass(frozen=True)
class Clusters1D:
    epsilon: float
    components: tuple[Component, ...]

    @property
    def s(self) -> int:
        return max(c.size for c in self.components)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "s": self.s,
            "components": [c.__dict__ for c in self.components],
        }


def clusters_1d(g: ExpSum) -> Clusters1D:
    _require_univariate(g, "clusters_1d")
    trop = trop_points_1d(g)
    eps = LOG3 / minimal_spacing(g).delta
    a = g.freqs[:, 0]
    runs: list[list[int]] = [[0]]
    for k in range(1, len(trop.points)):
        if trop.points[k] - trop.points[k - 1] < 2 * eps:
            runs[-1].append(k)
        else:
            runs.append([k])
    comps = []
    for run in runs:
        first, last = run[0], run[-1]
        i, j = trop.left[first], trop.right[last]
        w0, w1 = trop.points[first], trop.points[last]
        comps.append(Component(w0, w1, len(run), i, j, float(a[j] - a[i]), w0 - eps, w1 + eps))
    return Clusters1D(eps, tuple(comps))


def root_interval(g: ExpSum) -> tuple[float, float]:
    """Open interval guaranteed to contain the real part of every root."""
    _require_univariate(g, "root_interval")
    pts = trop_points_1d(g).points
    r = LOG2 / minimal_spacing(g).delta
    return pts[0] - r, pts[-1] + r


def root_free_strips(g: ExpSum) -> list[tuple[float, float]]:
    """Closed real intervals whose vertical strips hold no roots."""
    _require_univariate(g, "root_free_strips")
    pts = trop_points_1d(g).points
    r = LOG3 / minimal_spacing(g).delta
    return [(w1 + r, w2 - r) for w1, w2 in zip(pts, pts[1:]) if w2 - w1 >= 2 * r]


@dataclass(frozen=True, eq=False)
class Cell:
    """Closure of the cell of the tropical complex containing a query point.

    ``system`` is the irredundant description ``M x <= c``; rows joined in
    ``system.pairs`` encode equalities.
    """

    system: lp.LinearSystem
    active_set: tuple[int, ...]
    dim: int

    @property
    def halfspaces(self) -> list[tuple[np.ndarray, float]]:
        return [(row, float(off)) for row, off in zip(self.system.M, self.system.c)]

    @property
    def is_equality(self) -> list[bool]:
        paired = {k for p in self.system.pairs for k in p}
        return [k in paired for k in range(self.system.N)]

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.system.contains(x, tol)

    def to_dict(self) -> dict:
        return {
            "active_set": list(self.active_set),
            "dim": self.dim,
            "halfspaces": [
                {"normal": [float(v) for v in row], "offset": off + 0.0, "equality": eq}
                for (row, off), eq in zip(self.halfspaces, self.is_equality)
            ],
        }


def cell_query(g: ExpSum, w) -> Cell:
    w = np.asarray(w, dtype=float).reshape(g.n)
    v = term_magnitudes_log(g, w)
    top = float(v.max())
    active = np.nonzero(v >= top - active_tol(v))[0]
    j0 = int(active[0])
    a0, b0 = g.freqs[j0], g.beta[j0]
    rows, rhs, pairs = [], [], []
    eq_normals = []
    for j in range(g.t):
        if j == j0:
            continue
        normal = g.freqs[j] - a0
        off = b0 - g.beta[j]
        if j in active:
            pairs.append((len(rows), len(rows) + 1))
            rows.extend([normal, -normal])
            rhs.extend([off, -off])
            eq_normals.append(normal)
        else:
            rows.append(normal)
            rhs.append(off)
    system = lp.remove_redundant(lp.LinearSystem(np.array(rows), np.array(rhs), tuple(pairs)))
    rank = 0
    if eq_normals:
        sv = np.linalg.svd(np.array(eq_normals), compute_uv=False)
        rank = int(np.sum(sv > rank_tol(g.freqs)))
    return Cell(system, tuple(int(j) for j in active), g.n - rank)


def trop_vertices(g: ExpSum) -> list[np.ndarray]:
    """Points where n+1 terms with affinely independent frequencies tie at the max.

    Costs one small solve per (n+1)-subset of terms.
    """
    n = g.n
    found = []
    for subset in itertools.combinations(range(g.t), n + 1):
        idx = list(subset)
        a = g.freqs[idx]
        if np.linalg.matrix_rank(a[1:] - a[0], tol=rank_tol(g.freqs)) < n:
            continue
        # unknowns (x, s): a_j . x - s = -beta_j
        sysm = np.column_stack([a, -np.ones(n + 1)])
        if np.linalg.cond(sysm) > 1e12:
            continue
        sol = np.linalg.solve(sysm, -g.beta[idx])
        x, s = sol[:n], sol[n]
        v = term_magnitudes_log(g, x)
        if v.max() <= s + active_tol(v):
            found.append(x + 0.0)
    out: list[np.ndarray] = []
    for x in sorted(found, key=tuple):
        if not any(np.all(np.abs(x - y) <= POINT_RTOL * (1.0 + np.abs(y))) for y in out):
            out.append(x)
    return out


def distance_to_trop(g: ExpSum, w) -> float:
    """Euclidean distance from w to Trop(g).

    For w off Trop(g) with dominating term j0, the nearest tropical point
    lies on the boundary of the convex cell ``{x : term j0 dominates}``, and
    the distance from an interior point to the boundary of a convex
    polyhedron is the least distance to its bounding hyperplanes.
    """
    w = np.asarray(w, dtype=float).reshape(g.n)
    v = term_magnitudes_log(g, w)
    top = float(v.max())
    active = np.nonzero(v >= top - active_tol(v))[0]
    if len(active) >= 2:
        return 0.0
    j0 = int(active[0])
    others = np.arange(g.t) != j0
    gaps = top - v[others]
    norms = np.linalg.norm(g.freqs[others] - g.freqs[j0], axis=1)
    return float(np.min(gaps / norms))


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray
    terms: tuple[int, int]
    bounded: bool


def trop_edges_2d(g: ExpSum, ray_length: float | None = None) -> list[Segment]:
    """The 1-skeleton of a bivariate Trop(g) as segments.

    Unbounded rays are cut ``ray_length`` beyond their finite end (default:
    the vertex diameter plus 2). Edges that are whole lines are cut
    symmetrically about the point closest to the origin.
    """
    if g.n != 2:
        raise InvalidInputError("trop_edges_2d needs a bivariate sum")
    verts = trop_vertices(g)
    if ray_length is None:
        spread = 0.0
        if len(verts) > 1:
            vv = np.array(verts)
            spread = float(np.max(np.linalg.norm(vv[:, None] - vv[None], axis=-1)))
        ray_length = spread + 2.0
    A, B = g.freqs, g.beta
    segs = []
    for j, k in itertools.combinations(range(g.t), 2):
        d = A[j] - A[k]
        dn = float(d @ d)
        p0 = d * (B[k] - B[j]) / dn
        u = np.array([-d[1], d[0]]) / math.sqrt(dn)
        lo, hi = -math.inf, math.inf
        empty = False
        for m in range(g.t):
            if m in (j, k):
                continue
            alpha = float((A[m] - A[j]) @ u)
            rhs = float(B[j] - B[m] - (A[m] - A[j]) @ p0)
            scale = 1e-9 * (1.0 + abs(rhs) + float(np.abs(A[m] - A[j]).max()))
            if abs(alpha) <= 1e-12:
                if rhs < -scale:
                    empty = True
                    break
            elif alpha > 0:
                hi = min(hi, rhs / alpha)
            else:
                lo = max(lo, rhs / alpha)
        bounded = math.isfinite(lo) and math.isfinite(hi)
        if empty or (bounded and hi - lo <= POINT_RTOL * (1.0 + abs(lo) + abs(hi))):
            continue
        if not math.isfinite(lo) and not math.isfinite(hi):
            lo, hi = -ray_length, ray_length
        elif not math.isfinite(lo):
            lo = hi - ray_length
        elif not math.isfinite(hi):
            hi = lo + ray_length
        segs.append(Segment(p0 + lo * u, p0 + hi * u, (j, k), bounded))
    return segs


def sample_trop_points_2d(g: ExpSum, count: int, rng: np.random.Generator,
                          ray_length: float | None = None) -> np.ndarray:
    """Points drawn along the 1-skeleton, proportionally to segment length."""
    segs = trop_edges_2d(g, ray_length)
    lengths = np.array([np.linalg.norm(s.end - s.start) for s in segs])
    pick = rng.choice(len(segs), size=count, p=lengths / lengths.sum())
    frac = rng.random(count)
    starts = np.array([segs[i].start for i in pick])
    ends = np.array([segs[i].end for i in pick])
    return starts + frac[:, None] * (ends - starts)
