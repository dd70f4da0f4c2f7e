"""Small dense linear programming over systems ``M x <= c``.

The simplex here is a plain tableau method with Bland's anti-cycling rule.
Every LP is first translated so the origin is feasible, which lets phase 1
be the same routine as phase 2 run on an auxiliary system.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, LPError

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
COST_TOL = 1e-11
REDUNDANCY_RTOL = 1e-9

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Constraints ``M @ x <= c``.

    ``pairs`` lists row index pairs that together encode one equality
    ``m . x = c`` as two opposing inequalities.
    """

    M: np.ndarray
    c: np.ndarray
    pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.ndim == 1:
            M = M.reshape(1, -1)
        c = np.array(self.c, dtype=float).reshape(-1)
        if M.ndim != 2 or M.shape[0] != c.shape[0] or M.shape[0] < 1:
            raise InvalidInputError("need an N x n matrix and N right-hand sides, N >= 1")
        if not (np.all(np.isfinite(M)) and np.all(np.isfinite(c))):
            raise InvalidInputError("linear system entries must be finite")
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        seen = [k for p in pairs for k in p]
        if len(set(seen)) != len(seen) or any(not 0 <= k < len(c) for k in seen):
            raise InvalidInputError("equality pairs must be disjoint valid row indices")
        M.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return self.M.shape[1]

    @property
    def N(self) -> int:
        return self.M.shape[0]

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.M @ x <= self.c + tol * (1.0 + np.abs(self.c))))

    def units(self) -> list[tuple[int, ...]]:
        """Rows grouped so that each equality pair is one unit."""
        partner = {}
        for i, j in self.pairs:
            partner[i], partner[j] = j, i
        out, done = [], set()
        for i in range(self.N):
            if i in done:
                continue
            unit = (i, partner[i]) if i in partner else (i,)
            done.update(unit)
            out.append(unit)
        return out

    def subsystem(self, rows) -> "LinearSystem":
        rows = sorted(rows)
        where = {r: k for k, r in enumerate(rows)}
        pairs = tuple((where[i], where[j]) for i, j in self.pairs if i in where and j in where)
        return LinearSystem(self.M[rows], self.c[rows], pairs)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: float | None = None
    x: np.ndarray | None = None


def _simplex_from_origin(M: np.ndarray, c: np.ndarray, obj: np.ndarray):
    """Maximize ``obj . x`` s.t. ``M x <= c`` for free x, assuming ``c >= 0``.

    Returns ``(status, x)``.
    """
    N, n = M.shape
    ncols = 2 * n + N
    T = np.zeros((N + 1, ncols + 1))
    T[:N, :n] = M
    T[:N, n:2 * n] = -M
    T[:N, 2 * n:ncols] = np.eye(N)
    T[:N, -1] = c
    # last row holds reduced costs (maximization) and minus the objective value
    T[N, :n] = obj
    T[N, n:2 * n] = -obj
    basis = list(range(2 * n, ncols))
    col_scale = 1.0 + np.max(np.abs(T[:N, :ncols]), axis=0)

    max_iter = 50 * (N + n) + 1000
    for _ in range(max_iter):
        cost = T[N, :ncols]
        candidates = np.nonzero(cost > COST_TOL * col_scale)[0]
        if candidates.size == 0:
            break
        j = int(candidates[0])
        col = T[:N, j]
        rows = np.nonzero(col > PIVOT_TOL * col_scale[j])[0]
        if rows.size == 0:
            return UNBOUNDED, None
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        r = int(min(ties, key=lambda k: basis[k]))
        piv = T[r, j]
        T[r] /= piv
        factor = T[:, j].copy()
        factor[r] = 0.0
        T -= np.outer(factor, T[r])
        basis[r] = j
    else:
        raise LPError("simplex iteration limit reached (ill-conditioned)")

    z = np.zeros(ncols)
    z[basis] = T[:N, -1]
    return OPTIMAL, z[:n] - z[n:2 * n]


def _feasible_point(M: np.ndarray, c: np.ndarray) -> np.ndarray | None:
    tol = FEAS_TOL * (1.0 + np.max(np.abs(c)))
    if np.all(c >= -tol):
        return np.zeros(M.shape[1])
    # auxiliary system in (x, sigma): M x - sigma <= c + tau0, -sigma <= tau0
    tau0 = float(-c.min())
    N, n = M.shape
    Maux = np.zeros((N + 1, n + 1))
    Maux[:N, :n] = M
    Maux[:N, n] = -1.0
    Maux[N, n] = -1.0
    caux = np.append(c + tau0, tau0)
    obj = np.zeros(n + 1)
    obj[n] = -1.0
    status, sol = _simplex_from_origin(Maux, np.maximum(caux, 0.0), obj)
    if status != OPTIMAL:
        raise LPError("phase 1 did not terminate at an optimum (ill-conditioned)")
    if tau0 + sol[n] > tol:
        return None
    return sol[:n]


def _check(M, c, x):
    viol = float(np.max(M @ x - c)) if len(c) else 0.0
    if viol > FEAS_TOL * (1.0 + np.max(np.abs(c)) + np.max(np.abs(x))):
        raise LPError(f"basic solution violates constraints by {viol:.3g} (ill-conditioned)")


def solve(sys: LinearSystem, objective) -> LPResult:
    """Maximize ``objective . x`` over ``sys``."""
    obj = np.asarray(objective, dtype=float).reshape(sys.n)
    x0 = _feasible_point(sys.M, sys.c)
    if x0 is None:
        return LPResult(INFEASIBLE)
    shifted = np.maximum(sys.c - sys.M @ x0, 0.0)
    status, y = _simplex_from_origin(sys.M, shifted, obj)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = x0 + y
    _check(sys.M, sys.c, x)
    return LPResult(OPTIMAL, float(obj @ x), x)


def is_feasible(sys: LinearSystem) -> bool:
    return _feasible_point(sys.M, sys.c) is not None


def remove_redundant(sys: LinearSystem) -> LinearSystem:
    """Drop constraints implied by the others; equality pairs go together.

    Units are tested in row order against the currently kept rows, so of
    two duplicate constraints the later one survives.
    """
    x0 = _feasible_point(sys.M, sys.c)
    if x0 is None:
        raise InvalidInputError("remove_redundant needs a feasible system")
    M = sys.M
    c = np.maximum(sys.c - M @ x0, 0.0)
    kept = set(range(sys.N))
    for unit in sys.units():
        others = sorted(kept.difference(unit))
        if all(_implied(M, c, others, r) for r in unit):
            kept.difference_update(unit)
    return sys.subsystem(kept)


def _implied(M, c, others, r) -> bool:
    m = M[r]
    scale = 1.0 + abs(c[r]) + float(np.max(np.abs(m)))
    if np.max(np.abs(m)) <= PIVOT_TOL:
        return True
    if not others:
        return False
    status, y = _simplex_from_origin(M[others], c[others], m)
    if status == UNBOUNDED:
        return False
    return float(m @ y) <= c[r] + REDUNDANCY_RTOL * scale


@dataclass(frozen=True)
class Vertex:
    point: np.ndarray
    active: tuple[int, ...]


def enumerate_vertices(sys: LinearSystem, chunk: int = 20000) -> list[Vertex]:
    """All basic feasible solutions, deduplicated, with their maximal active sets."""
    n = sys.n
    if sys.N < n:
        return []
    M, c = sys.M, sys.c
    tol = FEAS_TOL * (1.0 + np.abs(c))
    found: list[np.ndarray] = []
    combos = itertools.combinations(range(sys.N), n)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if block.size == 0:
            break
        sub = M[block]
        ok = np.linalg.cond(sub) < 1e12
        if not np.any(ok):
            continue
        pts = np.linalg.solve(sub[ok], c[block[ok]][..., None])[..., 0]
        feas = np.all(pts @ M.T <= c + tol, axis=1)
        found.extend(pts[feas])
    out: list[Vertex] = []
    for p in sorted(found, key=tuple):
        if any(np.all(np.abs(p - v.point) <= 1e-8 * (1.0 + np.abs(v.point))) for v in out):
            continue
        active = tuple(int(i) for i in np.nonzero(np.abs(M @ p - c) <= tol)[0])
        out.append(Vertex(p + 0.0, active))
    return out
