"""Seeded self-check suites comparing the bound calculators against the root oracle.

Each suite returns a JSON-ready report with its seed, the number of checks
made and the number of violations. ``run_suite`` dispatches by name.
"""
from __future__ import annotations

import math

import numpy as np

from . import lp
from .core import ExpSum, minimal_spacing, transform
from .errors import QuadratureError, RootOnBoundaryError
from .metric import bounds, nearest_trop_point, sample_projection, sampled_hausdorff, witness_family
from .roots import (Rectangle, domination_radius, isolate_roots, strip_count_bounds,
                    winding_integral, wv_bound)
from .tropical import (LOG3, clusters_1d, distance_to_trop, root_free_strips, root_interval,
                       trop_points_1d, trop_vertices)
from .archnewt import lower_hull_1d

TWO_PI = 2 * math.pi
ROOT_TOL = 1e-7


def random_univariate(rng: np.random.Generator, t: int | None = None) -> ExpSum:
    """t in 2..7 terms, frequency gaps in [0.5, 2], |Re b| <= 3, uniform phases."""
    if t is None:
        t = int(rng.integers(2, 8))
    a = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 2.0, t - 1))]) + rng.uniform(-1, 1)
    b = rng.uniform(-3, 3, t) + 1j * rng.uniform(0, TWO_PI, t)
    return ExpSum(a, b)


def seven_sum() -> ExpSum:
    j = np.arange(8)
    freqs = np.column_stack([np.cos(TWO_PI * j / 7), np.sin(TWO_PI * j / 7)])[:7]
    coeffs = np.array([math.comb(7, int(k)) for k in j[:7]], dtype=float)
    return ExpSum.from_coefficients(freqs, coeffs)


def _report(name: str, seed: int, checks: dict[str, list[int]], **extra) -> dict:
    out = {
        "suite": name,
        "seed": seed,
        "checks": {k: {"checked": v[0], "violations": v[1]} for k, v in checks.items()},
        "violations": sum(v[1] for v in checks.values()),
    }
    out.update(extra)
    return out


def _tally(checks: dict[str, list[int]], key: str, ok: bool):
    entry = checks.setdefault(key, [0, 0])
    entry[0] += 1
    entry[1] += 0 if ok else 1


def _nearby_root(g: ExpSum, w: float, radius: float, v0: float, seed: int) -> bool:
    """Is there a root with real part within ``radius`` of w?

    Tall strips are searched with doubling height, since a small cluster
    may have no root in a short window.
    """
    for k in range(7):
        rect = Rectangle(w - radius, w + radius, v0, v0 + 4 * math.pi * 2 ** k)
        if winding_integral(g, rect, seed=seed).count > 0:
            return True
    return False


def check_univariate(g: ExpSum, checks: dict, u: float = 0.0, v: float = 4 * math.pi,
                     seed: int = 0):
    """Run the localization, strip and count checks on one univariate instance."""
    delta = minimal_spacing(g).delta
    trop = np.array(trop_points_1d(g).points)
    lo, hi = root_interval(g)
    margin = 1.0
    res = winding_integral(g, Rectangle(lo - margin, hi + margin, u, v), seed=seed)
    rect = res.rect
    roots = isolate_roots(g, rect, seed=seed)
    re = np.array([r.z.real for r in roots])
    mult = np.array([r.multiplicity for r in roots])

    for x in re:
        tol = ROOT_TOL * (1 + abs(x))
        _tally(checks, "near_trop", np.min(np.abs(trop - x)) <= LOG3 / delta + tol)
        _tally(checks, "root_interval", lo < x < hi)
        near = nearest_trop_point(g, [x])
        _tally(checks, "nearest_trop", near.distance <= math.log(g.t - 1) / delta + tol)
    for p, q in root_free_strips(g):
        _tally(checks, "root_free", not np.any((re >= p) & (re <= q)))

    _tally(checks, "wv_count", wv_bound(g, rect.u, rect.v).contains(res.count))
    parts = strip_count_bounds(g, rect.u, rect.v)
    excess = 0.0
    for comp, interval in parts:
        r_c = int(mult[(re >= comp.lo) & (re <= comp.hi)].sum())
        excess += abs(r_c - interval.center)
    budget = parts[0][1].radius - 1.0
    _tally(checks, "cluster_joint", excess <= budget + len(parts) + 1e-9)

    clusters = clusters_1d(g)
    radius = (2 * clusters.s - 1) * LOG3 / delta
    for w in trop:
        ok = bool(np.any(np.abs(re - w) <= radius)) or _nearby_root(g, w, radius, rect.v, seed)
        _tally(checks, "trop_near_root", ok)
    return int(mult.sum())


def suite_univariate(seed: int = 0, instances: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}
    total = 0
    for k in range(instances):
        g = random_univariate(rng)
        total += check_univariate(g, checks, seed=seed + k)
    return _report("univariate", seed, checks, instances=instances, roots=total)


def _log_abs_sum(exps: np.ndarray) -> float:
    top = exps.real.max()
    return float(top + np.log(np.abs(np.exp(exps - top).sum())))


def check_domination(g: ExpSum, rng: np.random.Generator, checks: dict, points: int = 100):
    """Past an edge's domination radius its right term beats N times the lower terms."""
    hull = lower_hull_1d(g)
    order = np.argsort(g.freqs[:, 0], kind="stable")
    rank = {int(j): r for r, j in enumerate(order)}
    for N in (1, 2, 4):
        for _ in range(points):
            edge = hull.edges[int(rng.integers(len(hull.edges)))]
            ell = edge.right
            x = edge.slope + domination_radius(g, ell, N) + rng.exponential(1.0)
            z = complex(x, rng.uniform(-50, 50))
            lower = order[:rank[ell]]
            exps = g.freqs[:, 0] * z + g.coeffs
            lhs = _log_abs_sum(exps[lower]) + math.log(N)
            _tally(checks, f"domination_N{N}", lhs < exps[ell].real)


def suite_domination(seed: int = 0, instances: int = 100, points: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}
    for _ in range(instances):
        check_domination(random_univariate(rng), rng, checks, points)
    return _report("domination", seed, checks, instances=instances)


def suite_metric(seed: int = 0, projections: int = 1000, instances: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}

    g7 = seven_sum()
    draws = []
    for k in range(projections):
        p = sample_projection(g7, seed + k)
        spacing = float(np.min(np.diff(np.sort(g7.freqs @ p.theta))))
        _tally(checks, "projection_spacing",
               spacing >= p.threshold and abs(np.linalg.norm(p.theta) - 1) < 1e-12)
        draws.append(p.draws)
    median_draws = float(np.median(draws))
    _tally(checks, "projection_median_draws", median_draws <= 2)

    for _ in range(instances):
        g = random_univariate(rng) if rng.random() < 0.5 else _random_bivariate(rng)
        rho = rng.uniform(-4, 4, g.n)
        near = nearest_trop_point(g, rho)
        _tally(checks, "nearest_on_trop", distance_to_trop(g, near.point) == 0.0)

    ratios = []
    for t, n in ((3, 1), (4, 1), (5, 1), (4, 2)):
        w = witness_family(t, n, 1.0)
        est = sampled_hausdorff(w, 8, seed)
        rep = bounds(w)
        _tally(checks, "witness_below_1b", est.re_to_trop <= rep.bound_1b)
        ratios.append({"t": t, "n": n, "hausdorff": est.hausdorff,
                       "ratio_to_1b": est.hausdorff / rep.bound_1b})
    return _report("metric", seed, checks, median_draws=median_draws,
                   witness_ratios=ratios)


def _random_bivariate(rng: np.random.Generator, t: int | None = None) -> ExpSum:
    if t is None:
        t = int(rng.integers(3, 7))
    while True:
        freqs = rng.integers(-3, 4, size=(t, 2)).astype(float)
        if len({tuple(r) for r in freqs}) == t:
            break
    b = rng.uniform(-3, 3, t) + 1j * rng.uniform(0, TWO_PI, t)
    return ExpSum(freqs, b)


def random_system(rng: np.random.Generator, N: int, n: int) -> lp.LinearSystem:
    """A feasible system with some duplicated, scaled and loose rows."""
    x0 = rng.normal(size=n)
    M = rng.normal(size=(N, n))
    c = M @ x0 + rng.exponential(1.0, N)
    extra = max(1, N // 10)
    pick = rng.integers(N, size=extra)
    scale = rng.uniform(0.5, 2.0, extra)
    M = np.vstack([M, M[pick] * scale[:, None]])
    c = np.concatenate([c, c[pick] * scale + rng.choice([0.0, 1.0], extra)])
    return lp.LinearSystem(M, c)


def suite_lp(seed: int = 0, systems: int = 100, probes: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}
    for _ in range(systems):
        n = int(rng.integers(1, 4))
        N = int(rng.integers(2, 181))
        sys = random_system(rng, N, n)
        red = lp.remove_redundant(sys)
        again = lp.remove_redundant(red)
        _tally(checks, "idempotent", again.N == red.N
               and np.array_equal(again.M, red.M) and np.array_equal(again.c, red.c))
        centre = lp.solve(sys, np.zeros(n)).x
        pts = centre + rng.normal(scale=3.0, size=(probes, n))
        ins = np.all(pts @ sys.M.T <= sys.c, axis=1)
        ins_red = np.all(pts @ red.M.T <= red.c, axis=1)
        _tally(checks, "region_equal", bool(np.all(ins == ins_red)))
    return _report("lp", seed, checks, systems=systems)


def suite_winding(seed: int = 0, rectangles: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}
    skipped = 0
    for _ in range(rectangles):
        g = random_univariate(rng)
        lo, hi = root_interval(g)
        x1, x2 = np.sort(rng.uniform(lo - 1, hi + 1, 2))
        u = rng.uniform(-10, 10)
        rect = Rectangle(float(x1), float(x2), float(u), float(u + rng.uniform(0.5, 10)))
        fx, fy = rng.uniform(0.3, 0.7, 2)
        try:
            parent = winding_integral(g, rect, retries=0)
            kids = [winding_integral(g, r, retries=0) for r in rect.quadrisect(fx, fy)]
        except (RootOnBoundaryError, QuadratureError):
            skipped += 1
            continue
        _tally(checks, "additivity", parent.count == sum(k.count for k in kids))
        for r in [parent, *kids]:
            _tally(checks, "residual", r.residual < 0.05)
    return _report("winding", seed, checks, skipped=skipped)


def _same_points(p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    if p.shape != q.shape:
        return False
    # match by proximity; sorting is fragile when coordinates tie up to rounding
    close = np.all(np.abs(p[:, None] - q[None]) <= tol * (1 + np.abs(q[None])), axis=-1)
    return bool(np.all(close.sum(axis=1) == 1) and np.all(close.sum(axis=0) == 1))


def suite_functoriality(seed: int = 0, triples: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    checks: dict[str, list[int]] = {}
    for k in range(triples):
        bivariate = k % 2 == 1
        g = _random_bivariate(rng) if bivariate else random_univariate(rng)
        n = g.n
        beta = rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n)
        diag = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
        h = transform(g, beta=beta, matrix=np.diag(diag))
        if bivariate:
            before = np.array(trop_vertices(g)).reshape(-1, 2)
            after = np.array(trop_vertices(h)).reshape(-1, 2)
        else:
            before = np.array(trop_points_1d(g).points)[:, None]
            after = np.array(trop_points_1d(h).points)[:, None]
        expected = (before - beta.real) / diag
        _tally(checks, "bivariate" if bivariate else "univariate",
               _same_points(after, expected, 1e-8))
    return _report("functoriality", seed, checks)


def suite_simplex(seed: int = 0, points: int = 1000) -> dict:
    """Trop(1 - e^z1 - e^z2) lies in the amoeba: triangle inequality on (1, e^w1, e^w2)."""
    from .tropical import sample_trop_points_2d

    rng = np.random.default_rng(seed)
    g = ExpSum([[0, 0], [1, 0], [0, 1]], [0, 1j * math.pi, 1j * math.pi])
    checks: dict[str, list[int]] = {}
    for w in sample_trop_points_2d(g, points, rng, ray_length=20.0):
        s = np.array([1.0, math.exp(w[0]), math.exp(w[1])])
        slack = s.sum() - 2 * s.max()
        _tally(checks, "triangle", slack >= -1e-9 * s.max())
    return _report("simplex", seed, checks, points=points)


SUITES = {
    "univariate": suite_univariate,
    "domination": suite_domination,
    "metric": suite_metric,
    "lp": suite_lp,
    "winding": suite_winding,
    "functoriality": suite_functoriality,
    "simplex": suite_simplex,
}


def run_suite(name: str, seed: int = 0, **kwargs) -> dict:
    return SUITES[name](seed, **kwargs)
