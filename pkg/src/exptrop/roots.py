"""Root counting and localization for univariate exponential sums.

Counts in rectangles come from the argument principle: the contour integral
of g'/g is computed with adaptive composite Gauss-Legendre panels, and the
known-integer target doubles as an a-posteriori certificate. Every
evaluation factors out the largest term, so nothing overflows.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .core import ExpSum, minimal_spacing
from .errors import InvalidInputError, QuadratureError, RootOnBoundaryError
from .tropical import Component, clusters_1d

TWO_PI = 2.0 * math.pi
GL_ORDER = 8
PANEL_TOL = 2.5e-4
INTEGER_TOL = 0.05
AGREE_TOL = 0.02
CLEARANCE = 1e-12
ROOT_PROXIMITY = 0.05
JITTER_RETRIES = 8
DEFAULT_MAX_DEPTH = 20

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
# nodes mapped to [0, 1]
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def max_depth() -> int:
    return int(os.environ.get("EXPTROP_MAX_DEPTH", DEFAULT_MAX_DEPTH))


@dataclass(frozen=True)
class Rectangle:
    """Axis-parallel box ``[x1, x2] x [u, v]`` in the complex plane."""

    x1: float
    x2: float
    u: float
    v: float

    def __post_init__(self):
        vals = (self.x1, self.x2, self.u, self.v)
        if not all(math.isfinite(x) for x in vals):
            raise InvalidInputError("rectangle bounds must be finite")
        if not (self.x1 < self.x2 and self.u < self.v):
            raise InvalidInputError("rectangle must satisfy x1 < x2 and u < v")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.v - self.u

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x1 + self.x2), 0.5 * (self.u + self.v))

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.x1 - margin <= z.real <= self.x2 + margin
                and self.u - margin <= z.imag <= self.v + margin)

    def quadrisect(self, fx: float = 0.5, fy: float = 0.5) -> list["Rectangle"]:
        xm = self.x1 + fx * self.width
        ym = self.u + fy * self.height
        return [Rectangle(self.x1, xm, self.u, ym), Rectangle(xm, self.x2, self.u, ym),
                Rectangle(self.x1, xm, ym, self.v), Rectangle(xm, self.x2, ym, self.v)]


@dataclass(frozen=True)
class CountInterval:
    """An integer count known to lie in ``[center - radius, center + radius]``."""

    center: float
    radius: float

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def contains(self, k: float, tol: float = 1e-9) -> bool:
        return self.lo - tol <= k <= self.hi + tol

    def to_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius, "lo": self.lo, "hi": self.hi}


def _require_univariate(g: ExpSum):
    if g.n != 1:
        raise InvalidInputError(f"root counting needs a univariate sum (got n={g.n})")


def nearest_int_distance(x: float) -> float:
    return abs(x - round(x))


def wv_budget(g: ExpSum, u: float, v: float) -> float:
    """``t - 1 - sum <(v-u)(a_j - a_{j-1}) / 2pi>`` over sorted frequencies."""
    _require_univariate(g)
    if v < u:
        raise InvalidInputError("need u <= v")
    gaps = np.diff(np.sort(g.freqs[:, 0]))
    return g.t - 1 - sum(nearest_int_distance((v - u) * gap / TWO_PI) for gap in gaps)


def wv_bound(g: ExpSum, u: float, v: float) -> CountInterval:
    """Wilder-Voorhoeve interval for the number of roots with ``u <= Im z <= v``."""
    a = np.sort(g.freqs[:, 0]) if g.n == 1 else None
    budget = wv_budget(g, u, v)
    return CountInterval((v - u) * (a[-1] - a[0]) / TWO_PI, budget)


def domination_radius(g: ExpSum, ell: int, N: int) -> float:
    """Distance right of the tropical point beyond which term ``ell`` beats
    N times the sum of all lower-frequency terms."""
    _require_univariate(g)
    if int(N) != N or N < 1:
        raise InvalidInputError("N must be a positive integer")
    if not 0 <= ell < g.t:
        raise InvalidInputError(f"term index {ell} out of range")
    rank = int(np.sum(g.freqs[:, 0] < g.freqs[ell, 0])) + 1
    if rank < 2:
        raise InvalidInputError("the lowest-frequency term is never a right-hand vertex")
    return math.log(N + 1) / minimal_spacing(g).delta_prefix(rank)


def strip_count_bounds(g: ExpSum, u: float, v: float) -> list[tuple[Component, CountInterval]]:
    """Per-cluster count intervals for the rectangles ``C x [u, v]``.

    Each radius is the global budget plus one; individual budgets are not
    separately computable, but they sum to at most the global budget.
    """
    budget = wv_budget(g, u, v)
    return [(comp, CountInterval((v - u) * comp.span / TWO_PI, budget + 1.0))
            for comp in clusters_1d(g).components]


# -- argument principle -------------------------------------------------

class _LogDerivative:
    """Vectorized g'/g and relative clearance |g| / max_j |term_j|."""

    def __init__(self, g: ExpSum):
        self.a = g.freqs[:, 0].copy()
        self.b = g.coeffs.copy()
        self.spread = float(self.a.max() - self.a.min())

    def scaled(self, z: np.ndarray) -> np.ndarray:
        e = np.multiply.outer(z, self.a) + self.b
        e -= e.real.max(axis=-1, keepdims=True)
        return np.exp(e)

    def __call__(self, z: np.ndarray):
        w = self.scaled(z)
        s = w.sum(axis=-1)
        return (w @ self.a) / s, np.abs(s)

    def newton_step(self, z: complex, order: int) -> tuple[complex, float]:
        """Newton step for the ``order``-th derivative, plus its relative residual."""
        w = self.scaled(np.array([z]))[0]
        f = np.sum(w * self.a ** order)
        df = np.sum(w * self.a ** (order + 1))
        scale = np.sum(np.abs(w * self.a ** order)) if order else np.sum(np.abs(w))
        if df == 0:
            return 0j, abs(f) / scale
        return f / df, abs(f) / scale


def _integrate_segment(f: _LogDerivative, z0: complex, z1: complex, depth_limit: int):
    """``(fine, coarse, min_clearance)`` for the integral of g'/g along z0 -> z1."""
    length = abs(z1 - z0)
    n_init = int(min(2000, max(2, math.ceil(length * max(f.spread, 1.0) / 2.0))))
    lo = np.arange(n_init) / n_init
    hi = lo + 1.0 / n_init
    depth = np.zeros(n_init, dtype=int)
    dz = z1 - z0
    fine = coarse = 0j
    clearance = math.inf
    while lo.size:
        mid = 0.5 * (lo + hi)
        h = (hi - lo)[:, None]
        s_whole = lo[:, None] + h * _GL_X
        s_left = lo[:, None] + 0.5 * h * _GL_X
        s_right = mid[:, None] + 0.5 * h * _GL_X
        vals, clr = f(z0 + dz * np.concatenate([s_whole, s_left, s_right], axis=1))
        clearance = min(clearance, float(clr.min()))
        if clearance < CLEARANCE:
            raise RootOnBoundaryError("root on boundary")
        k = GL_ORDER
        whole = (vals[:, :k] @ _GL_W) * h[:, 0] * dz
        halves = (vals[:, k:2 * k] @ _GL_W + vals[:, 2 * k:] @ _GL_W) * 0.5 * h[:, 0] * dz
        # 1/|g'/g| estimates the distance to the nearest root; a panel that
        # passes too close to one is refined even if both rules agree
        near = np.abs(vals).max(axis=1) * length * (hi - lo) > 1.0 / ROOT_PROXIMITY
        ok = (np.abs(whole - halves) <= PANEL_TOL * TWO_PI * (hi - lo)) & ~near
        fine += halves[ok].sum()
        coarse += whole[ok].sum()
        bad = ~ok
        stuck = bad & (depth >= depth_limit)
        if np.any(stuck & near):
            raise RootOnBoundaryError("root on or near the boundary")
        if np.any(stuck):
            raise QuadratureError("quadrature failure")
        lo, hi, mid, depth = lo[bad], hi[bad], mid[bad], depth[bad] + 1
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        depth = np.concatenate([depth, depth])
    return fine, coarse, clearance


@dataclass(frozen=True)
class WindingResult:
    """Outcome of one certified contour count.

    ``integral`` is ``(1/2 pi i) * contour integral of g'/g`` from the finer
    panel rule, ``coarse`` the same from the coarser one. ``rect`` is the
    rectangle actually integrated over (it differs from the request only
    after boundary jitter).
    """

    count: int
    integral: complex
    coarse: complex
    rect: Rectangle
    jitters: int

    @property
    def residual(self) -> float:
        return abs(self.integral - self.count)


def _contour(f: _LogDerivative, rect: Rectangle, depth_limit: int):
    corners = [complex(rect.x1, rect.u), complex(rect.x2, rect.u),
               complex(rect.x2, rect.v), complex(rect.x1, rect.v)]
    fine = coarse = 0j
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        fi, co, _ = _integrate_segment(f, z0, z1, depth_limit)
        fine += fi
        coarse += co
    return fine / (TWO_PI * 1j), coarse / (TWO_PI * 1j)


def _certify(fine: complex, coarse: complex) -> int | None:
    k = round(fine.real)
    if k < 0 or abs(fine - k) >= INTEGER_TOL or abs(fine - coarse) >= AGREE_TOL:
        return None
    return int(k)


def winding_integral(g: ExpSum, rect: Rectangle, *, retries: int = JITTER_RETRIES,
                     seed: int = 0) -> WindingResult:
    """Certified root count in ``rect``, jittering the boundary outward on failure.

    Each retry expands every side by an independent uniform amount of at
    most ``1e-3 * 2**k`` times the rectangle diameter on the k-th retry.
    """
    _require_univariate(g)
    return _winding(_LogDerivative(g), rect, retries, seed)


def _winding(f: _LogDerivative, rect: Rectangle, retries: int, seed: int) -> WindingResult:
    depth_limit = max_depth()
    rng = np.random.default_rng(seed)
    err: Exception | None = None
    current = rect
    for attempt in range(retries + 1):
        if attempt:
            eta = rng.uniform(0.0, 1e-3 * 2 ** attempt * rect.diameter, size=4)
            current = Rectangle(rect.x1 - eta[0], rect.x2 + eta[1], rect.u - eta[2], rect.v + eta[3])
        try:
            fine, coarse = _contour(f, current, depth_limit)
        except (RootOnBoundaryError, QuadratureError) as exc:
            err = exc
            continue
        k = _certify(fine, coarse)
        if k is not None:
            return WindingResult(k, fine, coarse, current, attempt)
        err = QuadratureError(f"contour integral {fine:.4f} is not certifiably an integer")
    if isinstance(err, RootOnBoundaryError):
        raise RootOnBoundaryError(f"root on boundary of {rect} after {retries} jitter retries")
    raise QuadratureError(f"quadrature failure on {rect}: {err}")


def winding_count(g: ExpSum, rect: Rectangle, **kwargs) -> int:
    """Number of roots of g in ``rect``, counted with multiplicity."""
    return winding_integral(g, rect, **kwargs).count


# -- isolation ------------------------------------------------------------

@dataclass(frozen=True)
class Root:
    z: complex
    multiplicity: int
    coarse: bool = False

    def to_dict(self) -> dict:
        return {"re": self.z.real, "im": self.z.imag,
                "multiplicity": self.multiplicity, "coarse": self.coarse}


def _newton(f: _LogDerivative, z: complex, order: int, box: Rectangle) -> complex | None:
    escape = 4.0 * box.diameter
    start = z
    for _ in range(60):
        step, _ = f.newton_step(z, order)
        z -= step
        if not np.isfinite(z) or abs(z - start) > escape:
            return None
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    else:
        if abs(step) > 1e-10 * (1.0 + abs(z)):
            return None
    return complex(z)


def _polish(f: _LogDerivative, box: Rectangle, k: int) -> complex | None:
    """A root of multiplicity k in ``box``, or None if Newton cannot show one."""
    z = _newton(f, box.center, k - 1, box)
    if z is None or not box.contains(z):
        return None
    _, resid = f.newton_step(z, 0)
    if k == 1:
        return z if resid < 1e-11 else None
    # |g| ~ r^k on a box of radius r, so high multiplicities need wider boxes
    # to clear the boundary test; grow until one certifies or leaves the box
    r = max(1e-3 * box.diameter, 1e-7 * (1.0 + abs(z)))
    while True:
        small = Rectangle(z.real - r, z.real + r, z.imag - r, z.imag + r)
        if not (box.contains(complex(small.x1, small.u)) and box.contains(complex(small.x2, small.v))):
            return None
        try:
            res = _winding(f, small, 0, 0)
        except (RootOnBoundaryError, QuadratureError):
            r *= 10.0
            continue
        return z if res.count == k else None


def _grid_counts(f: _LogDerivative, box: Rectangle, fx: float, fy: float, depth_limit: int):
    """Counts of the four sub-boxes, sharing the integrals of common edges."""
    xs = [box.x1, box.x1 + fx * box.width, box.x2]
    ys = [box.u, box.u + fy * box.height, box.v]

    cache: dict[tuple[complex, complex], tuple[complex, complex]] = {}

    def seg(z0, z1):
        if (z1, z0) in cache:
            fi, co = cache[(z1, z0)]
            return -fi, -co
        fi, co, _ = _integrate_segment(f, z0, z1, depth_limit)
        cache[(z0, z1)] = (fi, co)
        return fi, co

    children, counts = [], []
    for iy in range(2):
        for ix in range(2):
            c = [complex(xs[ix], ys[iy]), complex(xs[ix + 1], ys[iy]),
                 complex(xs[ix + 1], ys[iy + 1]), complex(xs[ix], ys[iy + 1])]
            fine = coarse = 0j
            for z0, z1 in zip(c, c[1:] + c[:1]):
                fi, co = seg(z0, z1)
                fine += fi
                coarse += co
            k = _certify(fine / (TWO_PI * 1j), coarse / (TWO_PI * 1j))
            if k is None:
                raise QuadratureError("sub-box count not certified")
            children.append(Rectangle(xs[ix], xs[ix + 1], ys[iy], ys[iy + 1]))
            counts.append(k)
    return children, counts


def isolate_roots(g: ExpSum, rect: Rectangle, *, max_count: int = 10_000,
                  min_diameter: float = 1e-8, seed: int = 0) -> list[Root]:
    """Roots of g in ``rect`` with multiplicities, by quadrisection and Newton.

    Boxes holding k roots are polished by Newton on the (k-1)-th derivative
    from the box centre; a k-fold candidate is accepted only when a small
    box around it counts exactly k. Boxes that shrink below
    ``min_diameter``, or that no split can certify, are reported with
    ``coarse=True``.
    The multiplicities add up to the count of the (possibly jittered)
    input rectangle.
    """
    _require_univariate(g)
    f = _LogDerivative(g)
    top = _winding(f, rect, JITTER_RETRIES, seed)
    if top.count > max_count:
        raise InvalidInputError(f"rectangle holds {top.count} roots, above the guard {max_count}")
    depth_limit = max_depth()
    rng = np.random.default_rng(seed)
    stack = [(top.rect, top.count)]
    out: list[Root] = []
    while stack:
        box, k = stack.pop()
        if k == 0:
            continue
        z = _polish(f, box, k)
        if z is not None:
            out.append(Root(z, k))
            continue
        if box.diameter < min_diameter:
            out.append(Root(box.center, k, coarse=True))
            continue
        for attempt in range(JITTER_RETRIES):
            fx, fy = (0.5, 0.5) if attempt == 0 else rng.uniform(0.35, 0.65, size=2)
            try:
                children, counts = _grid_counts(f, box, fx, fy, depth_limit)
            except (RootOnBoundaryError, QuadratureError):
                continue
            if sum(counts) == k:
                stack.extend(zip(children, counts))
                break
        else:
            # the count of this box is certified but no edge through it clears
            # the root (high multiplicity); report it unresolved
            z = _newton(f, box.center, k - 1, box)
            out.append(Root(z if z is not None and box.contains(z) else box.center, k, coarse=True))
    out.sort(key=lambda r: (r.z.real, r.z.imag))
    return out
