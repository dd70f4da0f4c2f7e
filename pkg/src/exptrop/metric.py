"""Distances between Re(Z(g)) and Trop(g): bounds, witnesses and estimates."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import (ExpSum, affine_dimension, affine_hull_basis, log_binomial,
                   minimal_spacing, slice_to_line, term_magnitudes_log)
from .errors import DegenerateError, InvalidInputError, ProjectionSamplingError
from .roots import Rectangle, isolate_roots
from .tropical import (LOG3, distance_to_trop, clusters_1d, root_interval,
                       sample_trop_points_2d, trop_points_1d, trop_vertices)

MAX_PROJECTION_DRAWS = 64


@dataclass(frozen=True)
class DistanceReport:
    """Explicit bounds for a sum with t terms, spacing delta and hull dimension d.

    ``bound_uni`` (univariate only) and ``lower_witness`` (only when
    ``t > n``) may be None.
    """

    t: int
    n: int
    d: int
    delta: float
    bound_1a: float
    bound_1b: float
    bound_uni: float | None
    lower_witness: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def bounds(g: ExpSum) -> DistanceReport:
    t, n = g.t, g.n
    d = affine_dimension(g)
    delta = minimal_spacing(g).delta
    b1a = math.log(t - 1) / delta
    b1b = math.sqrt(math.e * d) * t * t * (2 * t - 3) * LOG3 / delta
    uni = None
    if n == 1:
        s = clusters_1d(g).s
        uni = (2 * s - 1) * LOG3 / delta
    witness = math.log(t - n) / delta if t > n else None
    return DistanceReport(t, n, d, delta, b1a, b1b, uni, witness)


@dataclass(frozen=True)
class NearestTrop:
    point: np.ndarray
    distance: float
    top: int
    partner: int
    certified: bool


def nearest_trop_point(g: ExpSum, rho) -> NearestTrop:
    """Move rho along ``a_i - a_top`` until the top term ties with some other.

    ``top`` is the dominating term at rho and ``partner`` the term it ends
    up tied with; among equally short moves the smallest index wins. The
    move has length at most ``log(t-1)/delta`` whenever the top two term
    values at rho differ by at most ``log(t-1)``, which every real part of
    a root satisfies; ``certified`` records that condition.
    """
    rho = np.asarray(rho, dtype=float).reshape(g.n)
    v = term_magnitudes_log(g, rho)
    top = int(np.argmax(v))
    diff = g.freqs - g.freqs[top]
    sq = np.sum(diff * diff, axis=1)
    others = np.arange(g.t) != top
    lam = np.zeros(g.t)
    lam[others] = np.maximum(v[top] - v[others], 0.0) / sq[others]
    length = np.full(g.t, np.inf)
    length[others] = lam[others] * np.sqrt(sq[others])
    best = float(length.min())
    partner = int(np.nonzero(length <= best + 1e-12 * (1.0 + best))[0][0])
    point = rho + lam[partner] * diff[partner]
    second = float(np.sort(v)[-2])
    certified = v[top] - second <= math.log(g.t - 1) + 1e-12 * (1.0 + abs(v[top]))
    return NearestTrop(point, float(lam[partner] * math.sqrt(sq[partner])), top, partner, certified)


@dataclass(frozen=True)
class ProjectionSample:
    theta: np.ndarray
    spacing: float
    threshold: float
    draws: int


def projected_spacing(g: ExpSum, theta) -> float:
    proj = np.sort(g.freqs @ np.asarray(theta, dtype=float))
    return float(np.min(np.diff(proj)))


def sample_projection(g: ExpSum, seed=None) -> ProjectionSample:
    """A unit direction in the frequency hull that keeps the projected spacing
    above ``delta / (sqrt(e d) t^2)``, by rejection sampling Gaussian directions.

    ``draws`` is 0 when the hull is a line and no sampling is needed.
    """
    d = affine_dimension(g)
    basis = affine_hull_basis(g)
    delta = minimal_spacing(g).delta
    threshold = delta / (math.sqrt(math.e * d) * g.t ** 2)
    if d == 1:
        theta = basis[0]
        return ProjectionSample(theta, projected_spacing(g, theta), threshold, 0)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for draw in range(1, MAX_PROJECTION_DRAWS + 1):
        c = rng.standard_normal(d)
        theta = (c / np.linalg.norm(c)) @ basis
        theta /= np.linalg.norm(theta)
        spacing = projected_spacing(g, theta)
        if spacing >= threshold:
            return ProjectionSample(theta, spacing, threshold, draw)
    raise ProjectionSamplingError(
        f"projection sampling failed after {MAX_PROJECTION_DRAWS} draws")


def witness_family(t: int, n: int, delta: float) -> ExpSum:
    """``(exp(delta z_1) + 1)^(t-n) + exp(delta z_2) + ... + exp(delta z_n)``, expanded."""
    if n < 1 or t < n + 1:
        raise InvalidInputError("witness family needs n >= 1 and t >= n + 1")
    if not delta > 0 or not math.isfinite(delta):
        raise InvalidInputError("delta must be positive")
    m = t - n
    freqs, coeffs = [], []
    for j in range(m + 1):
        a = np.zeros(n)
        a[0] = j * delta
        freqs.append(a)
        coeffs.append(log_binomial(m, j))
    for k in range(1, n):
        a = np.zeros(n)
        a[k] = delta
        freqs.append(a)
        coeffs.append(0.0)
    return ExpSum(np.array(freqs), np.array(coeffs, dtype=complex))


@dataclass(frozen=True)
class HausdorffEstimate:
    """Directed sup-inf distances from finite samples.

    ``re_to_trop`` measures sampled root real parts against the exact
    tropical variety, so it is a certified lower bound for the Hausdorff
    distance unless some root could only be located coarsely
    (``coarse_roots > 0``). ``trop_to_re`` measures tropical samples against
    the root samples only and is an empirical estimate.
    """

    re_to_trop: float
    trop_to_re: float
    n_roots: int
    n_trop: int
    coarse_roots: int
    seed: int | None

    @property
    def hausdorff(self) -> float:
        return max(self.re_to_trop, self.trop_to_re)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["hausdorff"] = self.hausdorff
        doc["labels"] = {
            "re_to_trop": "certified lower bound" if self.coarse_roots == 0 else "estimate",
            "trop_to_re": "empirical estimate",
        }
        return doc


def _root_real_parts(h: ExpSum, periods: float, seed: int) -> tuple[np.ndarray, int]:
    """Real parts of the roots of a univariate h in ``periods`` vertical periods,
    and how many of them are coarse."""
    lo, hi = root_interval(h)
    a = h.freqs[:, 0]
    height = 2 * math.pi * periods / float(a.max() - a.min())
    roots = isolate_roots(h, Rectangle(lo, hi, 0.0, height), seed=seed)
    return np.array([r.z.real for r in roots]), sum(r.coarse for r in roots)


def sampled_hausdorff(g: ExpSum, budget: int = 8, seed: int | None = 0) -> HausdorffEstimate:
    """Desk-scale estimate of both directed distances between Re(Z(g)) and Trop(g).

    Univariate: roots over ``budget`` vertical periods ``2 pi / (a_t - a_1)``.
    Bivariate: ``budget`` tropical anchors, each sliced along two sampled
    projection directions, with roots over ``budget`` periods per slice.
    """
    if g.n == 1:
        re, coarse = _root_real_parts(g, budget, seed or 0)
        re = np.unique(re)
        trop = np.array(trop_points_1d(g).points)
        if re.size == 0:
            raise InvalidInputError("no roots found; increase the budget")
        dist = np.abs(re[:, None] - trop[None, :])
        return HausdorffEstimate(float(dist.min(axis=1).max()), float(dist.min(axis=0).max()),
                                 int(re.size), int(trop.size), coarse, seed)
    if g.n != 2:
        raise InvalidInputError("sampled_hausdorff supports n = 1 or n = 2")
    rng = np.random.default_rng(seed)
    trop = np.vstack([sample_trop_points_2d(g, budget, rng)] + [v[None] for v in trop_vertices(g)])
    dirs = [sample_projection(g, rng).theta for _ in range(2)]
    reals, coarse = [], 0
    for anchor in trop[:budget]:
        for theta in dirs:
            try:
                h = slice_to_line(g, anchor, theta)
            except DegenerateError:
                continue
            w_perp = anchor - (anchor @ theta) * theta
            found, c = _root_real_parts(h, budget, int(rng.integers(2 ** 31)))
            coarse += c
            reals.extend(s * theta + w_perp for s in found)
    if not reals:
        raise InvalidInputError("no roots found on any slice; increase the budget")
    re = np.array(reals)
    re_to_trop = max(distance_to_trop(g, r) for r in re)
    gaps = np.linalg.norm(trop[:, None, :] - re[None, :, :], axis=-1)
    return HausdorffEstimate(float(re_to_trop), float(gaps.min(axis=1).max()),
                             len(re), len(trop), coarse, seed)
