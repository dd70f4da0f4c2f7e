"""Exponential sums g(z) = sum_j exp(a_j . z + b_j) and basic measurements.

Coefficients are stored as complex exponents ``b_j`` rather than as the
values ``exp(b_j)``, so every magnitude comparison stays in log-space.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DegenerateError, EvaluationOverflow, InvalidInputError

# exp() overflows a double just above 709.78
EXP_GUARD = 700.0
COLLISION_RTOL = 1e-9
CONDITION_LIMIT = 1e12


def collision_tol(freqs: np.ndarray) -> float:
    """Distance below which two frequencies are treated as the same."""
    scale = float(np.max(np.abs(freqs))) if freqs.size else 0.0
    return COLLISION_RTOL * (1.0 + scale)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ExpSum:
    """An n-variate exponential t-sum.

    Parameters
    ----------
    freqs : array_like, shape (t, n) or (t,)
        Real frequency vectors ``a_j``. A 1-d array means ``n = 1``.
    coeffs : array_like of complex, shape (t,)
        Coefficient exponents ``b_j``; the j-th term is ``exp(a_j . z + b_j)``.
    """

    freqs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.freqs, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2 or a.shape[1] < 1:
            raise InvalidInputError("frequencies must be a (t, n) array")
        b = np.array(self.coeffs, dtype=complex).reshape(-1)
        if b.shape[0] != a.shape[0]:
            raise InvalidInputError(
                f"got {a.shape[0]} frequencies but {b.shape[0]} coefficients")
        if a.shape[0] < 2:
            raise InvalidInputError("an exponential sum needs at least 2 terms")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidInputError("frequencies and coefficients must be finite")
        if _min_pairwise(a) < collision_tol(a):
            raise DegenerateError("duplicate frequencies")
        object.__setattr__(self, "freqs", _readonly(a))
        object.__setattr__(self, "coeffs", _readonly(b))

    @property
    def n(self) -> int:
        return self.freqs.shape[1]

    @property
    def t(self) -> int:
        return self.freqs.shape[0]

    @property
    def beta(self) -> np.ndarray:
        """Real parts of the coefficient exponents."""
        return self.coeffs.real

    def __repr__(self):
        return f"ExpSum(n={self.n}, t={self.t})"

    def __eq__(self, other):
        if not isinstance(other, ExpSum):
            return NotImplemented
        return (self.freqs.shape == other.freqs.shape
                and np.array_equal(self.freqs, other.freqs)
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    @classmethod
    def from_coefficients(cls, freqs, values) -> "ExpSum":
        """Build from nonzero complex multipliers ``c_j`` (``b_j = Log c_j``)."""
        vals = np.asarray(values, dtype=complex).reshape(-1)
        if np.any(vals == 0):
            raise InvalidInputError("coefficients must be nonzero")
        return cls(freqs, np.log(vals))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[float], complex]]) -> "ExpSum":
        terms = list(terms)
        return cls([np.atleast_1d(a) for a, _ in terms], [b for _, b in terms])

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "terms": [
                {"a": [float(x) for x in a], "b_re": float(b.real), "b_im": float(b.imag)}
                for a, b in zip(self.freqs, self.coeffs)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ExpSum":
        try:
            n = int(doc["n"])
            terms = doc["terms"]
            freqs, coeffs = [], []
            for term in terms:
                a = [float(x) for x in term["a"]]
                if len(a) != n:
                    raise InvalidInputError(f"term has {len(a)} frequency entries, expected n={n}")
                freqs.append(a)
                coeffs.append(complex(float(term.get("b_re", 0.0)), float(term.get("b_im", 0.0))))
        except InvalidInputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed ExpSum document: {exc}") from exc
        if n < 1:
            raise InvalidInputError("n must be positive")
        return cls(np.array(freqs, dtype=float).reshape(len(freqs), n), coeffs)

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def loads(cls, text: str) -> "ExpSum":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)


def _min_pairwise(a: np.ndarray) -> float:
    diff = a[:, None, :] - a[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    dist[np.diag_indices(len(a))] = np.inf
    return float(dist.min())


@dataclass(frozen=True)
class Spacing:
    """Minimal frequency spacing.

    ``prefix[k]`` holds the minimal spacing among the ``k + 2`` smallest
    frequencies (univariate sums only, otherwise empty).
    """

    delta: float
    prefix: tuple[float, ...] = ()

    def delta_prefix(self, ell: int) -> float:
        """Spacing among the first ``ell`` frequencies in increasing order."""
        if not self.prefix:
            raise InvalidInputError("prefix spacings exist only for univariate sums")
        if not 2 <= ell <= len(self.prefix) + 1:
            raise InvalidInputError(f"ell must lie in 2..{len(self.prefix) + 1}")
        return self.prefix[ell - 2]


def minimal_spacing(g: ExpSum) -> Spacing:
    delta = _min_pairwise(g.freqs)
    if delta < collision_tol(g.freqs):
        raise DegenerateError("duplicate frequencies")
    prefix: tuple[float, ...] = ()
    if g.n == 1:
        gaps = np.diff(np.sort(g.freqs[:, 0]))
        prefix = tuple(float(x) for x in np.minimum.accumulate(gaps))
    return Spacing(delta, prefix)


def rank_tol(points: np.ndarray) -> float:
    return collision_tol(points)


def affine_dimension(g: ExpSum) -> int:
    """Dimension of the smallest affine subspace containing the frequencies."""
    rel = g.freqs[1:] - g.freqs[0]
    sv = np.linalg.svd(rel, compute_uv=False)
    return int(np.sum(sv > rank_tol(g.freqs)))


def affine_hull_basis(g: ExpSum) -> np.ndarray:
    """Orthonormal basis (rows) of the linear span of ``a_j - a_1``."""
    rel = g.freqs[1:] - g.freqs[0]
    _, sv, vt = np.linalg.svd(rel, full_matrices=False)
    return vt[sv > rank_tol(g.freqs)]


def transform(g: ExpSum, alpha: complex = 1.0, shift=None, beta=None, matrix=None) -> ExpSum:
    """Return h with ``h(z) = alpha * exp(shift . z) * g(matrix @ z + beta)``.

    Frequencies become ``matrix.T @ a_j + shift`` and coefficient exponents
    become ``b_j + a_j . beta + Log(alpha)``.
    """
    if alpha == 0:
        raise InvalidInputError("alpha must be nonzero")
    freqs = g.freqs
    if matrix is not None:
        m = np.array(matrix, dtype=float).reshape(g.n, g.n)
        if not np.all(np.isfinite(m)) or np.linalg.cond(m) > CONDITION_LIMIT:
            raise DegenerateError("singular transformation matrix")
        freqs = freqs @ m
    if shift is not None:
        freqs = freqs + np.asarray(shift, dtype=float).reshape(g.n)
    coeffs = g.coeffs + cmath.log(complex(alpha))
    if beta is not None:
        coeffs = coeffs + g.freqs @ np.asarray(beta, dtype=complex).reshape(g.n)
    return ExpSum(freqs, coeffs)


def merge_log_terms(exponents: np.ndarray) -> complex | None:
    """Log of ``sum(exp(exponents))``, or None when the sum cancels."""
    m = float(np.max(exponents.real))
    s = complex(np.sum(np.exp(exponents - m)))
    if abs(s) <= 1e-12 * len(exponents):
        return None
    return m + cmath.log(s)


def slice_to_line(g: ExpSum, w, theta) -> ExpSum:
    """Restrict g to the complex line ``s -> s*theta + w_perp``.

    ``w_perp`` is the part of ``w`` orthogonal to the unit vector ``theta``.
    Terms whose projected frequencies collide are summed; cancelled sums are
    dropped.
    """
    theta = np.asarray(theta, dtype=float).reshape(g.n)
    w = np.asarray(w, dtype=float).reshape(g.n)
    if abs(np.linalg.norm(theta) - 1.0) > 1e-9:
        raise InvalidInputError("theta must be a unit vector")
    w_perp = w - (w @ theta) * theta
    proj = g.freqs @ theta
    coeffs = g.coeffs + g.freqs @ w_perp
    order = np.argsort(proj, kind="stable")
    tol = collision_tol(proj)
    groups: list[list[int]] = []
    for idx in order:
        if groups and proj[idx] - proj[groups[-1][-1]] < tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    freqs, merged = [], []
    for grp in groups:
        b = coeffs[grp[0]] if len(grp) == 1 else merge_log_terms(coeffs[grp])
        if b is None:
            continue
        freqs.append(float(np.mean(proj[grp])))
        merged.append(b)
    if len(freqs) < 2:
        raise DegenerateError("degenerate slice")
    return ExpSum(np.array(freqs), np.array(merged))


def _exponents(g: ExpSum, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(g.n)
    e = g.freqs @ z + g.coeffs
    if np.max(e.real) > EXP_GUARD:
        raise EvaluationOverflow("evaluation overflow")
    return e


def evaluate(g: ExpSum, z) -> complex:
    """g(z) by direct summation."""
    return complex(np.sum(np.exp(_exponents(g, z))))


def gradient(g: ExpSum, z) -> np.ndarray:
    """Complex gradient of g at z."""
    return np.exp(_exponents(g, z)) @ g.freqs


def derivative(g: ExpSum, z: complex, order: int = 1) -> complex:
    """``order``-th derivative of a univariate sum at z."""
    if g.n != 1:
        raise InvalidInputError("derivative() is univariate; use gradient()")
    return complex(np.sum(g.freqs[:, 0] ** order * np.exp(_exponents(g, z))))


def term_magnitudes_log(g: ExpSum, x) -> np.ndarray:
    """``a_j . x + Re(b_j)`` for a real point x: the log-magnitude of each term."""
    x = np.asarray(x, dtype=float).reshape(g.n)
    return g.freqs @ x + g.beta


def log_binomial(m: int, k: int) -> float:
    return math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)
