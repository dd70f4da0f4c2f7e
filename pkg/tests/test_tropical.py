import math

import numpy as np
import pytest

from exptrop.core import ExpSum, transform
from exptrop.errors import InvalidInputError
from exptrop.lp import enumerate_vertices
from exptrop.tropical import (cell_query, clusters_1d, distance_to_trop, root_free_strips,
                              root_interval, sample_trop_points_2d, trop_edges_2d,
                              trop_points_1d, trop_vertices)

from oracles import brute_trop_1d, point_segment_distance

LOG2, LOG3 = math.log(2), math.log(3)
LINE = ExpSum([[0, 0], [1, 0], [0, 1]], [0, 1j * math.pi, 1j * math.pi])
SQUARED = ExpSum.from_coefficients([0, 1, 2], [1, 2, 1])


def seven_sum():
    j = np.arange(7)
    freqs = np.column_stack([np.cos(2 * np.pi * j / 7), np.sin(2 * np.pi * j / 7)])
    return ExpSum.from_coefficients(freqs, [math.comb(7, int(k)) for k in j])


def normalized(cell):
    rows = []
    for normal, off in cell.halfspaces:
        s = np.linalg.norm(normal)
        rows.append(tuple(np.round(np.append(normal / s, off / s), 9) + 0.0))
    return sorted(rows)


def test_two_term_point():
    g = ExpSum([0.5, 2.5], [1 + 1j, -2])
    assert trop_points_1d(g).points == pytest.approx(((1 - (-2)) / (2.5 - 0.5),))


def test_squared_points():
    assert trop_points_1d(SQUARED).points == pytest.approx((-LOG2, LOG2), abs=1e-9)


def test_single_cluster_point():
    g = ExpSum([5, 1, 0], [0, 0, 0])
    assert trop_points_1d(g).points == (0.0,)


def test_cubed_has_three_points():
    # (e^z+1)^3: the two middle lifted points span a horizontal lower edge
    g = ExpSum.from_coefficients([0, 1, 2, 3], [1, 3, 3, 1])
    pts = trop_points_1d(g).points
    assert pts == pytest.approx((-LOG3, 0.0, LOG3), abs=1e-9)
    assert pts == pytest.approx(tuple(brute_trop_1d([0, 1, 2, 3], g.beta)), abs=1e-9)


def test_points_match_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(40):
        t = int(rng.integers(2, 8))
        a = np.cumsum(rng.uniform(0.5, 2, t))
        g = ExpSum(a, rng.uniform(-3, 3, t))
        brute = brute_trop_1d(a, g.beta)
        assert trop_points_1d(g).points == pytest.approx(tuple(brute), abs=1e-7)


def test_clusters():
    c = clusters_1d(SQUARED)
    assert len(c.components) == 1 and c.s == 2 and c.epsilon == pytest.approx(LOG3)
    comp = c.components[0]
    assert comp.span == 2.0 and (comp.left, comp.right) == (0, 2)
    # Trop = {0, 10}
    g = ExpSum([0, 1, 2], [0, 0, -10])
    assert trop_points_1d(g).points == pytest.approx((0.0, 10.0))
    c = clusters_1d(g)
    assert len(c.components) == 2 and c.s == 1
    assert sum(x.span for x in c.components) == 2.0
    assert clusters_1d(ExpSum([0, 1], [0, 0])).s == 1


def test_spans_telescope():
    rng = np.random.default_rng(2)
    for _ in range(30):
        t = int(rng.integers(2, 9))
        a = np.cumsum(rng.uniform(0.5, 2, t))
        g = ExpSum(a, rng.uniform(-6, 6, t))
        assert sum(c.span for c in clusters_1d(g).components) == pytest.approx(a[-1] - a[0])


def test_root_interval_and_strips():
    assert root_interval(ExpSum([1, 0], [0, 0])) == pytest.approx((-LOG2, LOG2))
    g = ExpSum([0, 1, 2], [0, 0, -10])
    assert root_free_strips(g) == [pytest.approx((LOG3, 10 - LOG3))]
    assert root_free_strips(SQUARED) == []
    assert root_free_strips(ExpSum([0, 3], [0, 1])) == []
    w = trop_points_1d(ExpSum([0, 3], [0, 1])).points[0]
    assert root_interval(ExpSum([0, 3], [0, 1])) == pytest.approx((w - LOG2 / 3, w + LOG2 / 3))


def test_univariate_only():
    with pytest.raises(InvalidInputError):
        trop_points_1d(LINE)


def test_cell_region():
    cell = cell_query(LINE, [-1, -2])
    assert cell.active_set == (0,) and cell.dim == 2
    assert normalized(cell) == [(0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]


def test_cell_ray():
    cell = cell_query(LINE, [2, 2])
    assert cell.active_set == (1, 2) and cell.dim == 1
    s = 1 / math.sqrt(2)
    expected = sorted([(-1.0, 0.0, 0.0), (-round(s, 9), round(s, 9), 0.0),
                       (round(s, 9), -round(s, 9), 0.0)])
    assert normalized(cell) == expected
    assert sum(cell.is_equality) == 2


def test_cell_vertex():
    cell = cell_query(LINE, [0, 0])
    assert cell.active_set == (0, 1, 2) and cell.dim == 0
    assert normalized(cell) == sorted([(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0),
                                       (0.0, 1.0, 0.0), (0.0, -1.0, 0.0)])


def test_cell_contains_query_and_is_dominated_region():
    rng = np.random.default_rng(4)
    g = seven_sum()
    for _ in range(30):
        w = rng.uniform(-5, 5, 2)
        cell = cell_query(g, w)
        assert cell.contains(w)
        assert len(cell.system.units()) <= g.t * (g.t - 1) // 2
        if len(cell.active_set) > 1:
            continue
        j0 = cell.active_set[0]
        # direct evaluation: the cell is where term j0 is maximal
        for x in w + rng.normal(scale=2.0, size=(200, 2)):
            v = g.freqs @ x + g.beta
            margin = v[j0] - np.delete(v, j0).max()
            if abs(margin) > 1e-7:
                assert cell.contains(x, 0.0) == (margin > 0)


def test_vertices():
    assert [v.tolist() for v in trop_vertices(LINE)] == [[0.0, 0.0]]
    assert len(trop_vertices(seven_sum())) == 3
    assert trop_vertices(ExpSum([[0, 0], [1, 1]], [0, 0])) == []


def test_vertices_have_three_active_terms():
    for v in trop_vertices(seven_sum()):
        vals = seven_sum().freqs @ v + seven_sum().beta
        assert np.sum(vals >= vals.max() - 1e-9) >= 3


def test_distance_line():
    for d in (0.5, 1.0, 3.0):
        assert distance_to_trop(LINE, [-d, -d]) == pytest.approx(d)
    assert distance_to_trop(LINE, [2, 2]) == 0.0
    assert distance_to_trop(SQUARED, [3.0]) == pytest.approx(3 - LOG2)


def test_distance_matches_skeleton():
    rng = np.random.default_rng(5)
    g = seven_sum()
    segs = trop_edges_2d(g, ray_length=100.0)
    for w in rng.uniform(-4, 6, size=(100, 2)):
        d = min(point_segment_distance(w, s.start, s.end) for s in segs)
        assert distance_to_trop(g, w) == pytest.approx(d, abs=1e-9)


def test_skeleton_points_are_tropical():
    rng = np.random.default_rng(6)
    g = seven_sum()
    segs = trop_edges_2d(g)
    assert len(segs) == 9
    assert sum(s.bounded for s in segs) == 2
    for w in sample_trop_points_2d(g, 200, rng):
        assert distance_to_trop(g, w) == 0.0


def test_functoriality_scaling():
    g = ExpSum([0, 1, 3], [0, 2, -1])
    h = transform(g, matrix=[[2.0]])
    assert trop_points_1d(h).points == pytest.approx(tuple(p / 2 for p in trop_points_1d(g).points))
    beta = np.array([0.7 - 0.3j, -1.2 + 2j])
    g2 = seven_sum()
    v1 = np.array(trop_vertices(g2))
    v2 = np.array(trop_vertices(transform(g2, beta=beta)))
    assert np.allclose(v2, v1 - beta.real, atol=1e-9)


def test_cell_refinement_keeps_active_set():
    rng = np.random.default_rng(8)
    g = seven_sum()
    for w in trop_vertices(g) + [s for s in sample_trop_points_2d(g, 10, rng)]:
        cell = cell_query(g, w)
        corners = [v.point for v in enumerate_vertices(cell.system)]
        for c in corners:
            for lam in (0.25, 0.5):
                inner = (1 - lam) * np.asarray(w) + lam * c
                assert set(cell.active_set) <= set(cell_query(g, inner).active_set)


def test_tropical_hyperplane_in_three_dimensions():
    g = ExpSum(np.vstack([np.zeros(3), np.eye(3)]), np.zeros(4))
    verts = trop_vertices(g)
    assert len(verts) == 1 and np.allclose(verts[0], 0)
    assert distance_to_trop(g, np.full(3, -1.0)) == pytest.approx(1.0)
    assert distance_to_trop(g, [2.0, 1.0, -5.0]) == pytest.approx(1 / math.sqrt(2))
