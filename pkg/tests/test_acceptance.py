"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py`` or as a script; either way a
PASS/FAIL line per criterion is printed at the end.
"""
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from exptrop.core import ExpSum, minimal_spacing, transform
from exptrop.metric import sampled_hausdorff
from exptrop.roots import Rectangle, isolate_roots, winding_count, wv_bound
from exptrop.tropical import cell_query, root_interval, trop_points_1d
from exptrop.verify import run_suite, seven_sum

from oracles import polynomial_roots

LOG2 = math.log(2)
PI = math.pi
EXPTROP = [sys.executable, "-m", "exptrop"]


def _cli(*argv, stdin=None):
    res = subprocess.run(EXPTROP + list(argv), input=stdin, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout)


def _clean(report):
    failing = {k: v for k, v in report["checks"].items() if v["violations"]}
    assert report["violations"] == 0, failing
    assert all(v["checked"] > 0 for v in report["checks"].values())


def test_criterion_01_seven_sum():
    text = seven_sum().dumps()
    start = time.perf_counter()
    trop = _cli("trop", stdin=text)
    rep = _cli("bounds", stdin=text)
    elapsed = time.perf_counter() - start
    assert trop["vertex_count"] == 3
    assert abs(rep["bound_1a"] - 2.0649) <= 0.001
    assert rep["bound_1a"] < 2.065
    assert elapsed < 10.0


def test_criterion_02_squared():
    g = ExpSum.from_coefficients([0, 1, 2], [1, 2, 1])
    pts = trop_points_1d(g).points
    assert len(pts) == 2
    assert abs(pts[0] + LOG2) <= 1e-9 and abs(pts[1] - LOG2) <= 1e-9
    rect = Rectangle(-1, 1, 0, 8 * PI)
    found = isolate_roots(g, rect)
    assert sum(r.multiplicity for r in found) == 8
    assert all(abs(r.z.real) <= 1e-8 for r in found)
    # independent check of location and multiplicity
    expected = polynomial_roots([0, 1, 2], g.coeffs, 0, 8 * PI)
    assert len(expected) == 8
    for z in expected:
        assert min(abs(z - r.z) for r in found) < 1e-6
    est = sampled_hausdorff(g)
    assert abs(est.hausdorff - LOG2) <= 1e-6
    assert abs(est.hausdorff - math.log(g.t - g.n) / minimal_spacing(g).delta) <= 1e-6


def test_criterion_03_quintic():
    g = ExpSum([5, 1, 0], [0, 0, 0])
    assert trop_points_1d(g).points == (0.0,)
    lo, hi = root_interval(g)
    v = 2 * PI * 3
    found = isolate_roots(g, Rectangle(lo, hi, 0, v))
    reals = sorted(r.z.real for r in found)
    groups = [[reals[0]]]
    for x in reals[1:]:
        if x - groups[-1][-1] <= 1e-6:
            groups[-1].append(x)
        else:
            groups.append([x])
    assert len(groups) == math.ceil(5 / 2)
    oracle = sorted(z.real for z in polynomial_roots([5, 1, 0], g.coeffs, 0, v))
    assert len(oracle) == len(reals)
    assert np.allclose(oracle, reals, atol=1e-8)
    total = winding_count(g, Rectangle(lo, hi, 0, v))
    assert total == len(reals) == 15
    assert wv_bound(g, 0, v).contains(total)


def test_criterion_04_univariate_suite():
    start = time.perf_counter()
    report = run_suite("univariate", 0)
    assert time.perf_counter() - start < 300
    assert report["instances"] == 100
    _clean(report)
    for name in ("near_trop", "root_interval", "root_free", "wv_count", "cluster_joint",
                 "trop_near_root", "nearest_trop"):
        assert name in report["checks"]


def test_criterion_05_domination():
    report = run_suite("domination", 0)
    _clean(report)
    assert {"domination_N1", "domination_N2", "domination_N4"} <= set(report["checks"])
    assert all(v["checked"] == 100 * 100 for v in report["checks"].values())


def _normalized(cell):
    rows = []
    for normal, off in cell.halfspaces:
        s = np.linalg.norm(normal)
        rows.append(tuple(np.round(np.append(normal / s, off / s), 9) + 0.0))
    return sorted(rows)


def test_criterion_06_simplex():
    report = run_suite("simplex", 0)
    _clean(report)
    assert report["points"] == 1000
    line = ExpSum([[0, 0], [1, 0], [0, 1]], [0, 1j * PI, 1j * PI])
    s = round(1 / math.sqrt(2), 9)
    expected = {
        (-1.0, -2.0): [(0.0, 1.0, 0.0), (1.0, 0.0, 0.0)],
        (2.0, 2.0): sorted([(-1.0, 0.0, 0.0), (-s, s, 0.0), (s, -s, 0.0)]),
        (0.0, 0.0): sorted([(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, -1.0, 0.0)]),
    }
    for point, rows in expected.items():
        assert _normalized(cell_query(line, point)) == rows


def test_criterion_07_functoriality():
    report = run_suite("functoriality", 0)
    _clean(report)
    assert sum(v["checked"] for v in report["checks"].values()) == 50


def test_criterion_08_projection():
    report = run_suite("metric", 0)
    _clean(report)
    assert report["checks"]["projection_spacing"]["checked"] == 1000
    assert report["median_draws"] <= 2


def test_criterion_09_lp():
    report = run_suite("lp", 0)
    _clean(report)
    assert report["systems"] == 100


def test_criterion_10_winding():
    report = run_suite("winding", 0)
    _clean(report)
    assert report["checks"]["additivity"]["checked"] == 50
    assert report["skipped"] == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
