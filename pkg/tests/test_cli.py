import json
import math
import subprocess
import sys

import numpy as np
import pytest

from exptrop import roots
from exptrop.cli import main
from exptrop.core import ExpSum
from exptrop.errors import QuadratureError

LOG2 = math.log(2)


def seven_sum():
    j = np.arange(7)
    freqs = np.column_stack([np.cos(2 * np.pi * j / 7), np.sin(2 * np.pi * j / 7)])
    return ExpSum.from_coefficients(freqs, [math.comb(7, int(k)) for k in j])


@pytest.fixture
def write_sum(tmp_path):
    def write(g, name="g.json"):
        path = tmp_path / name
        path.write_text(g.dumps())
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trop_seven_sum(capsys, write_sum):
    code, out, _ = run(capsys, "trop", "--input", write_sum(seven_sum()))
    doc = json.loads(out)
    assert code == 0 and doc["vertex_count"] == 3


def test_trop_univariate(capsys, write_sum):
    g = ExpSum.from_coefficients([0, 1, 2], [1, 2, 1])
    code, out, _ = run(capsys, "trop", "--input", write_sum(g))
    assert code == 0
    assert json.loads(out)["points"] == pytest.approx([-LOG2, LOG2])


def test_bounds_and_strip(capsys, write_sum):
    code, out, _ = run(capsys, "bounds", "--input", write_sum(seven_sum()))
    assert code == 0 and json.loads(out)["bound_1a"] == pytest.approx(2.064792, abs=1e-6)
    path = write_sum(ExpSum([1, 0], [0, 0]))
    code, out, _ = run(capsys, "bounds", "--input", path, "--strip", "0,6.283185307179586")
    doc = json.loads(out)
    assert doc["wv_bound"]["center"] == pytest.approx(1.0)
    code, _, err = run(capsys, "bounds", "--input", path, "--strip", "2,1")
    assert code == 2 and "--strip" in err


def test_cells_point(capsys, write_sum):
    line = ExpSum([[0, 0], [1, 0], [0, 1]], [0, 1j * math.pi, 1j * math.pi])
    code, out, _ = run(capsys, "cells", "--input", write_sum(line), "--point", "-1,-2")
    doc = json.loads(out)
    assert code == 0 and doc["active_set"] == [0] and doc["point"] == [-1.0, -2.0]
    code, _, _ = run(capsys, "cells", "--input", write_sum(line), "--point", "1")
    assert code == 2


def test_count_negative_rect(capsys, write_sum):
    path = write_sum(ExpSum([1, 0], [0, 0]))
    code, out, _ = run(capsys, "count", "--input", path, "--rect", "-1,1,2,4", "--isolate")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 1
    [root] = doc["roots"]
    assert root["multiplicity"] == 1


def test_count_rejects_bad_rect(capsys, write_sum):
    path = write_sum(ExpSum([1, 0], [0, 0]))
    assert run(capsys, "count", "--input", path, "--rect", "1,0,2,4")[0] == 2
    assert run(capsys, "count", "--input", path, "--rect", "a,b")[0] == 2


def test_invalid_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"freqs": [[0], [0]], "coeffs": [[1, 0], [1, 0]]}')
    code, out, err = run(capsys, "trop", "--input", str(bad))
    assert code == 2 and out == "" and err.startswith("exptrop trop:")
    bad.write_text("not json")
    assert run(capsys, "strips", "--input", str(bad))[0] == 2
    assert run(capsys, "trop", "--input", str(tmp_path / "missing.json"))[0] == 2


def test_numerical_failure_exit_code(capsys, write_sum, monkeypatch):
    # jitter retries rescue any real boundary root, so inject the failure
    def fail(*args, **kwargs):
        raise QuadratureError("no convergence")
    monkeypatch.setattr(roots, "winding_integral", fail)
    path = write_sum(ExpSum([1, 0], [0, 0]))
    code, out, err = run(capsys, "count", "--input", path, "--rect", "-1,1,2,4")
    assert code == 3 and out == "" and "numerical failure" in err


def test_witness_and_output_file(capsys, tmp_path):
    target = tmp_path / "w.json"
    code, out, _ = run(capsys, "witness", "--t", "3", "--n", "1", "--delta", "1",
                       "--output", str(target))
    assert code == 0 and out == ""
    g = ExpSum.loads(target.read_text())
    assert np.allclose(g.beta, [0, LOG2, 0])
    assert run(capsys, "witness", "--t", "3")[0] == 2


def test_verify_is_deterministic(capsys):
    code, first, _ = run(capsys, "verify", "--suite", "simplex", "--seed", "3")
    assert code == 0
    assert run(capsys, "verify", "--suite", "simplex", "--seed", "3")[1] == first
    assert json.loads(first)["violations"] == 0
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_plotdata(capsys, write_sum):
    code, out, _ = run(capsys, "plotdata", "--input", write_sum(seven_sum()))
    lines = out.splitlines()
    assert code == 0
    assert [ln[0] for ln in lines[:3]] == ["#"] * 3
    assert lines[3] == "segment_id,x1,y1,x2,y2"
    rows = [ln.split(",") for ln in lines[4:]]
    assert len(rows) == 9 and all(len(r) == 5 for r in rows)
    assert run(capsys, "plotdata", "--input", write_sum(ExpSum([0, 1], [0, 0])))[0] == 2


def test_pipe_round_trip():
    cmd = [sys.executable, "-m", "exptrop"]
    wit = subprocess.run(cmd + ["witness", "--t", "4", "--n", "1", "--delta", "1"],
                         capture_output=True, text=True, check=True)
    res = subprocess.run(cmd + ["trop"], input=wit.stdout, capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["points"] == pytest.approx([-math.log(3), 0, math.log(3)])
