"""Command-line front end: ``exptrop <subcommand> [options]``.

Exit status is 0 on success, 1 when a verify suite finds violations, 2 on
invalid input and 3 on numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import metric, roots, tropical, verify
from .core import ExpSum, minimal_spacing
from .errors import InvalidInputError, NumericalError


def _floats(text: str, count: int, flag: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"{flag} expects {count} comma-separated numbers") from None
    if len(vals) != count or not all(math.isfinite(v) for v in vals):
        raise InvalidInputError(f"{flag} expects {count} finite comma-separated numbers")
    return vals


def _point(text: str) -> list[float]:
    return _floats(text, len(text.split(",")), "--point")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _read_sum(args) -> ExpSum:
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InvalidInputError(f"cannot read {args.input}: {exc.strerror}") from None
    return ExpSum.loads(text)


def _strip(args) -> tuple[float, float] | None:
    if args.strip is None:
        return None
    u, v = _floats(args.strip, 2, "--strip")
    if v < u:
        raise InvalidInputError("--strip needs u <= v")
    return u, v


def cmd_trop(args) -> dict:
    g = _read_sum(args)
    if g.n == 1:
        doc = {"n": 1, **tropical.trop_points_1d(g).to_dict()}
        doc["clusters"] = tropical.clusters_1d(g).to_dict()
        return doc
    verts = tropical.trop_vertices(g)
    return {
        "n": g.n,
        "vertex_count": len(verts),
        "vertices": [v.tolist() for v in verts],
        "cells": [tropical.cell_query(g, v).to_dict() for v in verts],
    }


def cmd_cells(args) -> dict:
    g = _read_sum(args)
    if args.point is None:
        raise InvalidInputError("cells needs --point")
    w = _point(args.point)
    if len(w) != g.n:
        raise InvalidInputError(f"--point has {len(w)} coordinates, expected {g.n}")
    return {"point": w, **tropical.cell_query(g, w).to_dict()}


def cmd_count(args) -> dict:
    g = _read_sum(args)
    if args.rect is None:
        raise InvalidInputError("count needs --rect x1,x2,u,v")
    rect = roots.Rectangle(*_floats(args.rect, 4, "--rect"))
    res = roots.winding_integral(g, rect, seed=args.seed)
    r = res.rect
    doc = {
        "count": res.count,
        "integral": [res.integral.real, res.integral.imag],
        "rect": [r.x1, r.x2, r.u, r.v],
        "jitters": res.jitters,
        "seed": args.seed,
    }
    if args.isolate:
        doc["roots"] = [z.to_dict() for z in roots.isolate_roots(g, r, seed=args.seed)]
    return doc


def cmd_strips(args) -> dict:
    g = _read_sum(args)
    lo, hi = tropical.root_interval(g)
    return {
        "root_interval": [lo, hi],
        "root_free_strips": [list(s) for s in tropical.root_free_strips(g)],
        "clusters": tropical.clusters_1d(g).to_dict(),
    }


def cmd_bounds(args) -> dict:
    g = _read_sum(args)
    strip = _strip(args)
    doc = metric.bounds(g).to_dict()
    if strip is not None:
        if g.n != 1:
            raise InvalidInputError("--strip needs a univariate sum")
        u, v = strip
        doc["strip"] = [u, v]
        doc["wv_bound"] = roots.wv_bound(g, u, v).to_dict()
        doc["cluster_counts"] = [
            {"w_min": c.w_min, "w_max": c.w_max, **ci.to_dict()}
            for c, ci in roots.strip_count_bounds(g, u, v)
        ]
    return doc


def cmd_verify(args) -> dict:
    if args.suite not in verify.SUITES:
        raise InvalidInputError(f"unknown suite {args.suite!r}; choose from {sorted(verify.SUITES)}")
    return verify.run_suite(args.suite, args.seed)


def cmd_witness(args) -> dict:
    if args.t is None or args.n is None or args.delta is None:
        raise InvalidInputError("witness needs --t, --n and --delta")
    return metric.witness_family(args.t, args.n, args.delta).to_dict()


def cmd_plotdata(args) -> str:
    g = _read_sum(args)
    if g.n != 2:
        raise InvalidInputError("plotdata needs a bivariate sum")
    delta = minimal_spacing(g).delta
    segs = tropical.trop_edges_2d(g)
    buf = io.StringIO()
    buf.write(f"# t={g.t} n={g.n} delta={delta!r}\n")
    buf.write(f"# band_radius={math.log(g.t - 1) / delta!r}\n")
    buf.write(f"# vertices={len(tropical.trop_vertices(g))} segments={len(segs)}\n")
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["segment_id", "x1", "y1", "x2", "y2"])
    for k, s in enumerate(segs):
        out.writerow([k, *(repr(float(x)) for x in (*s.start, *s.end))])
    return buf.getvalue()


COMMANDS = {
    "trop": cmd_trop,
    "cells": cmd_cells,
    "count": cmd_count,
    "strips": cmd_strips,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "witness": cmd_witness,
    "plotdata": cmd_plotdata,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exptrop",
                                     description="Tropical geometry of exponential sums.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", help="ExpSum JSON file (default: stdin)")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        return p

    add("trop", "tropical points, clusters or vertices")
    add("cells", "cell of the tropical complex containing a point").add_argument("--point")
    p = add("count", "root count in a rectangle by the argument principle")
    p.add_argument("--rect", help="x1,x2,u,v")
    p.add_argument("--isolate", action="store_true", help="also list the roots")
    add("strips", "root interval, root-free strips and clusters")
    add("bounds", "distance bounds; with --strip also count intervals").add_argument(
        "--strip", help="u,v")
    add("verify", "run a seeded self-check suite").add_argument(
        "--suite", required=True, help=", ".join(verify.SUITES))
    p = add("witness", "the tightness witness family as ExpSum JSON")
    p.add_argument("--t", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float)
    add("plotdata", "CSV of the tropical 1-skeleton of a bivariate sum")
    return parser


VALUE_FLAGS = ("--point", "--rect", "--strip", "--delta")


def _attach_values(argv: list[str]) -> list[str]:
    """Rewrite ``--rect -1,1,2,4`` as ``--rect=-1,1,2,4`` so argparse does not
    take a negative value for an option."""
    out, k = [], 0
    while k < len(argv):
        if argv[k] in VALUE_FLAGS and k + 1 < len(argv):
            out.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
        else:
            out.append(argv[k])
            k += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        result = COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"exptrop {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"exptrop {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    text = result if isinstance(result, str) else json.dumps(result, indent=2, default=_jsonable) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and result["violations"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
