"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a numeric mismatch or a
failed check, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .body import BodySpec, InvalidBody
from .lower import (
    ARCCOS_1_8_PUBLISHED,
    FOUR_SQRT2,
    G_TABLE,
    H_MIN_PUBLISHED,
    cap_area_bound,
    euclidean_ball_certificate,
    g_case_c,
    h_min,
    jensen2d_bound,
    lemma_func_checks,
    octahedron_certificate,
    ovr_lower_bound,
    simplex_bound,
)
from .mvee import MonteCarloUnreliable, ovr
from .search import InfeasibleVertexCount, SearchConfig, known_witness, vein_upper
from .transfer import ball_route_bounds, planar_vein_bound

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class ParseError(ValueError):
    pass


@dataclass
class RunRecord:
    command: str
    seed: int
    body: BodySpec | None = None
    certificates: list = field(default_factory=list)
    search: object = None
    payload: dict = field(default_factory=dict)
    timestamp: str = ""
    tool_version: str = __version__

    def to_dict(self):
        return {
            "command": self.command,
            "seed": self.seed,
            "body": self.body.to_dict() if self.body else None,
            "certificates": [c.to_dict() for c in self.certificates],
            "search": self.search.to_dict() if self.search else None,
            "payload": self.payload,
            "timestamp": self.timestamp,
            "tool_version": self.tool_version,
        }


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def persist(record, out_dir):
    """Write ``<out>/<date>/<command>-<seed>.json`` and return its path."""
    now = datetime.now(timezone.utc)
    record.timestamp = now.isoformat(timespec="seconds")
    path = Path(out_dir) / now.date().isoformat() / f"{record.command}-{record.seed}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(record.to_dict()))
    return path


def load_body(path):
    try:
        data = json.loads(Path(path).read_text())
        return BodySpec.from_dict(data)
    except FileNotFoundError as e:
        raise ParseError(f"no such body file: {path}") from e
    except (json.JSONDecodeError, KeyError, TypeError, InvalidBody) as e:
        raise ParseError(f"{path}: {e}") from e


def emit(rows, header, fmt, stream):
    if fmt == "json":
        stream.write(dumps([dict(zip(header, r)) for r in rows]))
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


# -- computations shared by the commands and the acceptance suite -----------

def constant_rows():
    """``(name, computed, paper_value, abs_error)`` for every published constant."""
    rows = []
    for (m, n), published in sorted(G_TABLE.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
        rows.append((f"g({m},{n})", g_case_c(m, n), published))
    rows.append(("h_min", h_min()[1], H_MIN_PUBLISHED))
    rows.append(("jensen2d(4)", jensen2d_bound(4), FOUR_SQRT2))
    rows.append(("simplex_bound(3)", simplex_bound(3), 12.0))
    rows.append(("cap_area_bound(8)", cap_area_bound(8), 64.0 / 6.0))
    rows.append(("arccos(1/8)", math.acos(1.0 / 8.0), ARCCOS_1_8_PUBLISHED))
    return [(name, float(c), p, abs(float(c) - p)) for name, c, p in rows]


def body_bounds(body, seed=0):
    """Lower certificates, upper certificates, the closed-form witness and notices."""
    d = body.dim
    lower, upper, notes = [], [], []
    ball_like = body.kind == "ellipsoid" or (body.kind == "lp_ball" and body.p == 2)
    if ball_like and d in (2, 3):
        lower.append(euclidean_ball_certificate(d))
    if body.kind == "lp_ball" and body.p == 1:
        E = np.eye(d)
        lower.append(octahedron_certificate(np.vstack([E, -E]), assume_contained=True))
    if d == 2:
        lo, up = planar_vein_bound(body)
        lower.append(lo)
        upper.append(up)
    if d in (2, 3):
        lo, up = ball_route_bounds(body)
        lower.append(lo)
        upper.append(up)
    else:
        notes.append(f"ball-route transfer skipped: needs d in (2, 3), got {d}")
    try:
        lower.append(ovr_lower_bound(d, ovr(body, seed=seed)))
    except MonteCarloUnreliable as e:
        notes.append(f"volume-ratio bound skipped: {e}")
    witness = known_witness(body)
    return lower, upper, witness, notes


def sandwich(lower, upper, witness):
    lo = max(c.value for c in lower)
    ups = [c.value for c in upper if c.checked] + [witness.objective]
    return lo, min(ups)


# -- commands ----------------------------------------------------------------

def cmd_verify_constants(args, out):
    rows = constant_rows()
    emit(rows, ["name", "computed", "paper_value", "abs_error"], args.format, out)
    rec = RunRecord("verify-constants", args.seed,
                    payload={"rows": [list(r) for r in rows], "tol": args.tol})
    persist(rec, args.out)
    return EXIT_OK if all(r[3] < args.tol for r in rows) else EXIT_MISMATCH


def cmd_bounds(args, out):
    body = load_body(args.body_file)
    lower, upper, witness, notes = body_bounds(body, seed=args.seed)
    lo, hi = sandwich(lower, upper, witness)
    for note in notes:
        print(f"notice: {note}", file=sys.stderr)
    rows = [(c.side, c.kind, c.value, c.checked) for c in lower + upper]
    rows.append(("upper", witness.source, witness.objective, witness.mode == "certified"))
    emit(rows, ["side", "kind", "value", "checked"], args.format, out)
    print(f"{lo:.6f} <= vein({body.label()}) <= {hi:.6f}", file=sys.stderr)
    rec = RunRecord("bounds", args.seed, body, lower + upper, witness,
                    {"lower_max": lo, "upper_min": hi, "notices": notes})
    persist(rec, args.out)
    return EXIT_OK if lo <= hi + args.tol else EXIT_MISMATCH


def cmd_search(args, out):
    body = load_body(args.body_file)
    n_max = args.n_max if args.n_max is not None else args.n
    cfg = SearchConfig(n_vertices=args.n, restarts=args.restarts, seed=args.seed)
    try:
        res = vein_upper(body, (args.n, n_max), cfg)
    except (InfeasibleVertexCount, ValueError) as e:
        raise ParseError(str(e)) from e
    emit([(body.label(), res.n_vertices, res.objective, res.mode, res.source)],
         ["body", "n", "objective", "mode", "source"], args.format, out)
    rec = RunRecord("search", args.seed, body, search=res,
                    payload={"n_range": [args.n, n_max], "restarts": args.restarts})
    persist(rec, args.out)
    return EXIT_OK


def cmd_lemma_checks(args, out):
    report = lemma_func_checks(grid_step=args.grid_step)
    rows = [(it.name, it.passed, it.worst_value, json.dumps(it.witness, sort_keys=True))
            for it in report.items]
    emit(rows, ["item", "passed", "worst_value", "witness"], args.format, out)
    rec = RunRecord("lemma-checks", args.seed,
                    payload={"grid_step": args.grid_step,
                             "items": [dict(zip(["item", "passed", "worst_value", "witness"], r))
                                       for r in rows]})
    persist(rec, args.out)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_tables(args, out):
    rows = [(m, n, g_case_c(m, n)) for n in (7, 6, 5) for m in range(n - 1)]
    emit(rows, ["m", "n", "g(m,n)"], args.format, out)
    persist(RunRecord("tables", args.seed, payload={"rows": [list(r) for r in rows]}), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="vein", description="Vertex index bounds for symmetric convex bodies.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=5e-4)
    p.add_argument("--out", default="runs", help="directory for run records")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-constants", help="recompute the published constants")
    b = sub.add_parser("bounds", help="lower and upper bounds for one body")
    b.add_argument("body_file")
    s = sub.add_parser("search", help="search for enclosing point sets")
    s.add_argument("body_file")
    s.add_argument("--n", type=int, required=True, help="number of points")
    s.add_argument("--n-max", type=int, default=None, help="search every n up to this")
    s.add_argument("--restarts", type=int, default=8)
    lc = sub.add_parser("lemma-checks", help="numeric checks of the properties of f")
    lc.add_argument("--grid-step", type=float, default=0.01)
    sub.add_parser("tables", help="the g(m, n) table as CSV")
    return p


COMMANDS = {
    "verify-constants": cmd_verify_constants,
    "bounds": cmd_bounds,
    "search": cmd_search,
    "lemma-checks": cmd_lemma_checks,
    "tables": cmd_tables,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if not math.isfinite(args.tol) or args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
