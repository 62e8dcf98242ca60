"""Command line interface: ``minspace <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .geometry import DEFAULT_TOL, Polyhedron, load_vector
from .harness import (
    BenchConfig,
    aggregate,
    brute_force_optimize,
    format_table,
    random_polyhedron,
    random_query_point,
    write_csv,
)
from .nonconvex import FaceLattice, optimize_nonconvex
from .objective import ProjectionObjective, objective_from_dict
from .scheduler import Schedule
from .solver import optimize_convex


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi, *step = (int(v) for v in part.split(":"))
            out.extend(range(lo, hi + 1, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schedule", choices=["level", "ordered"], default="level")
    p.add_argument("--threads", default="auto", help="worker threads, integer or 'auto'")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--canonical", action="store_true",
                   help="omit counters and round numbers so equal answers print identical bytes")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minspace", description="Exact min-space search over polyhedra.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a random polyhedron (with a query point) as JSON")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    for name, help_text in [("project", "project a point onto a polyhedron"),
                            ("optimize", "minimise an objective over a polyhedron"),
                            ("oracle", "brute-force reference solve")]:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("polyhedron", help="polyhedron JSON file ('-' for stdin)")
        s.add_argument("--target", help="query point, e.g. 1,2 (defaults to the file's 'query')")
        s.add_argument("--objective", help="objective JSON file (optimize/oracle)")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--oracle-check", action="store_true", help="also run the brute-force oracle")
        _common(s)

    nc = sub.add_parser("nonconvex", help="minimise over a face-lattice polyhedron")
    nc.add_argument("lattice", help="face lattice JSON file, or 'l-shape'")
    nc.add_argument("--target")
    nc.add_argument("--objective")
    nc.add_argument("--seed", type=int, default=0)
    _common(nc)

    b = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    b.add_argument("--r", default="3:30:3", help="list or lo:hi:step range of r values")
    b.add_argument("--n", default="2:6", help="list or lo:hi range of n values")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--objective-kind", choices=["projection", "quadratic"], default="projection")
    b.add_argument("--oracle-check", action="store_true")
    b.add_argument("--summary", action="store_true", help="print the mean-fraction table to stderr")
    _common(b)
    return parser


def _read(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return json.loads(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _objective(args, data: dict, n: int):
    if getattr(args, "objective", None):
        return objective_from_dict(_read(args.objective))
    if "objective" in data:
        return objective_from_dict(data["objective"])
    if args.target:
        return ProjectionObjective(load_vector(args.target))
    if "query" in data:
        return ProjectionObjective(data["query"])
    raise SystemExit("no objective: pass --target or --objective")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"minspace: error: {exc}", file=sys.stderr)
        return 2


def _run(args) -> int:
    if args.command == "gen":
        p = random_polyhedron(args.r, args.n, args.seed)
        data = p.to_dict()
        data["query"] = random_query_point(args.n, args.seed).tolist()
        _emit(json.dumps(data) + "\n", args.out)
        return 0

    schedule = Schedule.parse(args.schedule, args.threads)
    if args.command in ("project", "optimize", "oracle"):
        data = _read(args.polyhedron)
        p = Polyhedron.from_dict(data)
        if args.command == "project":
            if args.target:
                obj = ProjectionObjective(load_vector(args.target))
            elif "query" in data:
                obj = ProjectionObjective(data["query"])
            else:
                raise ValueError("no target: pass --target or add 'query' to the file")
        else:
            obj = _objective(args, data, p.dimension)
        if args.command == "oracle":
            res = brute_force_optimize(p, obj, args.tol)
        else:
            res = optimize_convex(p, obj, schedule, args.tol)
        out = res.to_dict(canonical=args.canonical, polyhedron=p)
        if args.command != "oracle" and args.oracle_check:
            ref = brute_force_optimize(p, obj, args.tol)
            out["oracle_match"] = ref.status == res.status and (
                not res.found or bool(np.all(np.abs(ref.point - res.point) <= 1e-6)))
        _emit(json.dumps(out) + "\n", args.out)
        return 0

    if args.command == "nonconvex":
        if args.lattice == "l-shape":
            from .lattices import l_shape_lattice

            lattice, data = l_shape_lattice(), {}
        else:
            data = _read(args.lattice)
            lattice = FaceLattice.from_dict(data, args.tol)
        obj = _objective(args, data, lattice.dimension)
        res = optimize_nonconvex(lattice, obj, schedule, args.tol)
        _emit(json.dumps(res.to_dict(canonical=args.canonical)) + "\n", args.out)
        return 0

    if args.command == "bench":
        config = BenchConfig(_int_list(args.r), _int_list(args.n), args.trials, args.seed, schedule,
                             args.objective_kind, args.oracle_check, tol=args.tol)
        from .harness import run_benchmark

        rows = run_benchmark(config)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                write_csv(rows, fh, args.canonical)
        else:
            write_csv(rows, sys.stdout, args.canonical)
        if args.summary:
            print(format_table(aggregate(rows)), file=sys.stderr)
        return 0
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
