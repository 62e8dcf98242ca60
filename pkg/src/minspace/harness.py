"""Random instances, a brute-force oracle and the benchmark grid."""

from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Sequence, TextIO

import numpy as np

from .geometry import DEFAULT_TOL, Polyhedron, affine_solve, polyhedron_contains
from .objective import ProjectionObjective, QuadraticObjective, StrictlyConvexObjective
from .scheduler import Schedule
from .solver import EMPTY_OR_NO_MIN, MINIMIZER, SearchCounters, SolveResult, optimize_convex

CSV_HEADER = ["r", "n", "trial", "seed", "time_ns", "spaces_enumerated", "affine_minimizations",
              "fraction", "status", "oracle_match"]
ORACLE_BUDGET = 10**6
QUERY_RADIUS = 10.0


def lattice_size(r: int, n: int) -> int:
    """Number of generator subsets of size 0..min(n, r)."""
    return sum(comb(r, i) for i in range(min(n, r) + 1))


def random_polyhedron(r: int, n: int, seed: int) -> Polyhedron:
    """``r`` half-spaces ``<v, x> <= 1`` with ``v`` uniform on the unit sphere."""
    if r < 1 or n < 1:
        raise ValueError("r and n must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((r, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return Polyhedron.from_arrays(v, np.ones(r))


def random_query_point(n: int, seed: int, radius: float = QUERY_RADIUS) -> np.ndarray:
    """Uniform point in the open ball of the given radius."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng([seed, 1])
    d = rng.standard_normal(n)
    d /= np.linalg.norm(d)
    return radius * rng.uniform() ** (1.0 / n) * d


def random_spd(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, 2])
    a = rng.standard_normal((n, n))
    return a @ a.T + 0.5 * np.eye(n)


def trial_seed(master: int, r: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, r, n, trial]).generate_state(1, np.uint64)[0])


def make_objective(kind: str, n: int, seed: int) -> StrictlyConvexObjective:
    y = random_query_point(n, seed)
    if kind == "projection":
        return ProjectionObjective(y)
    if kind == "quadratic":
        return QuadraticObjective(random_spd(n, seed), y)
    raise ValueError(f"unknown objective kind {kind!r}")


def brute_force_optimize(p: Polyhedron, obj: StrictlyConvexObjective, tol: float = DEFAULT_TOL,
                         budget: int = ORACLE_BUDGET) -> SolveResult:
    """Minimise over every affine space and keep the best feasible minimiser."""
    total = lattice_size(p.r, p.dimension)
    if total > budget:
        raise ValueError(f"{total} subsets exceed the oracle budget of {budget}")
    counters = SearchCounters()
    best = None
    for i in range(min(p.r, p.dimension) + 1):
        for gens in itertools.combinations(range(p.r), i):
            space = affine_solve(p, gens, tol)
            counters.spaces_enumerated += 1
            if space is None or space.codim != i:
                continue
            m = obj.argmin_affine(space)
            counters.affine_minimizations += 1
            if m is None or not polyhedron_contains(p, m, tol):
                continue
            value = obj.evaluate(m)
            cand = (value, tuple(m), space.canonical_key)
            if best is None or value < best[0] - 1e-12 * max(1.0, abs(best[0])):
                best = cand
            elif value <= best[0] + 1e-12 * max(1.0, abs(best[0])) and cand[1] < best[1]:
                best = cand
    if best is None:
        return SolveResult(EMPTY_OR_NO_MIN, None, None, None, counters)
    return SolveResult(MINIMIZER, np.array(best[1]), best[0], best[2], counters)


def results_match(a: SolveResult, b: SolveResult, atol: float = 1e-6) -> bool:
    if a.status != b.status:
        return False
    if a.status != MINIMIZER:
        return True
    return bool(np.all(np.abs(a.point - b.point) <= atol))


@dataclass
class BenchConfig:
    r_values: Sequence[int]
    n_values: Sequence[int]
    trials: int = 100
    seed: int = 0
    schedule: Schedule = field(default_factory=Schedule)
    objective: str = "projection"
    oracle_check: bool = False
    oracle_budget: int = 20000
    trial_workers: int = 1
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if min(self.r_values) < 1 or min(self.n_values) < 1:
            raise ValueError("r and n must be >= 1")


@dataclass
class TrialResult:
    r: int
    n: int
    trial: int
    seed: int
    time_ns: int
    spaces_enumerated: int
    affine_minimizations: int
    fraction: float
    status: str
    oracle_match: bool | None = None
    point: np.ndarray | None = field(default=None, repr=False)

    def csv_row(self, canonical: bool = False) -> list:
        om = "" if self.oracle_match is None else str(self.oracle_match).lower()
        if canonical:
            return [self.r, self.n, self.trial, self.seed, "", "", "", "", self.status, om]
        return [self.r, self.n, self.trial, self.seed, self.time_ns, self.spaces_enumerated,
                self.affine_minimizations, f"{self.fraction:.10g}", self.status, om]


def run_trial(config: BenchConfig, r: int, n: int, trial: int) -> TrialResult:
    seed = trial_seed(config.seed, r, n, trial)
    p = random_polyhedron(r, n, seed)
    obj = make_objective(config.objective, n, seed)
    t0 = time.perf_counter_ns()
    try:
        res = optimize_convex(p, obj, config.schedule, config.tol)
    except Exception as exc:  # recorded per row, never aborts the batch
        return TrialResult(r, n, trial, seed, time.perf_counter_ns() - t0, 0, 0, 0.0,
                           f"error:{type(exc).__name__}")
    elapsed = time.perf_counter_ns() - t0
    c = res.counters
    match = None
    if config.oracle_check and lattice_size(r, n) <= config.oracle_budget:
        match = results_match(res, brute_force_optimize(p, obj, config.tol, config.oracle_budget))
    return TrialResult(r, n, trial, seed, elapsed, c.spaces_enumerated, c.affine_minimizations,
                       c.affine_minimizations / lattice_size(r, n), res.status, match, res.point)


def run_benchmark(config: BenchConfig) -> list[TrialResult]:
    jobs = [(r, n, t) for r in config.r_values for n in config.n_values for t in range(config.trials)]
    with ThreadPoolExecutor(max_workers=config.trial_workers) as pool:
        rows = list(pool.map(lambda j: run_trial(config, *j), jobs))
    return sorted(rows, key=lambda t: (t.r, t.n, t.trial))


def write_csv(rows: Sequence[TrialResult], out: TextIO, canonical: bool = False) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_row(canonical))


def csv_text(rows: Sequence[TrialResult], canonical: bool = False) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, canonical)
    return buf.getvalue()


def aggregate(rows: Sequence[TrialResult]) -> list[dict]:
    """Per-cell means: wall time in ms and fraction of spaces minimised over."""
    cells: dict[tuple[int, int], list[TrialResult]] = {}
    for row in rows:
        cells.setdefault((row.r, row.n), []).append(row)
    out = []
    for (r, n), group in sorted(cells.items()):
        out.append({
            "r": r, "n": n, "trials": len(group),
            "mean_time_ms": float(np.mean([g.time_ns for g in group])) / 1e6,
            "mean_fraction": float(np.mean([g.fraction for g in group])),
            "mean_affine_minimizations": float(np.mean([g.affine_minimizations for g in group])),
            "oracle_mismatches": sum(1 for g in group if g.oracle_match is False),
        })
    return out


def format_table(cells: Sequence[dict], metric: str = "mean_fraction") -> str:
    """Grid with r down the rows and n across the columns."""
    rs = sorted({c["r"] for c in cells})
    ns = sorted({c["n"] for c in cells})
    lookup = {(c["r"], c["n"]): c[metric] for c in cells}
    lines = ["r\\n " + " ".join(f"{n:>10d}" for n in ns)]
    for r in rs:
        vals = [f"{lookup[(r, n)]:>10.5g}" if (r, n) in lookup else " " * 10 for n in ns]
        lines.append(f"{r:<4d}" + " ".join(vals))
    return "\n".join(lines)
