"""Work scheduling for the min-space search.

Two schedules are provided. ``LEVEL_SYNC`` examines spaces codimension by
codimension and is implemented in :mod:`minspace.solver`. ``ORDERED`` ranks
the half-spaces by the objective's minimum on their boundary and examines
spaces through a priority queue: a space becomes available once every
immediate superspace has a published record, and available spaces are taken
in order of the rank of their worst half-space.
"""

from __future__ import annotations

import enum
import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_TOL, AffineSpace, Polyhedron, affine_solve, polyhedron_contains
from .objective import StrictlyConvexObjective
from .solver import (
    EMPTY_OR_NO_MIN,
    MINIMIZER,
    ConeMinRecord,
    Provenance,
    SchedulingError,
    SearchCounters,
    SearchState,
    SolveResult,
    cone_superspaces,
    filter_candidate,
    optimize_convex,
    resolve_workers,
)


class ScheduleKind(enum.Enum):
    LEVEL_SYNC = "level"
    ORDERED = "ordered"


@dataclass(frozen=True)
class Schedule:
    kind: ScheduleKind = ScheduleKind.LEVEL_SYNC
    workers: int | None = None  # None: one per CPU, capped by the available work

    @classmethod
    def parse(cls, kind: str = "level", threads: str | int | None = "auto") -> "Schedule":
        workers = None if threads in (None, "auto") else int(threads)
        if workers is not None and workers < 1:
            raise ValueError("threads must be >= 1 or 'auto'")
        return cls(ScheduleKind(kind), workers)


@dataclass(frozen=True)
class HalfspaceOrdering:
    permutation: tuple[int, ...]     # half-space indices, first = lowest position
    boundary_minima: tuple[float, ...]

    def position(self) -> np.ndarray:
        pos = np.empty(len(self.permutation), dtype=np.int64)
        pos[list(self.permutation)] = np.arange(len(self.permutation))
        return pos


def order_halfspaces(p: Polyhedron, obj: StrictlyConvexObjective, tol: float = DEFAULT_TOL) -> HalfspaceOrdering:
    """Rank half-spaces so that one with a smaller boundary minimum comes later.

    Minima that agree to 12 significant digits count as equal and ties are
    broken by index. A boundary without a minimum gets ``+inf``.
    """
    minima = []
    for i in range(p.r):
        space = affine_solve(p, [i], tol)
        m = obj.argmin_affine(space)
        minima.append(float("inf") if m is None else obj.evaluate(m))
    rounded = [v if np.isinf(v) else float(f"{v:.12g}") for v in minima]
    perm = sorted(range(p.r), key=lambda i: (-rounded[i], i))
    return HalfspaceOrdering(tuple(perm), tuple(minima))


def affine_order_key(space_key, position: np.ndarray) -> int:
    """Highest position among the half-spaces of a space; -1 for R^n."""
    if len(space_key) == 0:
        return -1
    return int(position[list(space_key)].max())


def run_ordered(p: Polyhedron, obj: StrictlyConvexObjective, schedule: Schedule,
                tol: float = DEFAULT_TOL) -> SolveResult:
    if obj.dimension != p.dimension:
        raise ValueError(f"objective is {obj.dimension}-d, polyhedron is {p.dimension}-d")
    position = order_halfspaces(p, obj, tol).position()
    state = SearchState()
    counters = state.counters
    counters.affine_minimizations += p.r  # boundary minima used for the ranking
    n = p.dimension
    cache: dict[tuple[int, ...], AffineSpace | None] = {}

    def solve(gens):
        gens = tuple(sorted(gens))
        if gens not in cache:
            cache[gens] = affine_solve(p, gens, tol)
        return cache[gens]

    root = AffineSpace.whole(n)
    m0 = obj.argmin_global()
    counters.affine_minimizations += 1
    root_rec = ConeMinRecord((), m0, None if m0 is None else obj.evaluate(m0), Provenance.COMPUTED, None, root)
    state.publish(root_rec)
    counters.inner_products += p.r
    if m0 is not None and polyhedron_contains(p, m0, tol):
        return SolveResult(MINIMIZER, m0, root_rec.value, (), counters, state.memo)

    spaces: dict[tuple[int, ...], AffineSpace] = {}
    supers: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    pending: dict[tuple[int, ...], int] = {}
    waiting: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    heap: list[tuple[int, tuple[int, ...]]] = []
    tried: set[tuple[int, ...]] = set()

    def push(key):
        heapq.heappush(heap, (affine_order_key(key, position), key))

    def discover(rec: ConeMinRecord):
        b = rec.space
        if b.codim >= n:
            return
        kset = set(b.canonical_key)
        for h in range(p.r):
            if h in kset:
                continue
            gens = tuple(sorted(b.canonical_key + (h,)))
            if gens in tried:
                continue
            tried.add(gens)
            a = solve(gens)
            if a is None or a.codim != b.codim + 1:
                continue
            key = a.canonical_key
            if key in spaces:
                continue
            spaces[key] = a
            sup = cone_superspaces(p, key, tol, solve)
            supers[key] = sup
            todo = [s for s in sup if s not in state.memo]
            pending[key] = len(todo)
            for s in todo:
                waiting.setdefault(s, []).append(key)
            if not todo:
                push(key)

    def examine(key) -> tuple[ConeMinRecord, SearchCounters]:
        missing = [s for s in supers[key] if s not in state.memo]
        if missing:
            raise SchedulingError(f"{key} dispatched before {missing}")
        local = SearchCounters()
        rec = filter_candidate(p, spaces[key], [state.memo[s] for s in supers[key]], obj, tol, local)
        return rec, local

    discover(root_rec)
    workers = resolve_workers(schedule.workers)
    hits: list[tuple[int, tuple[int, ...]]] = []
    best = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while heap:
            if best is not None and heap[0][0] > best[0]:
                break
            batch = [heapq.heappop(heap) for _ in range(min(workers, len(heap)))]
            results = list(pool.map(lambda item: examine(item[1]), batch))
            for (okey, key), (rec, local) in zip(batch, results):
                counters.add(local)
                state.publish(rec)
                if rec.candidate and rec.minimizer is not None:
                    counters.inner_products += p.r
                    if polyhedron_contains(p, rec.minimizer, tol):
                        hits.append((okey, key))
                        best = min(hits)
            for (_, key), (rec, _) in zip(batch, results):
                for w in waiting.pop(key, []):
                    pending[w] -= 1
                    if pending[w] == 0:
                        push(w)
                discover(rec)
    if best is None:
        return SolveResult(EMPTY_OR_NO_MIN, None, None, None, counters, state.memo)
    rec = state.memo[best[1]]
    return SolveResult(MINIMIZER, rec.minimizer, rec.value, rec.key, counters, state.memo)


def execute(p: Polyhedron, obj: StrictlyConvexObjective, schedule: Schedule | None = None,
            tol: float = DEFAULT_TOL) -> SolveResult:
    return optimize_convex(p, obj, schedule or Schedule(), tol)
