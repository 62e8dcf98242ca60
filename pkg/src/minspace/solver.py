"""Min-space search over the affine spaces of a convex polyhedron.

The search walks the lattice of hyperplane intersections by codimension.
Every space ``A`` gets the minimiser of the objective over its cone ``P_A``
(the half-spaces whose boundary contains ``A``). That minimiser is inherited
from an immediate superspace whenever the superspace's cone minimiser lies
strictly inside the new half-spaces; otherwise ``A`` is a candidate and is
minimised directly. The first candidate minimiser that is feasible for the
whole polyhedron is the answer.
"""

from __future__ import annotations

import bisect
import enum
import itertools
import threading
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geometry import (
    DEFAULT_TOL,
    RANK_EPS,
    AffineSpace,
    Location,
    Polyhedron,
    affine_solve,
    contains_many,
    halfspace_contains,
)
from .objective import ProjectionObjective, StrictlyConvexObjective

MINIMIZER = "minimizer"
EMPTY_OR_NO_MIN = "empty_or_no_min"


class SchedulingError(RuntimeError):
    """A space was examined before the records it depends on were published."""


class Provenance(enum.Enum):
    COMPUTED = "computed"
    INHERITED = "inherited"
    ON_BOUNDARY = "on_boundary"


@dataclass(frozen=True, eq=False)
class ConeMinRecord:
    key: tuple[int, ...]
    minimizer: np.ndarray | None
    value: float | None
    provenance: Provenance
    source: tuple[int, ...] | None = None
    space: AffineSpace | None = None
    examined: bool = True

    @property
    def candidate(self) -> bool:
        return self.provenance is not Provenance.INHERITED


@dataclass
class SearchCounters:
    inner_products: int = 0
    affine_minimizations: int = 0
    spaces_enumerated: int = 0
    degenerate_collisions: int = 0

    def add(self, other: "SearchCounters") -> None:
        self.inner_products += other.inner_products
        self.affine_minimizations += other.affine_minimizations
        self.spaces_enumerated += other.spaces_enumerated
        self.degenerate_collisions += other.degenerate_collisions

    def to_dict(self) -> dict:
        return {
            "inner_products": self.inner_products,
            "affine_minimizations": self.affine_minimizations,
            "spaces_enumerated": self.spaces_enumerated,
            "degenerate_collisions": self.degenerate_collisions,
        }


@dataclass
class SearchState:
    """Write-once memo of cone records shared by the per-space engines."""

    memo: dict = field(default_factory=dict)
    counters: SearchCounters = field(default_factory=SearchCounters)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def publish(self, record: ConeMinRecord) -> None:
        with self.lock:
            if record.key in self.memo:
                raise SchedulingError(f"record for {record.key} published twice")
            self.memo[record.key] = record
            self.counters.spaces_enumerated += 1


@dataclass
class SolveResult:
    status: str
    point: np.ndarray | None
    value: float | None
    min_space: tuple[int, ...] | None
    counters: SearchCounters
    records: Mapping = field(default_factory=dict, repr=False)

    @property
    def found(self) -> bool:
        return self.status == MINIMIZER

    def to_dict(self, canonical: bool = False, polyhedron: Polyhedron | None = None) -> dict:
        """JSON-ready dict. ``canonical`` drops schedule-dependent fields.

        In canonical form the point and value are rounded to 10 significant
        digits and the min space is replaced by the active set at the point
        (requires ``polyhedron``), so equal answers serialise identically.
        """
        if not self.found:
            out = {"status": self.status, "point": None, "value": None, "min_space": None}
            if not canonical:
                out["counters"] = self.counters.to_dict()
            return out
        if canonical:
            point = [_round_sig(v) for v in self.point]
            value = _round_sig(self.value)
            min_space = list(active_set(polyhedron, self.point)) if polyhedron is not None else None
            return {"status": self.status, "point": point, "value": value, "min_space": min_space}
        return {
            "status": self.status,
            "point": self.point.tolist(),
            "value": self.value,
            "min_space": list(self.min_space),
            "counters": self.counters.to_dict(),
        }


def _round_sig(v: float, digits: int = 10) -> float:
    out = float(f"{float(v):.{digits}g}")
    return 0.0 if out == 0 else out


def active_set(p: Polyhedron, x, tol: float = 1e-7) -> tuple[int, ...]:
    slack = p.normals @ x - p.offsets
    scale = np.maximum(1.0, p.normal_norms * np.linalg.norm(x))
    return tuple(int(i) for i in np.flatnonzero(np.abs(slack) <= tol * scale))


# ----------------------------------------------------------------------------
# per-space operations


def immediate_superspaces(p: Polyhedron, space: AffineSpace, tol: float = DEFAULT_TOL) -> list[tuple[int, ...]]:
    """Canonical keys of the spaces spanned by all-but-one of the generators."""
    if space.codim < 1:
        raise ValueError("the whole space has no superspaces")
    out = set()
    for g in space.generators:
        b = affine_solve(p, [x for x in space.generators if x != g], tol)
        if b is not None and b.codim < space.codim:
            out.add(b.canonical_key)
    return sorted(out)


def cone_superspaces(p: Polyhedron, key: Sequence[int], tol: float = DEFAULT_TOL,
                     solve=None) -> list[tuple[int, ...]]:
    """Immediate superspaces of the apex of the cone ``key``, as cone keys.

    Unlike :func:`immediate_superspaces` this takes every independent basis of
    ``key`` into account, which matters when more hyperplanes than the
    codimension pass through the apex. Superspace keys are restricted to
    ``key``; for a canonical key that restriction is a no-op.
    """
    if solve is None:
        def solve(g):
            return affine_solve(p, g, tol)
    key = tuple(sorted(key))
    apex = solve(key)
    if apex is None:
        raise ValueError(f"hyperplanes {key} do not intersect")
    rank = apex.codim
    if rank == 0:
        return []
    if len(key) == rank:
        bases = [key]
    else:
        bases = []
        for c in itertools.combinations(key, rank):
            s = solve(c)
            if s is not None and s.codim == rank:
                bases.append(c)
    kset = set(key)
    out = set()
    for basis in bases:
        for g in basis:
            b = solve(tuple(x for x in basis if x != g))
            out.add(tuple(i for i in b.canonical_key if i in kset))
    return sorted(out)


def filter_candidate(p: Polyhedron, space: AffineSpace, superspace_records: Iterable[ConeMinRecord | None],
                     obj: StrictlyConvexObjective, tol: float = DEFAULT_TOL,
                     counters: SearchCounters | None = None) -> ConeMinRecord:
    """Decide whether ``space`` is a candidate and return its cone record.

    A superspace whose cone minimiser sits strictly inside every half-space
    that ``space`` adds disqualifies it, and the minimiser is inherited. If
    the minimiser sits on all those boundaries it already lies in ``space``
    and is reused without a solve. Otherwise the objective is minimised on
    ``space`` directly.
    """
    counters = counters if counters is not None else SearchCounters()
    key = space.canonical_key
    kset = set(key)
    records = list(superspace_records)
    if any(r is None for r in records):
        raise SchedulingError(f"missing superspace record for {key}")
    for rec in sorted(records, key=lambda r: r.key):
        if not set(rec.key) < kset:
            raise ValueError(f"{rec.key} is not a superspace of {key}")
        if rec.minimizer is None:
            continue
        new = sorted(kset - set(rec.key))
        locs = {halfspace_contains(p.halfspaces[i], rec.minimizer, tol) for i in new}
        counters.inner_products += len(new)
        if locs == {Location.INSIDE}:
            return ConeMinRecord(key, rec.minimizer, rec.value, Provenance.INHERITED, rec.key, space)
        if locs == {Location.ON_BOUNDARY}:
            return ConeMinRecord(key, rec.minimizer, rec.value, Provenance.ON_BOUNDARY, rec.key, space)
    m = obj.argmin_affine(space)
    counters.affine_minimizations += 1
    value = None if m is None else obj.evaluate(m)
    return ConeMinRecord(key, m, value, Provenance.COMPUTED, None, space)


# ----------------------------------------------------------------------------
# level-synchronous search

_COMPUTED, _INHERITED, _ON_BOUNDARY, _SKIP = 0, 1, 2, -1
_PROVENANCE = {_COMPUTED: Provenance.COMPUTED, _INHERITED: Provenance.INHERITED,
               _ON_BOUNDARY: Provenance.ON_BOUNDARY}
CHUNK_ROWS = 32768


@dataclass
class _Level:
    combos: np.ndarray          # (C, i) generator subsets in lexicographic order
    valid: np.ndarray           # (C,) full rank, i.e. a genuine codim-i space
    basis: np.ndarray | None    # (C, i, n) orthonormal rows spanning the normals
    anchor: np.ndarray          # (C, n) minimum-norm point of the flat
    rid: np.ndarray             # (C,) record id, -1 when skipped
    row_of_rank: np.ndarray     # colex rank -> row


class _Records:
    """Columnar record store; record ids are global and dense."""

    def __init__(self, dimension: int):
        self.n = dimension
        self.offsets: list[int] = []     # first rid of each level
        self.pid: list[np.ndarray] = []  # point id per record, -1 when no minimum
        self.prov: list[np.ndarray] = []
        self.src: list[np.ndarray] = []
        self.row: list[np.ndarray] = []  # representative row in the level
        self.alias_key: dict[int, tuple[int, ...]] = {}
        self.key_rid: dict[tuple[int, ...], int] = {}
        self.points = np.zeros((0, dimension))
        self.values = np.zeros(0)
        self.total = 0
        self.pid_all = np.zeros(0, dtype=np.int64)

    def add_points(self, pts: list[np.ndarray], vals: list[float]) -> int:
        first = self.points.shape[0]
        if pts:
            self.points = np.vstack([self.points, np.stack(pts)])
            self.values = np.concatenate([self.values, np.asarray(vals, dtype=float)])
        return first

    def add_level(self, pid, prov, src, row):
        self.offsets.append(self.total)
        self.pid.append(pid)
        self.prov.append(prov)
        self.src.append(src)
        self.row.append(row)
        self.total += pid.size
        self.pid_all = np.concatenate([self.pid_all, pid])

    def locate(self, rid: int) -> tuple[int, int]:
        level = bisect.bisect_right(self.offsets, rid) - 1
        return level, rid - self.offsets[level]


class LevelRecords(Mapping):
    """Read-only ``canonical key -> ConeMinRecord`` view of a level search."""

    def __init__(self, search: "_LevelSync"):
        self._s = search

    def _rid(self, key) -> int:
        key = tuple(int(k) for k in key)
        s = self._s
        if key in s.rec.key_rid:
            return s.rec.key_rid[key]
        i = len(key)
        if i >= len(s.levels) or (i and (min(key) < 0 or max(key) >= s.r or list(key) != sorted(set(key)))):
            raise KeyError(key)
        level = s.levels[i]
        row = int(level.row_of_rank[s.colex_rank(np.asarray([key], dtype=np.int64))[0]]) if i else 0
        rid = int(level.rid[row])
        if rid < 0 or rid in s.rec.alias_key:
            raise KeyError(key)
        return rid

    def __getitem__(self, key) -> ConeMinRecord:
        return self._s.record(self._rid(key))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for rid in range(self._s.rec.total):
            yield self._s.key_of(rid)

    def __len__(self) -> int:
        return self._s.rec.total


class _LevelSync:
    def __init__(self, p: Polyhedron, obj: StrictlyConvexObjective, tol: float, workers: int):
        if obj.dimension != p.dimension:
            raise ValueError(f"objective is {obj.dimension}-d, polyhedron is {p.dimension}-d")
        self.p, self.obj, self.tol, self.workers = p, obj, tol, workers
        self.r, self.n = p.r, p.dimension
        self.max_level = min(self.n, self.r)
        self.binom = np.array([[comb(v, k) for k in range(self.max_level + 2)] for v in range(self.r + 1)],
                              dtype=np.int64)
        self.rec = _Records(self.n)
        self.levels: list[_Level] = []
        self.counters = SearchCounters()

    # -- bookkeeping ---------------------------------------------------------

    def colex_rank(self, combos: np.ndarray) -> np.ndarray:
        k = combos.shape[1]
        if k == 0:
            return np.zeros(combos.shape[0], dtype=np.int64)
        return self.binom[combos, np.arange(1, k + 1)].sum(axis=1)

    def key_of(self, rid: int) -> tuple[int, ...]:
        if rid in self.rec.alias_key:
            return self.rec.alias_key[rid]
        level, local = self.rec.locate(rid)
        row = self.rec.row[level][local]
        return tuple(int(v) for v in self.levels[level].combos[row])

    def record(self, rid: int) -> ConeMinRecord:
        level, local = self.rec.locate(rid)
        pid = int(self.rec.pid[level][local])
        prov = _PROVENANCE[int(self.rec.prov[level][local])]
        src = int(self.rec.src[level][local])
        point = None if pid < 0 else self.rec.points[pid].copy()
        value = None if pid < 0 else float(self.rec.values[pid])
        return ConeMinRecord(self.key_of(rid), point, value, prov, self.key_of(src) if src >= 0 else None)

    def _contains(self, pts: np.ndarray) -> np.ndarray:
        self.counters.inner_products += pts.shape[0] * self.r
        return contains_many(self.p, pts, self.tol)

    # -- search --------------------------------------------------------------

    def run(self) -> SolveResult:
        n = self.n
        m0 = self.obj.argmin_global()
        self.counters.affine_minimizations += 1
        pid0 = -1
        if m0 is not None:
            pid0 = self.rec.add_points([m0], [self.obj.evaluate(m0)])
        self.rec.add_level(np.array([pid0]), np.array([_COMPUTED], dtype=np.int8),
                           np.array([-1]), np.array([0]))
        self.levels.append(_Level(np.zeros((1, 0), dtype=np.int64), np.array([True]),
                                  np.zeros((1, 0, n)), np.zeros((1, n)), np.array([0]),
                                  np.array([0])))
        self.counters.spaces_enumerated = 1
        if m0 is not None and self._contains(m0[None, :])[0]:
            return self._result(0)
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            for i in range(1, self.max_level + 1):
                hit = self._level(i, pool)
                if hit is not None:
                    return self._result(hit)
                if not self.levels[-1].valid.any():
                    break
        return SolveResult(EMPTY_OR_NO_MIN, None, None, None, self.counters, LevelRecords(self))

    def _result(self, rid: int) -> SolveResult:
        rec = self.record(rid)
        return SolveResult(MINIMIZER, rec.minimizer, rec.value, rec.key, self.counters, LevelRecords(self))

    def _level(self, i: int, pool: ThreadPoolExecutor) -> int | None:
        prev = self.levels[i - 1]
        last = prev.combos[:, -1] if i > 1 else np.array([-1])
        counts = (self.r - 1 - last).astype(np.int64)
        starts = np.concatenate([[0], np.cumsum(counts)])
        bounds = []
        p0 = 0
        while p0 < counts.size:
            p1 = p0 + 1
            while p1 < counts.size and starts[p1 + 1] - starts[p0] <= CHUNK_ROWS:
                p1 += 1
            bounds.append((p0, p1))
            p0 = p1
        keep_basis = i < self.max_level
        parts = list(pool.map(lambda b: self._expand(prev, i, counts, b[0], b[1], keep_basis), bounds))

        combos = np.concatenate([c["combos"] for c in parts])
        valid = np.concatenate([c["valid"] for c in parts])
        anchor = np.concatenate([c["anchor"] for c in parts])
        basis = np.concatenate([c["basis"] for c in parts]) if keep_basis else None
        kind = np.concatenate([c["kind"] for c in parts])
        src = np.concatenate([c["src"] for c in parts])
        offsets = np.cumsum([0] + [c["combos"].shape[0] for c in parts])
        computed: dict[int, np.ndarray | None] = {}
        extras: list[tuple[int, tuple[int, ...]]] = []
        for off, c in zip(offsets, parts):
            self.counters.inner_products += c["inner_products"]
            self.counters.affine_minimizations += c["affine_minimizations"]
            computed.update({off + k: v for k, v in c["computed"].items()})
            extras.extend((off + k, v) for k, v in c["extras"])
        self.counters.degenerate_collisions += int((~valid).sum())

        # records for generic rows, in row order
        rid = np.full(combos.shape[0], -1, dtype=np.int64)
        generic = np.flatnonzero(kind != _SKIP)
        base = self.rec.total
        rid[generic] = base + np.arange(generic.size)
        lvl_pid = np.full(generic.size, -1, dtype=np.int64)
        inh = kind[generic] != _COMPUTED
        lvl_pid[inh] = self.rec.pid_all[src[generic][inh]]
        new_pts, new_vals, new_pos = [], [], []
        for pos in np.flatnonzero(~inh):
            m = computed[int(generic[pos])]
            if m is not None:
                new_pos.append(pos)
                new_pts.append(m)
                new_vals.append(self.obj.evaluate(m))
        first = self.rec.add_points(new_pts, new_vals)
        lvl_pid[new_pos] = first + np.arange(len(new_pos))
        lvl_prov = kind[generic].astype(np.int8)
        lvl_src = src[generic]
        lvl_row = generic

        # spaces with extra hyperplanes through them: one record per canonical key
        groups: dict[tuple[int, ...], list[int]] = {}
        for row, extra in extras:
            key = tuple(sorted(set(int(v) for v in combos[row]) | set(extra)))
            groups.setdefault(key, []).append(row)
        alias_records = []
        for key in sorted(groups):
            rows = groups[key]
            self.counters.degenerate_collisions += len(rows) - 1
            super_rids = {}
            for row in rows:
                for k in range(i):
                    sub = np.delete(combos[row], k)[None, :]
                    prow = prev.row_of_rank[self.colex_rank(sub)[0]]
                    srid = int(prev.rid[prow])
                    if srid >= 0:
                        super_rids[self.key_of(srid)] = srid
            space = affine_solve(self.p, combos[rows[0]], self.tol)
            if space is None:
                continue
            space = space.with_key(key)
            rec = filter_candidate(self.p, space, [self.record(s) for s in super_rids.values()],
                                   self.obj, self.tol, self.counters)
            arid = base + generic.size + len(alias_records)
            rid[rows] = arid
            alias_records.append((arid, key, rows[0], rec, super_rids))
        if alias_records:
            a_pid, a_prov, a_src, a_row = [], [], [], []
            for arid, key, row, rec, super_rids in alias_records:
                if rec.provenance is Provenance.COMPUTED:
                    pid = -1 if rec.minimizer is None else self.rec.add_points([rec.minimizer], [rec.value])
                else:
                    pid = int(self.rec.pid_all[super_rids[rec.source]])
                a_pid.append(pid)
                a_prov.append({Provenance.COMPUTED: _COMPUTED, Provenance.INHERITED: _INHERITED,
                               Provenance.ON_BOUNDARY: _ON_BOUNDARY}[rec.provenance])
                a_src.append(-1 if rec.source is None else super_rids[rec.source])
                a_row.append(row)
                self.rec.alias_key[arid] = key
                self.rec.key_rid[key] = arid
            lvl_pid = np.concatenate([lvl_pid, a_pid]).astype(np.int64)
            lvl_prov = np.concatenate([lvl_prov, np.asarray(a_prov, dtype=np.int8)])
            lvl_src = np.concatenate([lvl_src, a_src]).astype(np.int64)
            lvl_row = np.concatenate([lvl_row, a_row]).astype(np.int64)

        self.rec.add_level(lvl_pid, lvl_prov, lvl_src, lvl_row)
        self.counters.spaces_enumerated += lvl_pid.size
        row_of_rank = np.empty(combos.shape[0], dtype=np.int64)
        row_of_rank[self.colex_rank(combos)] = np.arange(combos.shape[0])
        self.levels.append(_Level(combos, valid, basis, anchor, rid, row_of_rank))
        prev.basis = None

        # sufficiency: candidates whose cone minimiser lies in P
        cand = np.flatnonzero((lvl_prov != _INHERITED) & (lvl_pid >= 0))
        if cand.size == 0:
            return None
        inside = self._contains(self.rec.points[lvl_pid[cand]])
        hits = [base + int(c) for c in cand[inside]]
        if not hits:
            return None
        return min(hits, key=self.key_of)

    def _expand(self, prev: _Level, i: int, counts: np.ndarray, p0: int, p1: int, keep_basis: bool) -> dict:
        p, tol, n = self.p, self.tol, self.n
        N, b, nn = p.normals, p.offsets, p.normal_norms
        cnt = counts[p0:p1]
        parents = np.repeat(np.arange(p0, p1), cnt)
        first_j = (prev.combos[p0:p1, -1] + 1) if i > 1 else np.zeros(p1 - p0, dtype=np.int64)
        local_start = np.concatenate([[0], np.cumsum(cnt)[:-1]])
        j = np.arange(parents.size) - np.repeat(local_start, cnt) + np.repeat(first_j, cnt)
        combos = np.concatenate([prev.combos[parents], j[:, None]], axis=1)
        m = combos.shape[0]

        # incremental Gram-Schmidt (two passes) on the stacked normals
        nj = N[j]
        xp = prev.anchor[parents]
        w = nj.copy()
        if i > 1:
            qp = prev.basis[parents]
            for _ in range(2):
                w -= np.einsum("mk,mkn->mn", np.einsum("mkn,mn->mk", qp, w), qp)
        rho = np.linalg.norm(w, axis=1)
        valid = prev.valid[parents] & (rho > n * RANK_EPS * nn[j])
        safe = np.where(valid, rho, 1.0)
        q = w / safe[:, None]
        alpha = (b[j] - np.einsum("mn,mn->m", nj, xp)) / safe
        anchor = xp + alpha[:, None] * q
        basis = np.concatenate([prev.basis[parents], q[:, None, :]], axis=1) if i > 1 else q[:, None, :]

        # further hyperplanes through the flat (degenerate inputs only)
        slack = anchor @ N.T - b
        near = np.abs(slack) <= tol * np.maximum(1.0, nn[None, :] * np.linalg.norm(anchor, axis=1)[:, None])
        near[np.arange(m)[:, None], combos] = False
        near &= valid[:, None]
        extra_map: dict[int, list[int]] = {}
        for row, k in np.argwhere(near):
            if i < n:
                qb = basis[row]
                resid = N[k] - qb.T @ (qb @ N[k])
                if np.linalg.norm(resid) > tol * nn[k]:
                    continue
            extra_map.setdefault(int(row), []).append(int(k))
        extras = [(row, tuple(v)) for row, v in extra_map.items()]

        # disqualification against each immediate superspace, in key order
        kind = np.full(m, _SKIP, dtype=np.int8)
        src = np.full(m, -1, dtype=np.int64)
        generic = valid.copy()
        generic[list(extra_map)] = False
        rows = np.flatnonzero(generic)
        inner = 0
        computed: dict[int, np.ndarray | None] = {}
        n_min = 0
        if rows.size:
            gc = combos[rows]
            order = list(range(i - 1, -1, -1))
            srids = np.empty((rows.size, i), dtype=np.int64)
            inside = np.zeros((rows.size, i), dtype=bool)
            on = np.zeros((rows.size, i), dtype=bool)
            pts = self.rec.points
            for col, k in enumerate(order):
                sub = np.delete(gc, k, axis=1)
                prow = prev.row_of_rank[self.colex_rank(sub)]
                s = prev.rid[prow]
                srids[:, col] = s
                pid = np.where(s >= 0, self.rec.pid_all[np.maximum(s, 0)], -1)
                has = pid >= 0
                mb = pts[np.maximum(pid, 0)] if pts.shape[0] else np.zeros((rows.size, n))
                h = gc[:, k]
                sl = np.einsum("mn,mn->m", N[h], mb) - b[h]
                sc = tol * np.maximum(1.0, nn[h] * np.linalg.norm(mb, axis=1))
                inside[:, col] = has & (sl < -sc)
                on[:, col] = has & (np.abs(sl) <= sc)
                inner += int(has.sum())
            decisive = inside | on
            any_dec = decisive.any(axis=1)
            first = decisive.argmax(axis=1)
            pick = np.arange(rows.size)
            k_rows = np.where(any_dec, np.where(inside[pick, first], _INHERITED, _ON_BOUNDARY), _COMPUTED)
            kind[rows] = k_rows
            src[rows] = np.where(any_dec, srids[pick, first], -1)
            for row in rows[k_rows == _COMPUTED]:
                space = affine_solve(p, combos[row], tol)
                if space is None or space.codim != i:
                    kind[row] = _SKIP
                    continue
                mval = self.obj.argmin_affine(space)
                n_min += 1
                computed[int(row)] = mval
        return {
            "combos": combos, "valid": valid, "anchor": anchor,
            "basis": basis if keep_basis else None, "kind": kind, "src": src,
            "extras": extras, "computed": computed,
            "inner_products": inner, "affine_minimizations": n_min,
        }


def resolve_workers(workers: int | None, width: int | None = None) -> int:
    import os

    if workers is None or workers == "auto":
        workers = os.cpu_count() or 1
        if width is not None:
            workers = min(workers, max(1, width))
    workers = int(workers)
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def optimize_convex(p: Polyhedron, obj: StrictlyConvexObjective, schedule=None,
                    tol: float = DEFAULT_TOL) -> SolveResult:
    """Minimise a strictly convex ``obj`` over ``p`` exactly.

    Returns a :class:`SolveResult` with status ``"minimizer"`` or
    ``"empty_or_no_min"``. ``schedule`` selects the level-synchronous search
    (default) or the ordered half-space variant.
    """
    from .scheduler import Schedule, ScheduleKind, run_ordered

    schedule = schedule or Schedule()
    if schedule.kind is ScheduleKind.ORDERED:
        return run_ordered(p, obj, schedule, tol)
    workers = resolve_workers(schedule.workers, width=comb(p.r, min(p.r, p.dimension) // 2 or 0) or 1)
    return _LevelSync(p, obj, tol, workers).run()


def certify_empty(p: Polyhedron, tol: float = DEFAULT_TOL, schedule=None) -> bool:
    """True iff ``p`` has no points, decided by projecting the origin."""
    result = optimize_convex(p, ProjectionObjective(np.zeros(p.dimension)), schedule, tol)
    return result.status == EMPTY_OR_NO_MIN
