"""Min-space search over non-convex polyhedra given by a face lattice.

Each (n-1)-face carries the half-space whose boundary is its affine hull,
oriented so the polyhedron lies locally inside. A lower-dimensional face
lists the (n-1)-faces that meet in it; the intersection of their half-spaces
is the face's cone. The search runs the convex filter over those cones,
collects every candidate minimiser that lands inside its own face and
returns the best of them (all of them on ties).
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .geometry import (
    DEFAULT_TOL,
    AffineSpace,
    HalfSpace,
    Location,
    Polyhedron,
    affine_solve,
    as_vector,
    halfspace_contains,
    polyhedron_contains,
)
from .objective import StrictlyConvexObjective
from .solver import ConeMinRecord, Provenance, SearchCounters, cone_superspaces, filter_candidate, resolve_workers

MINIMIZERS = "minimizers"
NO_MINIMUM = "no_minimum"
TIE_RTOL = 1e-9
ANGLE_STEP = 1e-3


class LatticeError(ValueError):
    """The face lattice is inconsistent."""


@dataclass(frozen=True, eq=False)
class Face:
    id: int
    dim: int
    halfspace: HalfSpace | None
    generators: tuple[int, ...]
    local_halfspaces: tuple[HalfSpace, ...] = ()
    affine_hull: AffineSpace | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dim": self.dim,
            "halfspace": None if self.halfspace is None else self.halfspace.to_dict(),
            "generators": list(self.generators),
            "local_halfspaces": [h.to_dict() for h in self.local_halfspaces],
        }


@dataclass(frozen=True)
class CuratedSpace:
    key: tuple[int, ...]          # pool indices of the generating half-spaces
    space: AffineSpace
    owners: tuple[int, ...]       # ids of the faces whose hull this is


class FaceLattice:
    """Faces of a polyhedron in R^n, including the top face (the polyhedron).

    ``pieces`` optionally lists convex polyhedra whose union is the top face.
    Membership tests use them when present and ray casting otherwise, which
    is only valid for bounded polyhedra.
    """

    def __init__(self, dimension: int, faces: Sequence[Face], pieces: Sequence[Polyhedron] | None = None,
                 tol: float = DEFAULT_TOL, validate: bool = True):
        self.dimension = n = int(dimension)
        self.tol = tol
        self.pieces = tuple(pieces) if pieces else ()
        by_id = {}
        for f in faces:
            if f.id in by_id:
                raise LatticeError(f"duplicate face id {f.id}")
            by_id[f.id] = f
        tops = [f for f in faces if f.dim == n]
        if len(tops) != 1:
            raise LatticeError(f"expected exactly one {n}-dimensional face, got {len(tops)}")
        if tops[0].halfspace is not None:
            raise LatticeError("the top face has no half-space")
        facets = sorted(f.id for f in faces if f.dim == n - 1)
        if not facets:
            raise LatticeError("a face lattice needs at least one (n-1)-face")

        # pool of distinct half-spaces, one per (n-1)-face up to duplicates
        pool: list[HalfSpace] = []
        seen: dict[tuple, int] = {}
        self.facet_pool: dict[int, int] = {}
        for fid in facets:
            h = by_id[fid].halfspace
            if h is None:
                raise LatticeError(f"(n-1)-face {fid} has no half-space")
            if h.dimension != n:
                raise LatticeError(f"face {fid} half-space has dimension {h.dimension}")
            scale = np.linalg.norm(h.normal)
            sig = tuple(np.round(np.append(h.normal, h.offset) / scale, 12) + 0.0)
            if sig not in seen:
                seen[sig] = len(pool)
                pool.append(h)
            self.facet_pool[fid] = seen[sig]
        self.pool = Polyhedron(pool, n)

        built = []
        for f in faces:
            gens = tuple(sorted(f.generators)) if f.generators else ((f.id,) if f.dim == n - 1 else ())
            for g in gens:
                if g not in self.facet_pool:
                    raise LatticeError(f"face {f.id} lists {g}, which is not an (n-1)-face")
            if f.dim == n - 1 and gens != (f.id,):
                raise LatticeError(f"(n-1)-face {f.id} must generate itself")
            hull = affine_solve(self.pool, [self.facet_pool[g] for g in gens], tol)
            if hull is None:
                raise LatticeError(f"generators of face {f.id} do not meet")
            if f.dim != n - hull.codim:
                raise LatticeError(f"face {f.id} has dim {f.dim} but its hull has dim {n - hull.codim}")
            built.append(Face(f.id, f.dim, f.halfspace, gens, tuple(f.local_halfspaces), hull))
        self.faces = tuple(sorted(built, key=lambda f: f.id))
        self.by_id = {f.id: f for f in self.faces}
        self.top = self.by_id[tops[0].id]
        self._relint: dict[int, np.ndarray] = {}
        if validate:
            self.validate_orientation()

    def __repr__(self):
        return f"FaceLattice(n={self.dimension}, faces={len(self.faces)})"

    @property
    def facets(self) -> list[Face]:
        return [f for f in self.faces if f.dim == self.dimension - 1]

    def pool_key(self, face: Face) -> tuple[int, ...]:
        return tuple(sorted({self.facet_pool[g] for g in face.generators}))

    # -- geometry of single faces -------------------------------------------

    def relint_point(self, face: Face) -> np.ndarray:
        """A point well inside ``face`` (Chebyshev centre within its hull)."""
        if face.id in self._relint:
            return self._relint[face.id]
        hull = face.affine_hull
        if face is self.top:
            point = self._top_interior_point()
        elif hull.directions.shape[0] == 0 or not face.local_halfspaces:
            point = hull.anchor.copy()
        else:
            D = hull.directions
            A = np.array([h.normal for h in face.local_halfspaces])
            b = np.array([h.offset for h in face.local_halfspaces])
            AD = A @ D.T
            width = np.linalg.norm(AD, axis=1)
            # variables (u, s): maximise s subject to AD u + s |AD| <= b - A anchor, s <= 1
            c = np.zeros(D.shape[0] + 1)
            c[-1] = -1.0
            res = linprog(c, A_ub=np.hstack([AD, width[:, None]]), b_ub=b - A @ hull.anchor,
                          bounds=[(None, None)] * D.shape[0] + [(None, 1.0)], method="highs")
            if res.status != 0 or res.x[-1] <= 0:
                raise LatticeError(f"face {face.id} has an empty relative interior")
            point = hull.anchor + D.T @ res.x[:-1]
        self._relint[face.id] = point
        return point

    def _top_interior_point(self) -> np.ndarray:
        f = self.facets[0]
        x = self.relint_point(f)
        return x - 1e-3 * f.halfspace.normal / np.linalg.norm(f.halfspace.normal)

    def validate_orientation(self) -> None:
        """Every (n-1)-face must have the polyhedron on the inside of its half-space."""
        for f in self.facets:
            x = self.relint_point(f)
            step = 1e-4 * max(1.0, float(np.linalg.norm(x)))
            u = f.halfspace.normal / np.linalg.norm(f.halfspace.normal)
            if not face_contains(self.top, x - step * u, self.tol, self):
                raise LatticeError(f"face {f.id} is oriented with the polyhedron outside")
            if face_contains(self.top, x + step * u, self.tol, self):
                raise LatticeError(f"face {f.id} does not separate the polyhedron from its outside")

    def shared_subface(self, f: Face, g: Face) -> Face:
        common = [h for h in self.faces if f.id in h.generators and g.id in h.generators]
        if f.id == g.id or not common:
            raise ValueError(f"faces {f.id} and {g.id} are not adjacent")
        return max(common, key=lambda h: (h.dim, -h.id))

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        out = {"dimension": self.dimension, "faces": [f.to_dict() for f in self.faces]}
        if self.pieces:
            out["pieces"] = [[h.to_dict() for h in p.halfspaces] for p in self.pieces]
        return out

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> "FaceLattice":
        n = int(data["dimension"])
        faces = []
        for fd in data["faces"]:
            hs = fd.get("halfspace")
            faces.append(Face(int(fd["id"]), int(fd["dim"]), None if hs is None else HalfSpace.from_dict(hs),
                              tuple(int(g) for g in fd.get("generators", [])),
                              tuple(HalfSpace.from_dict(h) for h in fd.get("local_halfspaces", []))))
        pieces = [Polyhedron([HalfSpace.from_dict(h) for h in piece], n) for piece in data.get("pieces", [])]
        return cls(n, faces, pieces, tol)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, tol: float = DEFAULT_TOL) -> "FaceLattice":
        return cls.from_dict(json.loads(text), tol)


def face_contains(face: Face, x, tol: float = DEFAULT_TOL, lattice: FaceLattice | None = None) -> bool:
    """Membership in a face: on its hull and inside its local half-spaces.

    The top face is non-convex; it needs ``lattice`` and is tested against the
    lattice's convex pieces when present, by ray casting otherwise. Ray casting
    counts boundary crossings to infinity and so assumes a bounded polyhedron;
    unbounded lattices must supply pieces.
    """
    x = as_vector(x)
    if face.halfspace is None and face.dim == x.size:
        if lattice is None:
            raise ValueError("membership in the top face needs the lattice")
        if lattice.pieces:
            return any(polyhedron_contains(p, x, tol) for p in lattice.pieces)
        return _ray_cast(lattice, x, tol)
    if not face.affine_hull.contains(x, tol):
        return False
    return all(halfspace_contains(h, x, tol) is not Location.OUTSIDE for h in face.local_halfspaces)


def _ray_cast(lattice: FaceLattice, x: np.ndarray, tol: float) -> bool:
    # closed set: points on the boundary belong to it
    for f in lattice.facets:
        if face_contains(f, x, tol):
            return True
    n = lattice.dimension
    d = np.array([np.sqrt(p) % 1.0 + 0.1 for p in (2, 3, 5, 7, 11, 13, 17, 19)[:n]] +
                 [0.3] * max(0, n - 8))
    d /= np.linalg.norm(d)
    crossings = 0
    for f in lattice.facets:
        a, b = f.halfspace.normal, f.halfspace.offset
        denom = float(a @ d)
        if abs(denom) < 1e-14:
            continue
        t = (b - float(a @ x)) / denom
        if t > 0 and face_contains(f, x + t * d, tol):
            crossings += 1
    return crossings % 2 == 1


def pcone_nonconvex(face: Face, lattice: FaceLattice) -> list[HalfSpace]:
    """Half-spaces whose intersection is the cone of ``face``."""
    return [lattice.by_id[g].halfspace for g in face.generators]


def angle_prefilter(f: Face, g: Face, shared: Face, lattice: FaceLattice, tol: float = DEFAULT_TOL) -> bool:
    """True iff the interior angle between (n-1)-faces ``f`` and ``g`` at
    ``shared`` is below 180 degrees.

    A point of ``shared`` nudged towards the inside of ``f`` must land
    strictly inside ``g``'s half-space.
    """
    n = lattice.dimension
    if f.dim != n - 1 or g.dim != n - 1:
        raise ValueError("the angle test compares two (n-1)-faces")
    if f.id not in shared.generators or g.id not in shared.generators or f.id == g.id:
        raise ValueError(f"faces {f.id} and {g.id} are not adjacent at face {shared.id}")
    s = lattice.relint_point(shared)
    x = s + ANGLE_STEP * (lattice.relint_point(f) - s)
    return halfspace_contains(g.halfspace, x, tol) is Location.INSIDE


def face_admissible(face: Face, lattice: FaceLattice, tol: float = DEFAULT_TOL) -> bool:
    """A face can hold a local minimiser only if all generator pairs pass the angle test."""
    for a, b in itertools.combinations(face.generators, 2):
        fa, fb = lattice.by_id[a], lattice.by_id[b]
        if not (angle_prefilter(fa, fb, face, lattice, tol) and angle_prefilter(fb, fa, face, lattice, tol)):
            return False
    return True


def curated_affine_spaces(lattice: FaceLattice) -> list[CuratedSpace]:
    """R^n plus the affine hull of every proper face, merged by generating half-spaces."""
    owners: dict[tuple[int, ...], list[int]] = {(): [lattice.top.id]}
    hulls: dict[tuple[int, ...], AffineSpace] = {(): AffineSpace.whole(lattice.dimension)}
    for f in lattice.faces:
        if f is lattice.top:
            continue
        key = lattice.pool_key(f)
        owners.setdefault(key, []).append(f.id)
        hulls.setdefault(key, f.affine_hull.with_key(key))
    keys = sorted(owners, key=lambda k: (hulls[k].codim, k))
    return [CuratedSpace(k, hulls[k], tuple(owners[k])) for k in keys]


@dataclass
class NonconvexResult:
    status: str
    points: list[np.ndarray]
    value: float | None
    faces: list[tuple[int, ...]] = field(default_factory=list)
    counters: SearchCounters = field(default_factory=SearchCounters)
    records: dict = field(default_factory=dict, repr=False)

    def to_dict(self, canonical: bool = False) -> dict:
        from .solver import _round_sig

        if self.status != MINIMIZERS:
            out = {"status": self.status, "points": [], "value": None}
        elif canonical:
            out = {"status": self.status, "points": [[_round_sig(v) for v in p] for p in self.points],
                   "value": _round_sig(self.value)}
        else:
            out = {"status": self.status, "points": [p.tolist() for p in self.points], "value": self.value,
                   "faces": [list(f) for f in self.faces]}
        if not canonical:
            out["counters"] = self.counters.to_dict()
        return out


def optimize_nonconvex(lattice: FaceLattice, obj: StrictlyConvexObjective, schedule=None,
                       tol: float | None = None) -> NonconvexResult:
    """All global minimisers of ``obj`` over the polyhedron described by ``lattice``."""
    from .scheduler import Schedule, ScheduleKind

    schedule = schedule or Schedule()
    if schedule.kind is not ScheduleKind.LEVEL_SYNC:
        raise ValueError("the non-convex search supports the level schedule only")
    tol = lattice.tol if tol is None else tol
    if obj.dimension != lattice.dimension:
        raise ValueError(f"objective is {obj.dimension}-d, lattice is {lattice.dimension}-d")
    pool = lattice.pool
    counters = SearchCounters()

    m0 = obj.argmin_global()
    counters.affine_minimizations += 1
    root = ConeMinRecord((), m0, None if m0 is None else obj.evaluate(m0),
                         Provenance.COMPUTED, None, AffineSpace.whole(pool.dimension))
    records: dict[tuple[int, ...], ConeMinRecord] = {(): root}
    counters.spaces_enumerated = 1
    if m0 is not None and face_contains(lattice.top, m0, tol, lattice):
        return NonconvexResult(MINIMIZERS, [m0], root.value, [(lattice.top.id,)], counters, records)

    cache: dict[tuple[int, ...], AffineSpace | None] = {}

    def solve(gens):
        gens = tuple(sorted(gens))
        if gens not in cache:
            cache[gens] = affine_solve(pool, gens, tol)
        return cache[gens]

    curated = curated_affine_spaces(lattice)
    # every cone whose record some curated cone depends on
    supers: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    todo = [c.key for c in curated if c.key]
    while todo:
        key = todo.pop()
        if key in supers or not key:
            continue
        supers[key] = cone_superspaces(pool, key, tol, solve)
        todo.extend(s for s in supers[key] if s not in supers)
    levels: dict[int, list[tuple[int, ...]]] = {}
    for key in supers:
        levels.setdefault(solve(key).codim, []).append(key)

    def examine(key):
        local = SearchCounters()
        rec = filter_candidate(pool, solve(key).with_key(key), [records[s] for s in supers[key]], obj, tol, local)
        return rec, local

    workers = resolve_workers(schedule.workers)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        for codim in sorted(levels):
            keys = sorted(levels[codim])
            for key, (rec, local) in zip(keys, ex.map(examine, keys)):
                records[key] = rec
                counters.add(local)
                counters.spaces_enumerated += 1

    potential = []
    for c in curated:
        if not c.key:
            continue
        rec = records[c.key]
        if not rec.candidate or rec.minimizer is None:
            continue
        for fid in c.owners:
            face = lattice.by_id[fid]
            if not face_admissible(face, lattice, tol):
                continue
            counters.inner_products += len(face.local_halfspaces) + face.affine_hull.codim
            if face_contains(face, rec.minimizer, tol):
                potential.append((rec.value, tuple(rec.minimizer), fid))
    if not potential:
        return NonconvexResult(NO_MINIMUM, [], None, [], counters, records)
    best = min(v for v, _, _ in potential)
    cut = best + TIE_RTOL * max(1.0, abs(best))
    points: list[np.ndarray] = []
    faces: list[list[int]] = []
    for v, x, fid in sorted((p for p in potential if p[0] <= cut), key=lambda p: p[1]):
        x = np.asarray(x)
        for i, q in enumerate(points):
            if np.linalg.norm(q - x) <= 1e-9 * max(1.0, float(np.linalg.norm(x))):
                faces[i].append(fid)
                break
        else:
            points.append(x)
            faces.append([fid])
    return NonconvexResult(MINIMIZERS, points, best, [tuple(sorted(f)) for f in faces], counters, records)
