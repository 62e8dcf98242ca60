"""Builders for common face lattices: boxes, simple polygons and unions of
axis-aligned rectangles."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
import shapely
from shapely.geometry import Polygon, box
from shapely.geometry.polygon import orient

from .geometry import HalfSpace, Polyhedron
from .nonconvex import Face, FaceLattice, LatticeError


def box_polyhedron(lo, hi) -> Polyhedron:
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    n = lo.size
    eye = np.eye(n)
    return Polyhedron.from_arrays(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))


def box_lattice(lo, hi) -> FaceLattice:
    """All 3^n faces of the box ``[lo, hi]`` (convex, so no reflex angles)."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    n = lo.size
    if np.any(hi <= lo):
        raise ValueError("box needs lo < hi in every coordinate")
    eye = np.eye(n)
    facet_id = {}
    faces = []
    next_id = 1
    for k in range(n):
        for side in (-1, 1):
            facet_id[(k, side)] = next_id
            next_id += 1
    for pattern in itertools.product((-1, 0, 1), repeat=n):
        fixed = [(k, s) for k, s in enumerate(pattern) if s]
        free = [k for k, s in enumerate(pattern) if not s]
        local = []
        for k in free:
            local += [HalfSpace(eye[k], hi[k]), HalfSpace(-eye[k], -lo[k])]
        if not fixed:
            faces.append(Face(0, n, None, (), tuple(local)))
            continue
        gens = tuple(sorted(facet_id[f] for f in fixed))
        if len(fixed) == 1:
            k, s = fixed[0]
            h = HalfSpace(eye[k], hi[k]) if s > 0 else HalfSpace(-eye[k], -lo[k])
            faces.append(Face(gens[0], n - 1, h, gens, tuple(local)))
        else:
            faces.append(Face(next_id, n - len(fixed), None, gens, tuple(local)))
            next_id += 1
    return FaceLattice(n, faces, [box_polyhedron(lo, hi)])


def polygon_lattice(vertices: Sequence[Sequence[float]], pieces: Sequence[Polyhedron] | None = None) -> FaceLattice:
    """Face lattice of a simple polygon given by its vertices in counter-clockwise order."""
    v = [np.asarray(p, dtype=float) for p in vertices]
    # drop repeated closing vertex and collinear vertices
    if len(v) > 1 and np.allclose(v[0], v[-1]):
        v = v[:-1]
    changed = True
    while changed and len(v) > 3:
        changed = False
        for i in range(len(v)):
            a, b, c = v[i - 1], v[i], v[(i + 1) % len(v)]
            cross = (b - a)[0] * (c - b)[1] - (b - a)[1] * (c - b)[0]
            if abs(cross) <= 1e-12 * max(1.0, np.linalg.norm(b - a) * np.linalg.norm(c - b)):
                del v[i]
                changed = True
                break
    m = len(v)
    if m < 3:
        raise LatticeError("a polygon needs at least three vertices")
    area = 0.5 * sum(v[i][0] * v[(i + 1) % m][1] - v[(i + 1) % m][0] * v[i][1] for i in range(m))
    if area <= 0:
        raise LatticeError("polygon vertices must be counter-clockwise")
    faces = [Face(0, 2, None, ())]
    for i in range(m):
        a, b = v[i], v[(i + 1) % m]
        d = b - a
        normal = np.array([d[1], -d[0]])
        local = (HalfSpace(d, float(d @ b)), HalfSpace(-d, float(-d @ a)))
        faces.append(Face(1 + i, 1, HalfSpace(normal, float(normal @ a)), (1 + i,), local))
    for i in range(m):
        # vertex i joins edge i-1 and edge i
        faces.append(Face(1 + m + i, 0, None, tuple(sorted((1 + (i - 1) % m, 1 + i)))))
    return FaceLattice(2, faces, pieces)


def l_shape_lattice() -> FaceLattice:
    """[0,2]x[0,1] union [0,1]x[0,2]."""
    return rectilinear_union_lattice([((0, 0), (2, 1)), ((0, 0), (1, 2))])


def rectilinear_union_lattice(boxes: Sequence[tuple[Sequence[float], Sequence[float]]]) -> FaceLattice:
    """Lattice of a union of axis-aligned rectangles, given as ``(lo, hi)`` pairs.

    The union must be a single polygon without holes.
    """
    shape = shapely.union_all([box(lo[0], lo[1], hi[0], hi[1]) for lo, hi in boxes])
    if not isinstance(shape, Polygon) or shape.is_empty:
        raise LatticeError("union of boxes is not a single polygon")
    if len(shape.interiors):
        raise LatticeError("union of boxes has holes")
    coords = list(orient(shape, sign=1.0).exterior.coords)
    return polygon_lattice(coords, [box_polyhedron(lo, hi) for lo, hi in boxes])


def random_box_union(rng: np.random.Generator, count: int | None = None, max_tries: int = 100):
    """2-3 random integer boxes in [0, 6]^2 whose union is one polygon without holes."""
    for _ in range(max_tries):
        k = count or int(rng.integers(2, 4))
        boxes = []
        for _ in range(k):
            lo = rng.integers(0, 5, size=2)
            hi = lo + rng.integers(1, 4, size=2)
            boxes.append((lo.astype(float), hi.astype(float)))
        try:
            lat = rectilinear_union_lattice(boxes)
        except LatticeError:
            continue
        return boxes, lat
    raise RuntimeError("could not draw a connected box union")
