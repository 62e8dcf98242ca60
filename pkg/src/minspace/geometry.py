"""Linear geometry in R^n: half-spaces, polyhedra and intersections of their
boundary hyperplanes.

All predicates use a relative tolerance ``tol * scale`` with
``scale = max(1, |n| * |x|)`` so that user supplied (un-normalised) normals keep
their offset semantics.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
RANK_EPS = 1e-12


class Location(enum.Enum):
    INSIDE = "inside"
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


def as_vector(x, dimension: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("vectors must have at least one coordinate")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dimension is not None and v.size != dimension:
        raise ValueError(f"dimension mismatch: expected {dimension}, got {v.size}")
    return v


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The closed half-space ``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = as_vector(self.normal)
        if not np.linalg.norm(normal) > 0:
            raise ValueError("half-space normal must be nonzero")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self) -> int:
        return self.normal.size

    def to_dict(self) -> dict:
        return {"normal": self.normal.tolist(), "offset": self.offset}

    @classmethod
    def from_dict(cls, data: dict) -> "HalfSpace":
        return cls(data["normal"], data["offset"])


class Polyhedron:
    """Intersection of an ordered list of half-spaces (``r = 0`` is all of R^n)."""

    def __init__(self, halfspaces: Iterable[HalfSpace], dimension: int | None = None):
        self.halfspaces: tuple[HalfSpace, ...] = tuple(halfspaces)
        if dimension is None:
            if not self.halfspaces:
                raise ValueError("dimension is required for a polyhedron without half-spaces")
            dimension = self.halfspaces[0].dimension
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        for h in self.halfspaces:
            if h.dimension != dimension:
                raise ValueError(f"half-space of dimension {h.dimension} in a {dimension}-d polyhedron")
        self.dimension = int(dimension)
        if self.halfspaces:
            normals = np.stack([h.normal for h in self.halfspaces])
        else:
            normals = np.zeros((0, dimension))
        self.normals = normals
        self.offsets = np.array([h.offset for h in self.halfspaces], dtype=float)
        self.normal_norms = np.linalg.norm(normals, axis=1)
        for a in (self.normals, self.offsets, self.normal_norms):
            a.setflags(write=False)

    @classmethod
    def from_arrays(cls, normals, offsets) -> "Polyhedron":
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        if normals.shape[0] != offsets.size:
            raise ValueError("need one offset per normal")
        return cls([HalfSpace(v, c) for v, c in zip(normals, offsets)], normals.shape[1])

    @property
    def r(self) -> int:
        return len(self.halfspaces)

    def __len__(self) -> int:
        return len(self.halfspaces)

    def __repr__(self) -> str:
        return f"Polyhedron(r={self.r}, n={self.dimension})"

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "halfspaces": [h.to_dict() for h in self.halfspaces]}

    @classmethod
    def from_dict(cls, data: dict) -> "Polyhedron":
        return cls([HalfSpace.from_dict(h) for h in data["halfspaces"]], int(data["dimension"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Polyhedron":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class AffineSpace:
    """An intersection of boundary hyperplanes in parametric form.

    ``generators`` are the hyperplanes the space was built from,
    ``canonical_key`` every hyperplane of the polyhedron that contains it.
    ``directions`` holds an orthonormal basis of the translation subspace as
    rows; a point has zero rows.
    """

    generators: tuple[int, ...]
    canonical_key: tuple[int, ...]
    anchor: np.ndarray
    directions: np.ndarray
    codim: int = field(default=0)

    @property
    def dimension(self) -> int:
        return self.anchor.size

    @classmethod
    def whole(cls, dimension: int) -> "AffineSpace":
        return cls((), (), np.zeros(dimension), np.eye(dimension), 0)

    def with_key(self, key: Sequence[int]) -> "AffineSpace":
        return replace(self, canonical_key=tuple(sorted(key)))

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = as_vector(x, self.dimension)
        gap = x - project_affine(self, x)
        return float(np.linalg.norm(gap)) <= tol * max(1.0, float(np.linalg.norm(x)))


def _scale(norm_n, x_norm):
    return np.maximum(1.0, norm_n * x_norm)


def halfspace_contains(h: HalfSpace, x, tol: float = DEFAULT_TOL) -> Location:
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = as_vector(x, h.dimension)
    slack = float(h.normal @ x) - h.offset
    scale = _scale(float(np.linalg.norm(h.normal)), float(np.linalg.norm(x)))
    if abs(slack) <= tol * scale:
        return Location.ON_BOUNDARY
    if slack < 0:
        return Location.INSIDE
    return Location.OUTSIDE


def polyhedron_contains(p: Polyhedron, x, tol: float = DEFAULT_TOL) -> bool:
    x = as_vector(x, p.dimension)
    if p.r == 0:
        return True
    slack = p.normals @ x - p.offsets
    return bool(np.all(slack <= tol * _scale(p.normal_norms, np.linalg.norm(x))))


def contains_many(p: Polyhedron, points: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Row-wise :func:`polyhedron_contains` for a ``(m, n)`` array of points."""
    points = np.atleast_2d(points)
    if p.r == 0:
        return np.ones(points.shape[0], dtype=bool)
    slack = points @ p.normals.T - p.offsets
    scale = _scale(p.normal_norms[None, :], np.linalg.norm(points, axis=1)[:, None])
    return np.all(slack <= tol * scale, axis=1)


def hyperplanes_containing(p: Polyhedron, anchor: np.ndarray, directions: np.ndarray,
                           tol: float = DEFAULT_TOL) -> np.ndarray:
    """Boolean mask of the hyperplanes of ``p`` that contain the given flat."""
    if p.r == 0:
        return np.zeros(0, dtype=bool)
    slack = p.normals @ anchor - p.offsets
    on = np.abs(slack) <= tol * _scale(p.normal_norms, np.linalg.norm(anchor))
    if directions.shape[0]:
        drift = np.linalg.norm(p.normals @ directions.T, axis=1)
        on &= drift <= tol * p.normal_norms
    return on


def affine_solve(p: Polyhedron, generators: Iterable[int], tol: float = DEFAULT_TOL) -> AffineSpace | None:
    """Intersect the boundary hyperplanes listed in ``generators``.

    Returns ``None`` when the equations are inconsistent. The anchor is the
    minimum-norm solution; rank is decided by a singular-value cutoff of
    ``sigma_max * n * 1e-12``.
    """
    gens = tuple(sorted(set(int(g) for g in generators)))
    n = p.dimension
    for g in gens:
        if not 0 <= g < p.r:
            raise IndexError(f"generator {g} out of range for r={p.r}")
    if not gens:
        return AffineSpace.whole(n)
    m = p.normals[list(gens)]
    c = p.offsets[list(gens)]
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > s[0] * n * RANK_EPS))
    anchor = vt[:rank].T @ ((u[:, :rank].T @ c) / s[:rank])
    residual = m @ anchor - c
    if np.any(np.abs(residual) > tol * _scale(p.normal_norms[list(gens)], np.linalg.norm(anchor))):
        return None
    directions = vt[rank:]
    mask = hyperplanes_containing(p, anchor, directions, tol)
    mask[list(gens)] = True
    key = tuple(int(i) for i in np.flatnonzero(mask))
    anchor.setflags(write=False)
    directions.setflags(write=False)
    return AffineSpace(gens, key, anchor, directions, rank)


def project_affine(a: AffineSpace, y) -> np.ndarray:
    """Nearest point of ``a`` to ``y``."""
    y = as_vector(y, a.dimension)
    d = a.directions
    if d.shape[0] == 0:
        return a.anchor.copy()
    return a.anchor + d.T @ (d @ (y - a.anchor))


def load_vector(text: str) -> np.ndarray:
    """Parse ``"1,2.5"`` or a JSON array into a vector."""
    text = text.strip()
    if text.startswith("["):
        return as_vector(json.loads(text))
    return as_vector([float(t) for t in text.split(",") if t.strip()])
