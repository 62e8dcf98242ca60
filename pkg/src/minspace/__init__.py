"""Exact minimisation of strictly convex functions over polyhedra by
searching the lattice of boundary-hyperplane intersections."""

from .geometry import (
    AffineSpace,
    HalfSpace,
    Location,
    Polyhedron,
    affine_solve,
    halfspace_contains,
    polyhedron_contains,
)
from .harness import BenchConfig, brute_force_optimize, random_polyhedron, random_query_point, run_benchmark
from .nonconvex import Face, FaceLattice, curated_affine_spaces, optimize_nonconvex
from .objective import ProjectionObjective, QuadraticObjective, StrictlyConvexObjective
from .scheduler import Schedule, ScheduleKind, execute, order_halfspaces
from .solver import (
    ConeMinRecord,
    Provenance,
    SolveResult,
    certify_empty,
    filter_candidate,
    immediate_superspaces,
    optimize_convex,
)

__version__ = "0.1.0"

__all__ = [
    "AffineSpace", "BenchConfig", "ConeMinRecord", "Face", "FaceLattice", "HalfSpace", "Location",
    "Polyhedron", "ProjectionObjective", "Provenance", "QuadraticObjective", "Schedule", "ScheduleKind",
    "SolveResult", "StrictlyConvexObjective", "affine_solve", "brute_force_optimize", "certify_empty",
    "curated_affine_spaces", "execute", "filter_candidate", "halfspace_contains", "immediate_superspaces",
    "optimize_convex", "optimize_nonconvex", "order_halfspaces", "polyhedron_contains",
    "random_polyhedron", "random_query_point", "run_benchmark",
]
