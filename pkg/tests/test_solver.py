import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minspace.geometry import AffineSpace, Polyhedron, affine_solve, polyhedron_contains
from minspace.harness import brute_force_optimize, lattice_size, random_polyhedron, random_query_point
from minspace.objective import ProjectionObjective, QuadraticObjective
from minspace.scheduler import Schedule
from minspace.solver import (
    EMPTY_OR_NO_MIN,
    MINIMIZER,
    ConeMinRecord,
    Provenance,
    SchedulingError,
    SearchState,
    certify_empty,
    cone_superspaces,
    filter_candidate,
    immediate_superspaces,
    optimize_convex,
)

from conftest import F_BAR, G_GRAVE, H_ACUTE
from oracles import sample_in_polyhedron

EMPTY_1D = Polyhedron.from_arrays([[1.0], [-1.0]], [-1.0, -1.0])


def root_record(obj, n):
    m = obj.argmin_global()
    return ConeMinRecord((), m, obj(m), Provenance.COMPUTED, None, AffineSpace.whole(n))


def degenerate_instance(seed):
    """Integer normals, many constraints through common points, duplicates."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    normals = rng.integers(-2, 3, size=(int(rng.integers(3, 8)), n)).astype(float)
    normals = normals[np.linalg.norm(normals, axis=1) > 0]
    apex = rng.integers(-1, 2, size=n).astype(float)
    offsets = normals @ apex + rng.choice([0.0, 0.0, 1.0], size=len(normals))
    if seed % 2:
        normals, offsets = np.vstack([normals, normals[:1]]), np.append(offsets, offsets[0])
    return Polyhedron.from_arrays(normals, offsets), ProjectionObjective(rng.uniform(-4, 4, n))


# -- superspaces --------------------------------------------------------------

def test_immediate_superspaces_of_vertex(A):
    vertex = affine_solve(A, [G_GRAVE, H_ACUTE])
    assert immediate_superspaces(A, vertex) == [(G_GRAVE,), (H_ACUTE,)]


def test_immediate_superspace_of_line_is_whole_space(A):
    assert immediate_superspaces(A, affine_solve(A, [F_BAR])) == [()]


def test_immediate_superspaces_generic_single_hyperplane():
    P = random_polyhedron(5, 3, 1)
    assert immediate_superspaces(P, affine_solve(P, [2])) == [()]


def test_immediate_superspaces_rejects_whole_space(A):
    with pytest.raises(ValueError):
        immediate_superspaces(A, AffineSpace.whole(2))


def test_cone_superspaces_uses_every_basis():
    # three lines through the origin: the point has all three lines above it
    P = Polyhedron.from_arrays([[1, 0], [0, 1], [1, 1]], [0, 0, 0])
    assert cone_superspaces(P, (0, 1, 2)) == [(0,), (1,), (2,)]
    assert immediate_superspaces(P, affine_solve(P, [0, 1])) == [(0,), (1,)]


# -- filter --------------------------------------------------------------------

def test_filter_disqualifies_by_inheritance(A):
    obj = ProjectionObjective([0.25, 1])
    rec = filter_candidate(A, affine_solve(A, [H_ACUTE]), [root_record(obj, 2)], obj)
    assert rec.provenance is Provenance.INHERITED and not rec.candidate
    np.testing.assert_allclose(rec.minimizer, [0.25, 1])
    assert rec.source == ()


def test_filter_candidate_computes(A):
    obj = ProjectionObjective([0.25, 1])
    rec = filter_candidate(A, affine_solve(A, [F_BAR]), [root_record(obj, 2)], obj)
    assert rec.provenance is Provenance.COMPUTED and rec.candidate
    np.testing.assert_allclose(rec.minimizer, [0.25, 0.5], atol=1e-12)


def test_filter_cone_trace_at_vertex(A):
    obj = ProjectionObjective([0.25, 1])
    root = root_record(obj, 2)
    g = filter_candidate(A, affine_solve(A, [G_GRAVE]), [root], obj)
    h = filter_candidate(A, affine_solve(A, [H_ACUTE]), [root], obj)
    np.testing.assert_allclose(g.minimizer, [1 / 8, 7 / 8], atol=1e-12)
    vertex = filter_candidate(A, affine_solve(A, [G_GRAVE, H_ACUTE]), [g, h], obj)
    assert vertex.provenance is Provenance.INHERITED
    np.testing.assert_allclose(vertex.minimizer, [1 / 8, 7 / 8], atol=1e-12)
    assert not np.allclose(vertex.minimizer, [0, 1])


def test_filter_on_boundary_shortcut():
    P = Polyhedron.from_arrays([[1, 0], [0, 1]], [1, 1])
    obj = ProjectionObjective([1, 5])
    root = root_record(obj, 2)
    line = filter_candidate(P, affine_solve(P, [0]), [root], obj)
    assert line.provenance is Provenance.ON_BOUNDARY  # target already on x = 1
    np.testing.assert_allclose(line.minimizer, [1, 5])


def test_filter_requires_all_new_halfspaces_strictly_inside():
    # duplicate hyperplane: the vertex gains two new half-spaces at once
    P = Polyhedron.from_arrays([[1, 0], [0, 1], [0, 2]], [0, 0, 0])
    obj = ProjectionObjective([-1, 1])
    root = root_record(obj, 2)
    line = filter_candidate(P, affine_solve(P, [0]), [root], obj)
    vertex = affine_solve(P, [0, 1])
    assert vertex.canonical_key == (0, 1, 2)
    rec = filter_candidate(P, vertex, [line], obj)
    assert rec.provenance is Provenance.COMPUTED  # (0, 1) lies outside y <= 0


def test_filter_missing_record_is_scheduling_error(A):
    obj = ProjectionObjective([0, 0])
    with pytest.raises(SchedulingError):
        filter_candidate(A, affine_solve(A, [G_GRAVE]), [None], obj)


def test_search_state_is_write_once():
    state = SearchState()
    rec = ConeMinRecord((1,), None, None, Provenance.COMPUTED)
    state.publish(rec)
    with pytest.raises(SchedulingError):
        state.publish(rec)
    assert state.counters.spaces_enumerated == 1


# -- optimize ------------------------------------------------------------------

def test_a_polyhedron_projection(A):
    res = optimize_convex(A, ProjectionObjective([1, 1]))
    assert res.status == MINIMIZER
    np.testing.assert_allclose(res.point, [0.5, 0.5], atol=1e-12)
    assert res.min_space == (G_GRAVE,)
    np.testing.assert_allclose(res.records[(F_BAR,)].minimizer, [1, 0.5], atol=1e-12)
    np.testing.assert_allclose(res.records[(G_GRAVE,)].minimizer, [0.5, 0.5], atol=1e-12)
    assert res.records[(H_ACUTE,)].provenance is Provenance.INHERITED


def test_a_polyhedron_necessary_criteria_trace(A):
    res = optimize_convex(A, ProjectionObjective([0.25, 1]))
    np.testing.assert_allclose(res.point, [0.25, 0.5], atol=1e-12)
    assert res.min_space == (F_BAR,)
    assert res.records[(H_ACUTE,)].provenance is Provenance.INHERITED
    np.testing.assert_allclose(res.records[(G_GRAVE,)].minimizer, [1 / 8, 7 / 8], atol=1e-12)


def test_unconstrained():
    res = optimize_convex(Polyhedron([], 2), ProjectionObjective([1, 1]))
    assert res.status == MINIMIZER and res.min_space == ()
    np.testing.assert_array_equal(res.point, [1, 1])


def test_empty_polyhedron():
    res = optimize_convex(EMPTY_1D, ProjectionObjective([0.0]))
    assert res.status == EMPTY_OR_NO_MIN and res.point is None
    assert res.to_dict()["status"] == "empty_or_no_min"


def test_certify_empty(A):
    assert certify_empty(EMPTY_1D)
    assert not certify_empty(A)
    assert not certify_empty(random_polyhedron(12, 3, 9))


def test_dimension_mismatch(A):
    with pytest.raises(ValueError):
        optimize_convex(A, ProjectionObjective([0, 0, 0]))


def test_result_json(A):
    res = optimize_convex(A, ProjectionObjective([1, 1]))
    d = res.to_dict()
    assert set(d) == {"status", "point", "value", "min_space", "counters"}
    c = res.to_dict(canonical=True, polyhedron=A)
    assert c == {"status": "minimizer", "point": [0.5, 0.5], "value": 0.7071067812, "min_space": [0, 1]}


def test_records_view_is_a_mapping(A):
    res = optimize_convex(A, ProjectionObjective([1, 1]))
    keys = list(res.records)
    assert keys[0] == () and len(keys) == len(res.records) == 4
    assert (0, 1) not in res.records


# -- properties -----------------------------------------------------------------

instance = st.tuples(st.integers(1, 12), st.integers(1, 4), st.integers(0, 2**32 - 1))


@given(instance)
def test_oracle_equivalence(inst):
    r, n, seed = inst
    P = random_polyhedron(r, n, seed)
    obj = ProjectionObjective(random_query_point(n, seed))
    res = optimize_convex(P, obj)
    ref = brute_force_optimize(P, obj)
    assert res.status == ref.status == MINIMIZER
    assert np.all(np.abs(res.point - ref.point) <= 1e-6)


@given(st.integers(0, 400))
def test_oracle_equivalence_degenerate(seed):
    P, obj = degenerate_instance(seed)
    res = optimize_convex(P, obj)
    ref = brute_force_optimize(P, obj)
    assert res.status == ref.status
    if ref.status == MINIMIZER:
        assert np.all(np.abs(res.point - ref.point) <= 1e-6)


@given(instance)
def test_sufficiency_hit_beats_feasible_samples(inst):
    r, n, seed = inst
    P = random_polyhedron(r, n, seed)
    obj = ProjectionObjective(random_query_point(n, seed))
    res = optimize_convex(P, obj)
    rec = res.records[res.min_space]
    assert rec.candidate
    z = sample_in_polyhedron(P.normals, P.offsets, np.random.default_rng(seed), 1000)
    assert len(z) > 0
    assert res.value <= obj.evaluate_many(z).min() + 1e-9


@given(instance)
def test_inherited_records_lie_in_their_cone(inst):
    r, n, seed = inst
    P = random_polyhedron(r, n, seed)
    res = optimize_convex(P, ProjectionObjective(random_query_point(n, seed)))
    for key, rec in res.records.items():
        if rec.provenance is Provenance.INHERITED:
            cone = Polyhedron([P.halfspaces[i] for i in key], n)
            assert polyhedron_contains(cone, rec.minimizer, 1e-9)
            assert set(rec.source) < set(key)


@given(st.integers(1, 10), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_projection_is_idempotent_and_nonexpansive(r, n, seed):
    P = random_polyhedron(r, n, seed)
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-10, 10, (2, n))
    px = optimize_convex(P, ProjectionObjective(x)).point
    py = optimize_convex(P, ProjectionObjective(y)).point
    np.testing.assert_allclose(optimize_convex(P, ProjectionObjective(px)).point, px, atol=1e-9)
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-9


@given(instance)
def test_counter_bounds(inst):
    r, n, seed = inst
    P = random_polyhedron(r, n, seed)
    c = optimize_convex(P, ProjectionObjective(random_query_point(n, seed))).counters
    assert c.affine_minimizations <= c.spaces_enumerated <= lattice_size(r, n)


@pytest.mark.parametrize("r,n,seed", [(14, 4, 3), (20, 5, 8), (25, 3, 1)])
def test_thread_count_does_not_change_anything(r, n, seed):
    P = random_polyhedron(r, n, seed)
    obj = ProjectionObjective(random_query_point(n, seed))
    results = [optimize_convex(P, obj, Schedule(workers=w)) for w in (1, 2, 8)]
    for res in results[1:]:
        assert res.point.tobytes() == results[0].point.tobytes()
        assert res.min_space == results[0].min_space
        assert res.counters == results[0].counters


def test_quadratic_objective_solves(rng):
    P = random_polyhedron(8, 3, 4)
    a = rng.standard_normal((3, 3))
    obj = QuadraticObjective(a @ a.T + np.eye(3), [5, -6, 2])
    res = optimize_convex(P, obj)
    ref = brute_force_optimize(P, obj)
    np.testing.assert_allclose(res.point, ref.point, atol=1e-9)
