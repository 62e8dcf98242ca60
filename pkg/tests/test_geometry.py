import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from minspace.geometry import (
    AffineSpace,
    HalfSpace,
    Location,
    Polyhedron,
    affine_solve,
    as_vector,
    contains_many,
    halfspace_contains,
    load_vector,
    polyhedron_contains,
    project_affine,
)

from conftest import F_BAR, G_GRAVE, H_ACUTE

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_halfspace_outside():
    assert halfspace_contains(HalfSpace([0, 1], 0.5), [0.25, 1]) is Location.OUTSIDE


def test_halfspace_inside():
    assert halfspace_contains(HalfSpace([-1, 1], 1), [0.25, 1]) is Location.INSIDE


def test_halfspace_on_boundary():
    assert halfspace_contains(HalfSpace([0, 1], 0.5), [3, 0.5]) is Location.ON_BOUNDARY


def test_halfspace_tolerance_scales_with_normal():
    h = HalfSpace([0, 1000], 500)
    assert halfspace_contains(h, [0, 0.5 + 1e-10]) is Location.ON_BOUNDARY
    assert halfspace_contains(h, [0, 0.5 + 1e-6]) is Location.OUTSIDE


def test_halfspace_validation():
    with pytest.raises(ValueError):
        HalfSpace([0, 0], 1)
    with pytest.raises(ValueError):
        halfspace_contains(HalfSpace([1, 0], 1), [1, 2, 3])
    with pytest.raises(ValueError):
        halfspace_contains(HalfSpace([1, 0], 1), [1, 2], tol=0)
    with pytest.raises(ValueError):
        as_vector([1, np.nan])


def test_polyhedron_contains(A):
    assert polyhedron_contains(A, [0.5, 0.5])
    assert not polyhedron_contains(A, [1, 0.5])
    assert polyhedron_contains(Polyhedron([], 3), [1e6, -4, 2])


def test_contains_many_matches_scalar(A, rng):
    pts = rng.uniform(-2, 2, size=(200, 2))
    expect = [polyhedron_contains(A, p) for p in pts]
    assert contains_many(A, pts).tolist() == expect


def test_polyhedron_validation():
    with pytest.raises(ValueError):
        Polyhedron([HalfSpace([1, 0], 1), HalfSpace([1, 0, 0], 1)])
    with pytest.raises(ValueError):
        Polyhedron([])
    with pytest.raises(ValueError):
        Polyhedron.from_arrays([[1, 0]], [1, 2])


def test_polyhedron_json_roundtrip(A):
    B = Polyhedron.from_json(A.to_json())
    assert B.dimension == 2 and B.r == 3
    np.testing.assert_array_equal(B.normals, A.normals)
    np.testing.assert_array_equal(B.offsets, A.offsets)
    assert json.loads(A.to_json())["halfspaces"][1] == {"normal": [1.0, 1.0], "offset": 1.0}


def test_affine_solve_point(A):
    s = affine_solve(A, [G_GRAVE, H_ACUTE])
    assert s.codim == 2
    np.testing.assert_allclose(s.anchor, [0, 1], atol=1e-12)
    assert s.directions.shape == (0, 2)
    assert s.canonical_key == (G_GRAVE, H_ACUTE)


def test_affine_solve_inconsistent(A):
    assert affine_solve(A, [F_BAR, G_GRAVE, H_ACUTE]) is None


def test_affine_solve_empty_generators(A):
    s = affine_solve(A, [])
    assert s.codim == 0 and s.canonical_key == ()
    np.testing.assert_array_equal(s.anchor, [0, 0])
    np.testing.assert_array_equal(s.directions, np.eye(2))


def test_affine_solve_bad_index(A):
    with pytest.raises(IndexError):
        affine_solve(A, [3])


def test_canonical_key_collects_extra_hyperplanes():
    # three lines through the origin: any two generate the same point
    P = Polyhedron.from_arrays([[1, 0], [0, 1], [1, 1]], [0, 0, 0])
    for gens in ([0, 1], [0, 2], [1, 2]):
        s = affine_solve(P, gens)
        assert s.canonical_key == (0, 1, 2)
        assert s.codim == 2
    # duplicated hyperplane joins the key of a line
    Q = Polyhedron.from_arrays([[1, 0], [2, 0]], [1, 2])
    s = affine_solve(Q, [0])
    assert s.canonical_key == (0, 1) and s.codim == 1


def test_project_affine_examples(A):
    np.testing.assert_allclose(project_affine(affine_solve(A, [F_BAR]), [1, 1]), [1, 0.5], atol=1e-12)
    np.testing.assert_allclose(project_affine(affine_solve(A, [G_GRAVE]), [1, 1]), [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(project_affine(AffineSpace.whole(2), [3, -7]), [3, -7])


def test_load_vector():
    np.testing.assert_array_equal(load_vector("1, 2.5"), [1, 2.5])
    np.testing.assert_array_equal(load_vector("[3, 4]"), [3, 4])


@st.composite
def systems(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, n))
    normals = draw(arrays(float, (k, n), elements=finite))
    offsets = draw(arrays(float, (k,), elements=finite))
    return normals, offsets


@given(systems())
def test_full_rank_systems_have_codim_k(sys_):
    normals, offsets = sys_
    k = normals.shape[0]
    s = np.linalg.svd(normals, compute_uv=False)
    if s[-1] < 1e-3 * max(1.0, s[0]) or np.any(np.linalg.norm(normals, axis=1) < 1e-3):
        return
    P = Polyhedron.from_arrays(normals, offsets)
    a = affine_solve(P, range(k))
    assert a is not None and a.codim == k


@given(systems(), arrays(float, (5,), elements=finite))
def test_affine_space_invariants(sys_, y):
    normals, offsets = sys_
    if np.any(np.linalg.norm(normals, axis=1) < 1e-3):
        return
    P = Polyhedron.from_arrays(normals, offsets)
    a = affine_solve(P, range(normals.shape[0]))
    if a is None:
        return
    D = a.directions
    np.testing.assert_allclose(D @ D.T, np.eye(D.shape[0]), atol=1e-9)
    assert a.codim == P.dimension - D.shape[0]
    assert set(a.generators) <= set(a.canonical_key)
    for pt in [a.anchor] + [a.anchor + d for d in D]:
        for i in a.canonical_key:
            scale = max(1.0, np.linalg.norm(normals[i]) * np.linalg.norm(pt))
            assert abs(normals[i] @ pt - offsets[i]) <= 1e-8 * scale
    y = y[: P.dimension]
    p1 = project_affine(a, y)
    np.testing.assert_allclose(project_affine(a, p1), p1, atol=1e-9 * max(1, np.linalg.norm(p1)))
    np.testing.assert_allclose(D @ (y - p1), 0, atol=1e-9 * max(1, np.linalg.norm(y)))


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_equal_keys_describe_equal_sets(seed, n):
    rng = np.random.default_rng(seed)
    # n+1 hyperplanes through one point, codim n with every n-subset
    x0 = rng.uniform(-3, 3, n)
    normals = rng.standard_normal((n + 1, n))
    P = Polyhedron.from_arrays(normals, normals @ x0)
    spaces = [affine_solve(P, [j for j in range(n + 1) if j != i]) for i in range(n + 1)]
    spaces = [s for s in spaces if s is not None and s.codim == n]
    for s in spaces[1:]:
        assert s.canonical_key == spaces[0].canonical_key
        np.testing.assert_allclose(s.anchor, spaces[0].anchor, atol=1e-7)
    # lines in 3D: two generator pairs for the same line
    if n == 3:
        L1 = affine_solve(P, [0, 1])
        extra = normals[0] + 2 * normals[1]
        Q = Polyhedron.from_arrays(np.vstack([normals[:2], extra]), np.append(normals[:2] @ x0, extra @ x0))
        L2 = affine_solve(Q, [0, 2])
        assert L2.canonical_key == (0, 1, 2)
        assert L1.contains(L2.anchor, 1e-7) and L2.contains(L1.anchor, 1e-7)
        np.testing.assert_allclose(np.linalg.norm(L2.directions @ L1.directions.T), 1.0, atol=1e-9)
