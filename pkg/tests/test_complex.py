import numpy as np
from hypothesis import given, settings, strategies as st

from test_homology import RP2_6, TORUS_7, klein_bottle
from topoforge.complex import SimplicialComplex, _face_keys, _sorted_unique, _split_unique, _unpack, faces_of, \
    surface_components, unique_rows

S3 = [[a for a in range(5) if a != k] for k in range(5)]


def cone(tris, apex):
    return [list(t) + [apex] for t in tris]


def test_sphere_is_closed_manifold():
    rep = SimplicialComplex(np.array(S3)).manifold_report()
    assert rep.ok
    assert rep.euler == 0
    assert rep.boundary_components == []


def test_ball_boundary_is_sphere():
    rep = SimplicialComplex(np.array([[0, 1, 2, 3], [1, 2, 3, 4]])).manifold_report()
    assert rep.ok
    assert [c["euler"] for c in rep.boundary_components] == [2]


def test_cone_on_torus_fails_at_apex():
    rep = SimplicialComplex(np.array(cone(TORUS_7, 7))).manifold_report()
    assert not rep.ok
    assert rep.bad_vertex_links == 1


def test_three_tets_on_a_triangle():
    rep = SimplicialComplex(np.array([[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]])).manifold_report()
    assert not rep.ok
    assert rep.bad_triangles == 1


def test_repeated_tet_is_not_simplicial():
    assert not SimplicialComplex(np.array([[0, 1, 2, 3], [0, 1, 2, 3]])).is_simplicial()
    assert SimplicialComplex(np.array(S3)).is_simplicial()


def test_surface_classification():
    (t,) = surface_components(np.array(TORUS_7))
    assert t["is_torus"] and t["genus"] == 1
    (p,) = surface_components(np.array(RP2_6))
    assert p["closed"] and p["orientable"] is False and p["euler"] == 1
    (k,) = surface_components(np.array(klein_bottle()))
    assert k["euler"] == 0 and k["orientable"] is False and not k["is_torus"]
    both = surface_components(np.array(TORUS_7 + [[a + 10 for a in r] for r in RP2_6]))
    assert sorted(c["euler"] for c in both) == [0, 1]


def test_open_surface():
    (d,) = surface_components(np.array([[0, 1, 2], [0, 2, 3]]))
    assert not d["closed"] and d["orientable"] is None


rows = st.integers(1, 40).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 30), min_size=4, max_size=4, unique=True), min_size=n, max_size=n)
)


@settings(max_examples=60, deadline=None)
@given(rows, st.integers(1, 3))
def test_packed_faces_agree(tets, k):
    top = np.sort(np.array(tets), axis=1)
    ref, ref_counts = unique_rows(faces_of(top, k), return_counts=True)
    keys, counts = _sorted_unique(_face_keys(top, k, 31))
    assert np.array_equal(_unpack(keys, 31, k + 1), ref)
    assert np.array_equal(counts, ref_counts)
    split, split_counts = _split_unique(top, k, 31)
    assert np.array_equal(split, ref)
    assert np.array_equal(split_counts, ref_counts)
