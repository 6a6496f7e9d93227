import io

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from topoforge.geometry import closed_braid
from topoforge.homology import AbelianGroup
from topoforge.kirby import braid_closure, surgery_h1
from topoforge.linkdiag import Component, LinkDiagram, linking_matrix, validate, writhe
from topoforge.slope import EMPTY, INF, Slope
from topoforge.triangulate import (
    TriangulationError,
    drill,
    gluing_arrays,
    preprocess,
    realize_slope,
    refined_class,
    triangulate_sphere_with_link,
    triangulate_surgered,
)


def unknot(r):
    return braid_closure(1, labels=("u",), coefficients=(r,))


def circles(n, r=EMPTY):
    return LinkDiagram([], [], [], [], [Component(f"o{i}", r) for i in range(n)], free=list(range(n)))


def exterior(d):
    return drill(triangulate_sphere_with_link(preprocess(d)))


def test_sphere_with_link_is_s3():
    tri = triangulate_sphere_with_link(preprocess(closed_braid([1, 1, 1], 2)))
    rep = tri.manifold_report()
    assert rep.ok and rep.euler == 0 and not rep.boundary_components
    assert tri.h1().is_trivial


def test_empty_link_is_s3():
    tri = triangulate_surgered(LinkDiagram([], [], [], [], []))
    assert tri.n_tets == 5
    assert tri.manifold_report().ok
    assert tri.h1().is_trivial


def test_preprocess_counts():
    kink = preprocess(unknot(EMPTY))
    assert kink.n_crossings == 3 and validate(kink).monogons == 0
    assert preprocess(circles(1)).n_crossings == 6
    two = preprocess(circles(2))
    assert two.n_crossings == 2 and validate(two).valid
    assert linking_matrix(two) == [[0, 0], [0, 0]]


@pytest.mark.parametrize("word,strands", [([1, 1, 1], 2), ([1, 1], 2), ([1, -2, 1, -2], 3), ([1, 2] * 3, 3)])
def test_preprocess_keeps_invariants(word, strands):
    d = closed_braid(word, strands)
    e = preprocess(d)
    assert validate(e).valid
    assert linking_matrix(e) == linking_matrix(d)
    assert [writhe(e, c) for c in range(e.n_components)] == [writhe(d, c) for c in range(d.n_components)]
    assert validate(e).monogons == 0


@pytest.mark.parametrize("word,strands,k", [([1, 1, 1], 2, 1), ([1, 1], 2, 2), ([1, 2] * 3, 3, 3), ([1, -2, 1, -2], 3, 1)])
def test_exterior_homology(word, strands, k):
    ext = exterior(closed_braid(word, strands))
    rep = ext.manifold_report()
    assert rep.ok and rep.euler == 0
    assert len(rep.boundary_components) == k
    assert all(c["is_torus"] for c in rep.boundary_components)
    assert ext.h1() == AbelianGroup(k, ())


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (3, 2), (5, 3), (0, 1), (-7, 2), (1, 0)])
def test_lens_spaces(p, q):
    r = INF if (p, q) == (1, 0) else Slope(p, q)
    tri = triangulate_surgered(unknot(r), check=True)
    expect = AbelianGroup(1, ()) if p == 0 else AbelianGroup(0, (abs(p),) if abs(p) > 1 else ())
    assert tri.h1() == expect == surgery_h1(unknot(r))


@pytest.mark.parametrize("a,b", [(Slope(3, 2), Slope(1, 1)), (Slope(3, 2), Slope(3, 1)), (Slope(2, 1), EMPTY), (Slope(0, 1), Slope(0, 1))])
def test_hopf_fillings(a, b):
    link = braid_closure(2, coefficients=(a, b))
    tri = triangulate_surgered(link, check=True)
    assert tri.h1() == surgery_h1(link)


@pytest.mark.parametrize("word,strands", [([1, 1, 1], 2), ([-1, -1, -1], 2), ([1, 1], 2)])
@pytest.mark.parametrize("p,q", [(1, 0), (0, 1), (3, 2), (-2, 5), (7, 1)])
def test_realized_slope_class(word, strands, p, q):
    ext = exterior(closed_braid(word, strands))
    tor = ext.tori[0]
    curve = realize_slope(tor, Slope(p, q))
    assert curve.klass == (p, q)
    assert tuple(refined_class(tor, curve)) in ((p, q), (-p, -q))
    assert curve.is_simple()


def test_empty_slope_has_no_curve():
    ext = exterior(unknot(EMPTY))
    with pytest.raises(TriangulationError):
        realize_slope(ext.tori[0], EMPTY)


def test_gluing_table_consistent():
    tri = triangulate_surgered(braid_closure(2, coefficients=(Slope(3, 2), EMPTY)))
    nbr, perm = gluing_arrays(tri.tets)
    tets = np.sort(tri.tets, axis=1)
    for t in range(0, len(tets), 97):
        for i in range(4):
            n = nbr[t, i]
            if n < 0:
                continue
            assert t in nbr[n]
            for k in range(4):
                if k != i:
                    assert tets[n][perm[t, i, k]] == tets[t][k]
    lines = tri.gluing_table().splitlines()
    assert len(lines) == tri.n_tets
    assert lines[0].startswith("0 | ")
    boundary = sum(line.count("-1,----") for line in lines)
    assert boundary == sum(len(c) for c in [tor.triangles for tor in tri.open_tori()])
    buf = io.StringIO()
    tri.write_gluing_table(buf, chunk=7)
    assert buf.getvalue() == tri.gluing_table()


def test_deterministic_export():
    link = closed_braid([1, 2, -1, 2], 3).with_coefficients({0: Slope(3, 2)})
    a, b = triangulate_surgered(link), triangulate_surgered(link)
    assert a.dumps() == b.dumps()
    assert a.gluing_table() == b.gluing_table()


def test_free_loops_fill():
    tri = triangulate_surgered(circles(2, Slope(2, 1)), check=True)
    assert tri.h1() == AbelianGroup(0, (2, 2))


@settings(max_examples=6, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=4), st.integers(-3, 3))
def test_closed_torus_boundary_and_euler(word, p):
    d = closed_braid(word, 3)
    coeffs = {c: (EMPTY if c % 2 else Slope(p or 1, 1)) for c in range(d.n_components)}
    tri = triangulate_surgered(d.with_coefficients(coeffs))
    rep = tri.manifold_report()
    assert rep.ok and rep.euler == 0
    assert all(c["is_torus"] for c in rep.boundary_components)
    assert len(rep.boundary_components) == sum(1 for r in coeffs.values() if r.empty)
