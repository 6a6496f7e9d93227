import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from topoforge.complex import SimplicialComplex
from topoforge.homology import AbelianGroup, boundary_matrices, h1, presentation_group, smith_normal_form

TORUS_7 = [[i, (i + 1) % 7, (i + 3) % 7] for i in range(7)] + [[i, (i + 2) % 7, (i + 3) % 7] for i in range(7)]
RP2_6 = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1], [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3]]


def klein_bottle(n=4):
    """n x n grid on a square whose top edge is glued to the bottom edge reversed."""
    def v(i, j):
        if j == n:
            i, j = -i, 0
        return (i % n) * n + j

    tris = []
    for i in range(n):
        for j in range(n):
            a, b, c, d = v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)
            tris += [[a, b, d], [a, d, c]]
    return tris


def dense(m):
    return [[int(x) for x in row] for row in m.to_dense()]


def rank(mat):
    factors, _, _ = smith_normal_form(mat) if mat and mat[0] else ([], None, None)
    return sum(1 for f in factors if f)


def test_torus_ranks_and_h1():
    cx = SimplicialComplex(np.array(TORUS_7))
    d1, d2, _ = boundary_matrices(cx)
    assert rank(dense(d1)) == 6
    assert rank(dense(d2)) == 13
    assert h1(cx) == AbelianGroup(2, ())


def test_surfaces():
    assert h1(SimplicialComplex(np.array(RP2_6))) == AbelianGroup(0, (2,))
    kb = SimplicialComplex(np.array(klein_bottle()))
    assert kb.euler_characteristic() == 0
    assert h1(kb) == AbelianGroup(1, (2,))


def test_boundary_squares_to_zero():
    cx = SimplicialComplex(np.array([[0, 1, 2, 3], [1, 2, 3, 4], [0, 2, 3, 5]]))
    d1, d2, d3 = boundary_matrices(cx)
    assert d1.matmul(d2).is_zero()
    assert d2.matmul(d3).is_zero()


def test_sphere_and_ball():
    s3 = SimplicialComplex(np.array([[a for a in range(5) if a != k] for k in range(5)]))
    assert h1(s3).is_trivial
    assert s3.euler_characteristic() == 0
    assert h1(SimplicialComplex(np.array([[0, 1, 2, 3]]))).is_trivial


def test_presentation():
    assert presentation_group(2, [{0: 2, 1: 4}, {0: 6, 1: 6}]) == AbelianGroup(0, (2, 6))
    assert presentation_group(3, [{0: 1}]) == AbelianGroup(2, ())
    assert str(AbelianGroup(1, (4, 2))) == "Z + Z/2 + Z/4"


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_against_sympy(m):
    factors, u, v = smith_normal_form(m)
    mu, mm, mv = Matrix(u), Matrix(m), Matrix(v)
    d = mu * mm * mv
    r, c = len(m), len(m[0])
    for i in range(r):
        for j in range(c):
            assert d[i, j] == (factors[i] if i == j else 0)
    assert abs(mu.det()) == 1 and abs(mv.det()) == 1
    nz = [f for f in factors if f]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    ref = sympy_snf(mm, domain=ZZ)
    ref_diag = sorted(abs(int(ref[i, i])) for i in range(min(r, c)))
    assert sorted(factors[: min(r, c)]) == ref_diag


def test_snf_frozen():
    factors, _, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert factors == [2, 6, 12]
    with pytest.raises(Exception):
        AbelianGroup(-1, ())
