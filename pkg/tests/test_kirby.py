import itertools
import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import ringed
from oracles import brute_force_sat
from topoforge.geometry import closed_braid
from topoforge.homology import AbelianGroup
from topoforge.kirby import (
    Certificate,
    KirbyError,
    NotSatisfying,
    NotTwistReady,
    SurgeredLink,
    braid_closure,
    erase_trivial,
    hopf_pair_is_sphere,
    replay,
    rolfsen_twist,
    surgery_h1,
    verify_assignment,
)
from topoforge.linkdiag import Component, LinkDiagram, linking_matrix, validate
from topoforge.reduction import parse_dimacs, random_formula, reduce_formula
from topoforge.slope import EMPTY, INF, Slope


def unknot(r):
    return braid_closure(1, labels=("u",), coefficients=(r,))


def test_surgery_h1_examples():
    assert surgery_h1(unknot(Slope(3, 2))) == AbelianGroup(0, (3,))
    assert surgery_h1(unknot(Slope(1, 1))).is_trivial
    assert surgery_h1(unknot(EMPTY)) == AbelianGroup(1, ())
    clasp = braid_closure(4, coefficients=(Slope(3, 2), Slope(3, 1)))
    assert linking_matrix(clasp)[0][1] == 2
    assert surgery_h1(clasp).is_trivial


def test_hopf_criterion():
    assert hopf_pair_is_sphere(Slope(3, 2), Slope(1, 1), 1)
    assert hopf_pair_is_sphere(Slope(-1, 2), Slope(-3, 2), 1)
    assert not hopf_pair_is_sphere(Slope(3, 2), Slope(3, 1), 1)
    assert surgery_h1(braid_closure(2, coefficients=(Slope(3, 2), Slope(3, 1)))) == AbelianGroup(0, (7,))
    with pytest.raises(KirbyError):
        hopf_pair_is_sphere(EMPTY, INF, 1)


@pytest.mark.parametrize("n", [1, 2, 3, -2])
def test_linked_unknots_a(n):
    link = SurgeredLink(braid_closure(2, coefficients=(Slope(1, n), INF)))
    out = rolfsen_twist(link, 0, -n)
    assert out.coefficients == [INF, INF]
    out = erase_trivial(erase_trivial(out, 0), 0)
    assert out.diagram.n_components == 0


def test_linked_unknots_b():
    k, n = 2, 2
    link = braid_closure(2, coefficients=(Slope(-1, k), Slope(1 - k * n, n)))
    out = rolfsen_twist(link, 0, k)
    assert out.coefficients == [INF, Slope(1, n)]
    assert surgery_h1(out) == surgery_h1(link)


def test_twist_coefficient_substitution():
    circle = LinkDiagram([], [], [], [], [Component("u", Slope(3, 2))], free=[0])
    out = rolfsen_twist(circle, 0, 1)
    assert out.coefficients == [Slope(3, 5)]
    assert surgery_h1(out) == surgery_h1(circle)


def test_twist_preconditions():
    with pytest.raises(KirbyError):
        rolfsen_twist(braid_closure(2, coefficients=(EMPTY, INF)), 0, 1)
    with pytest.raises(NotTwistReady):
        rolfsen_twist(closed_braid([1, 1, 1], 2).with_coefficients({0: Slope(1, 1)}), 0, 1)
    with pytest.raises(KirbyError):
        erase_trivial(SurgeredLink(unknot(Slope(3, 2))), 0)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.integers(-3, 3))
def test_twist_invariance(seed, t):
    link = ringed(seed)
    d = link.diagram
    c = d.index_of("ring")
    lk = linking_matrix(d)
    out = rolfsen_twist(link, c, t)
    e = out.diagram
    assert validate(e).valid
    assert surgery_h1(out) == surgery_h1(link)
    lk2 = linking_matrix(e)
    k = d.n_components
    for i in range(k):
        for j in range(k):
            if i != j:
                assert lk2[i][j] == lk[i][j] + t * lk[i][c] * lk[j][c]
    for i in range(k):
        r = d.coefficient(i)
        if i == c:
            assert e.coefficient(i) == r.twisted(t)
        elif r.empty:
            assert e.coefficient(i).empty
        else:
            assert e.coefficient(i) == r.add_integer(t * lk[i][c] ** 2)
    back = rolfsen_twist(out, c, -t)
    assert back.coefficients == link.coefficients


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_erase_invariance(seed):
    link = ringed(seed).diagram
    link = link.with_coefficients({link.index_of("ring"): INF})
    before = surgery_h1(link)
    after = erase_trivial(SurgeredLink(link), "ring")
    assert after.diagram.n_components == link.n_components - 1
    assert surgery_h1(after) == before


def test_example_certificate(example_formula):
    cert = verify_assignment(example_formula, {1: True, 2: False, 3: False, 4: False})
    assert cert.verdict == "S3"
    assert cert.final.n_components == 0
    final = replay(cert, check_homology=False)
    assert final.dumps() == cert.final.dumps()
    again = Certificate.from_json(cert.dumps())
    assert replay(again).dumps() == cert.final.dumps()


def test_unsatisfying_rejected(example_formula):
    with pytest.raises(NotSatisfying, match="not a satisfying assignment"):
        verify_assignment(example_formula, {1: False, 2: False, 3: False, 4: False})


def test_tampered_certificate_fails(example_formula):
    cert = verify_assignment(example_formula, {1: True, 2: False, 3: False, 4: False})
    data = cert.to_json()
    fills = [m for m in data["moves"] if m["move"] == "fill"]
    assert fills
    data["moves"] = [m for m in data["moves"] if m is not fills[0]]
    with pytest.raises(Exception):
        out = replay(Certificate.from_json(data))
        assert out.dumps() == cert.final.dumps()


FORMULAS = [
    "p cnf 3 1\n1 2 3 0\n",
    "p cnf 3 1\n-1 -2 -3 0\n",
    "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n",
    "p cnf 4 2\n1 2 3 0\n-2 3 4 0\n",
    "p cnf 4 3\n1 -2 3 0\n-1 2 4 0\n-3 -4 1 0\n",
    "p cnf 3 3\n1 2 3 0\n-1 2 3 0\n1 -2 -3 0\n",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_exhaustive_small_formulas(text):
    f = parse_dimacs(text)
    red = reduce_formula(f)
    sat = {tuple(sorted(a.items())) for a in brute_force_sat(f)}
    for bits in itertools.product((False, True), repeat=f.n_vars):
        a = dict(zip(f.variables, bits))
        if tuple(sorted(a.items())) in sat:
            assert verify_assignment(f, a, reduction=red).verdict == "S3"
        else:
            with pytest.raises(NotSatisfying):
                verify_assignment(f, a, reduction=red)


def test_random_formula_certificate():
    f = random_formula(4, seed=11)
    sol = brute_force_sat(f)
    assert sol
    cert = verify_assignment(f, sol[0])
    assert replay(cert).n_components == 0
