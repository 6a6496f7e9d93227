import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from topoforge.geometry import PolyLink
from topoforge.linkdiag import linking_matrix, simplify_greedy, validate, writhe
from topoforge.reduction import (
    CLASP_COEFFICIENT,
    FormulaError,
    _diagram,
    _ring,
    _variable_components,
    band_sum,
    cable_2_1,
    clasp_label,
    clause_gadget,
    literal_label,
    parse_dimacs,
    random_formula,
    reduce_formula,
    route_arcs,
    variable_gadget,
)


def unbanded(formula):
    """Gadgets and rings of the construction before any band sum."""
    layout = route_arcs(formula)
    comps = []
    for v in formula.variables:
        pl = layout.variables[v]
        cs, _ = _variable_components(v, pl.x0, len(pl.ports[v]), len(pl.ports[-v]), True)
        comps += cs
    for k, cx in layout.clauses.items():
        for L in "ABC":
            comps.append(_ring(k, L, cx, -layout.depth))
    return layout, PolyLink(comps)


def test_parse_examples():
    f = parse_dimacs("p cnf 4 2\n1 2 3 0\n-2 3 4 0\n")
    assert f.n_vars == 4 and len(f.clauses) == 2
    assert f.size == 8
    with pytest.raises(FormulaError, match="repeated variable"):
        parse_dimacs("p cnf 2 1\n1 1 2 0\n")
    with pytest.raises(FormulaError, match="clause size"):
        parse_dimacs("p cnf 3 1\n1 2 0\n")
    with pytest.raises(FormulaError, match="occurs in no clause"):
        parse_dimacs("p cnf 4 1\n1 2 3 0\n")
    with pytest.raises(FormulaError):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n")


def test_dimacs_roundtrip():
    f = random_formula(7, seed=2)
    assert parse_dimacs(f.to_dimacs()) == f


def test_variable_gadget():
    d = variable_gadget(1)
    assert d.n_crossings == 16
    assert d.n_components == 3
    assert validate(d).valid
    g, kp, km = d.index_of(clasp_label(1)), d.index_of(literal_label(1)), d.index_of(literal_label(-1))
    assert writhe(d, g) == 0
    assert linking_matrix(d)[kp][km] == 0


def test_clause_gadget_is_borromean():
    d = clause_gadget(0)
    assert d.n_crossings == 6
    assert d.n_components == 3
    lk = linking_matrix(d)
    assert all(lk[a][b] == 0 for a in range(3) for b in range(3))
    for drop in range(3):
        rest = simplify_greedy(d.sublink([c for c in range(3) if c != drop])).diagram
        assert rest.n_crossings == 0
        assert rest.n_components == 2
    # the three rings together do not fall apart
    assert simplify_greedy(d).diagram.n_crossings == 6


def test_example_routing(example_formula):
    layout = route_arcs(example_formula)
    assert len(layout.arcs) == 6
    assert layout.arc_crossings <= math.comb(6, 2)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 9), st.integers(0, 1000))
def test_arc_crossing_bound(n, seed):
    f = random_formula(n, seed=seed)
    layout = route_arcs(f)
    assert len(layout.arcs) == 3 * n
    assert layout.arc_crossings <= math.comb(3 * n, 2)


def test_band_sums_merge_and_add_linking(example_formula):
    layout, link = unbanded(example_formula)
    before = _diagram(link)
    for arc in layout.arcs:
        d0 = _diagram(link)
        lit = literal_label(arc.literal)
        ring = f"r{arc.clause}{arc.letter}"
        lk0 = linking_matrix(d0)
        a, b = d0.index_of(lit), d0.index_of(ring)
        link = band_sum(link, arc)
        d1 = _diagram(link)
        assert d1.n_components == d0.n_components - 1
        lk1 = linking_matrix(d1)
        m = d1.index_of(lit)
        for lab in d1.labels():
            if lab == lit:
                continue
            c0, c1 = d0.index_of(lab), d1.index_of(lab)
            assert lk1[m][c1] == lk0[a][c0] + lk0[b][c0]
    after = _diagram(link)
    assert after.n_crossings == before.n_crossings + 4 * layout.arc_crossings


def test_cable_doubles_linking(example_formula):
    layout, link = unbanded(example_formula)
    for arc in layout.arcs:
        link = band_sum(link, arc)
    d0 = _diagram(link)
    lab = literal_label(1)
    c = d0.index_of(lab)
    self_x = sum(1 for x in range(d0.n_crossings) if d0.strand_components(x) == (c, c))
    mutual = sum(1 for x in range(d0.n_crossings) if len(set(d0.strand_components(x))) == 2
                 and c in d0.strand_components(x))
    link2 = cable_2_1(link, lab)
    d1 = _diagram(link2)
    assert d1.n_crossings == d0.n_crossings + 3 * self_x + mutual + 1
    lk0, lk1 = linking_matrix(d0), linking_matrix(d1)
    for other in d0.labels():
        if other != lab:
            assert lk1[d1.index_of(lab)][d1.index_of(other)] == 2 * lk0[c][d0.index_of(other)]
    with pytest.raises(Exception):
        cable_2_1(link, clasp_label(1))


def test_census(example_formula):
    res = reduce_formula(example_formula)
    d = res.diagram
    assert d.n_components == 12
    coeffs = [c.coefficient for c in d.components]
    assert sum(c.empty for c in coeffs) == 8
    assert sum(c == CLASP_COEFFICIENT for c in coeffs) == 4
    assert set(res.stats["variable_gadget_crossings"].values()) == {16}
    assert set(res.stats["clause_gadget_crossings"].values()) == {6}
    assert validate(d).valid


@settings(max_examples=8, deadline=None)
@given(st.integers(1, 6), st.integers(0, 1000))
def test_linking_pattern(n, seed):
    f = random_formula(n, seed=seed)
    d = reduce_formula(f).diagram
    assert validate(d).valid
    assert d.n_components == 3 * f.n_vars
    lk = linking_matrix(d)
    for v in f.variables:
        g = d.index_of(clasp_label(v))
        assert d.coefficient(g) == CLASP_COEFFICIENT
        for lit in (v, -v):
            k = d.index_of(literal_label(lit))
            assert d.coefficient(k).empty
            assert abs(lk[g][k]) == 2
        for c in range(d.n_components):
            if c != g and c not in (d.index_of(literal_label(v)), d.index_of(literal_label(-v))):
                assert lk[g][c] == 0
    lits = [d.index_of(literal_label(s * v)) for v in f.variables for s in (1, -1)]
    for a, b in itertools.combinations(lits, 2):
        assert lk[a][b] == 0


def test_deterministic(example_formula):
    assert reduce_formula(example_formula).diagram.dumps() == reduce_formula(example_formula).diagram.dumps()


def test_warmup_builds():
    res = reduce_formula(random_formula(3, seed=1), warmup=True)
    assert validate(res.diagram).valid
    assert res.stats["warmup"] and not res.stats["cabled"]
