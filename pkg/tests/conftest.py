import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from topoforge.geometry import closed_braid  # noqa: E402
from topoforge.kirby import insert_ring  # noqa: E402
from topoforge.linkdiag import _Map  # noqa: E402
from topoforge.reduction import parse_dimacs  # noqa: E402
from topoforge.slope import EMPTY, INF, Slope  # noqa: E402

EXAMPLE_DIMACS = "p cnf 4 2\n1 2 3 0\n-2 3 4 0\n"


@pytest.fixture(scope="session")
def example_formula():
    return parse_dimacs(EXAMPLE_DIMACS)


def random_coefficient(rng: random.Random) -> Slope:
    r = rng.random()
    if r < 0.2:
        return EMPTY
    if r < 0.3:
        return INF
    return Slope(rng.randint(-5, 5) or 1, rng.choice((1, 1, 2, 3)))


def random_link(seed: int, max_strands: int = 4, max_len: int = 7):
    """Closed braid with random coefficients; mixes knots and links of up to four components."""
    rng = random.Random(seed)
    n = rng.randint(2, max_strands)
    word = [rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(1, max_len))]
    d = closed_braid(word, n)
    return d.with_coefficients({c: random_coefficient(rng) for c in range(d.n_components)})


def ringed(seed):
    """Random closed braid plus a twist-ready ring around one or two parallel strands."""
    rng = random.Random(seed)
    d = random_link(seed)
    m = _Map.of(d)
    p = rng.choice(m.live_ports())
    darts = [p]
    if rng.random() < 0.6:
        others = [r for r in m.face_of(p) if r != p and {m.nbr[r], r} != {p, m.nbr[p]}]
        if others:
            darts.append(m.nbr[rng.choice(others)])
    coeff = INF if rng.random() < 0.3 else random_coefficient(rng)
    if coeff.empty:
        coeff = Slope(rng.choice((1, -1, 2, 3)), 1)
    return insert_ring(d, darts, "ring", coeff)
