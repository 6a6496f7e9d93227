"""Independent reference computations used by the tests.

None of these share code with the package beyond reading a diagram's
port map: the bracket is a plain state sum, SAT is brute force and the
random moves only pick sites, leaving the move itself to the library.
"""

import itertools
import random
from collections import Counter

from topoforge.linkdiag import DiagramError, _Map, _bigon_sites, _triangle_sites, r1_minus_sites, reidemeister


# Laurent polynomials in A as Counter {exponent: coefficient}


def _mul(a, b):
    out = Counter()
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] += x * y
    return Counter({k: v for k, v in out.items() if v})


def _add(a, b):
    out = Counter(a)
    for k, v in b.items():
        out[k] += v
    return Counter({k: v for k, v in out.items() if v})


def _loops(nbr, pairing, n_free):
    """Number of closed curves after smoothing every crossing by ``pairing``."""
    m = len(nbr)
    seen = [False] * m
    loops = n_free
    for s in range(m):
        if seen[s]:
            continue
        loops += 1
        p = s
        while not seen[p]:
            seen[p] = True
            q = pairing[p]
            seen[q] = True
            p = nbr[q]
    return loops


def bracket(d):
    """Kauffman bracket by summing over all 2^n smoothings (normalized so a circle is 1)."""
    n = d.n_crossings
    d_loop = Counter({2: -1, -2: -1})
    total = Counter()
    for state in itertools.product((0, 1), repeat=n):
        pairing = [0] * (4 * n)
        a_count = 0
        for x, s in enumerate(state):
            o = d.over[x]
            X = 4 * x
            # A smoothing joins o+1 with o+2 and o+3 with o
            if s == 0:
                a_count += 1
                pairs = ((o + 1) & 3, (o + 2) & 3), ((o + 3) & 3, o)
            else:
                pairs = (o, (o + 1) & 3), ((o + 2) & 3, (o + 3) & 3)
            for i, j in pairs:
                pairing[X + i] = X + j
                pairing[X + j] = X + i
        loops = _loops(d.nbr, pairing, len(d.free))
        term = Counter({a_count - (n - a_count): 1})
        for _ in range(loops - 1):
            term = _mul(term, d_loop)
        total = _add(total, term)
    return total


def total_writhe(d):
    return sum(d.signs())


def normalized_bracket(d):
    """(-A^3)^(-w) <D>, an invariant of the oriented link."""
    w = total_writhe(d)
    sign = -1 if w % 2 else 1
    return Counter({k - 3 * w: sign * v for k, v in bracket(d).items()})


# random Reidemeister moves


def random_move(d, rng: random.Random, kinds=("R1+", "R1-", "R2+", "R2-", "R3")):
    """One random applicable move as (kind, site), or None if the chosen kind has no site."""
    m = _Map.of(d)
    kind = rng.choice(kinds)
    ports = m.live_ports()
    if kind == "R1+":
        if not ports:
            return None
        return kind, (rng.choice(ports), rng.choice((1, -1)), rng.choice((1, -1)))
    if kind == "R1-":
        sites = r1_minus_sites(m)
        return (kind, (rng.choice(sites),)) if sites else None
    if kind == "R2-":
        sites = _bigon_sites(m, range(m.n()))
        return (kind, (rng.choice(sites),)) if sites else None
    if kind == "R3":
        sites = _triangle_sites(m, range(m.n()))
        return (kind, (rng.choice(sites),)) if sites else None
    faces = [f for f in m.all_faces() if len(f) >= 2]
    if not faces:
        return None
    f = rng.choice(faces)
    da, db = rng.sample(f, 2)
    return kind, (da, db, rng.choice((True, False)))


def random_walk(d, steps: int, seed: int, kinds=("R1+", "R1-", "R2+", "R2-", "R3")):
    rng = random.Random(seed)
    out = d
    for _ in range(steps):
        mv = random_move(out, rng, kinds)
        if mv is None:
            continue
        try:
            out = reidemeister(out, *mv)
        except DiagramError:  # e.g. R2+ across one edge, or a blocked R3
            pass
    return out


def brute_force_sat(formula):
    """All satisfying assignments by enumeration."""
    vs = formula.variables
    sat = []
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if all(any(a[abs(l)] == (l > 0) for l in cl) for cl in formula.clauses):
            sat.append(a)
    return sat
