"""From a restricted 3-CNF formula to a planar link diagram with surgery coefficients.

Everything is drawn first as closed plane polylines (see ``geometry``) and
converted to a port map at the end.  One resolver decides every over/under
choice from segment tags:

* literal of x over literal of not-x inside a variable gadget,
* clasp top edge over, clasp bottom edge under (a single clasp per literal),
* clause rings cyclically: A over B, B over C, C over A,
* bands: the band of the smaller arc id passes over,
* cable copies inherit the rule of the segment they copy; the two diagonals
  of the cable join cross with a fixed handedness.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import PolyComponent, PolyLink, offset_polyline, segment_crossings
from .linkdiag import DiagramError, LinkDiagram
from .slope import EMPTY, Slope

__all__ = [
    "Formula",
    "FormulaError",
    "parse_dimacs",
    "random_formula",
    "variable_gadget",
    "clause_gadget",
    "Arc",
    "GadgetLayout",
    "route_arcs",
    "band_sum",
    "cable_2_1",
    "ReductionResult",
    "reduce_formula",
    "literal_label",
    "clasp_label",
    "CLASP_COEFFICIENT",
]

CLASP_COEFFICIENT = Slope(3, 2)

BAND_HALF_WIDTH = 0.15
CABLE_OFFSET = 0.03
FINGER_HALF_WIDTH = 0.4
# Sign of the cable join for literals x (+1) and not-x (-1): +1 puts the
# diagonal leaving the left copy over the other one.
JOIN_HANDEDNESS = {+1: +1, -1: +1}


class FormulaError(ValueError):
    pass


# ---------------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Formula:
    """3-CNF with exactly three literals over three distinct variables per clause."""

    n_vars: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        used = set()
        for k, cl in enumerate(self.clauses):
            if len(cl) != 3:
                raise FormulaError(f"clause {k + 1}: clause size ≠ 3 (got {len(cl)})")
            vs = [abs(l) for l in cl]
            if 0 in vs:
                raise FormulaError(f"clause {k + 1}: literal 0")
            if len(set(vs)) != 3:
                raise FormulaError(f"clause {k + 1}: repeated variable")
            if max(vs) > self.n_vars:
                raise FormulaError(f"clause {k + 1}: variable {max(vs)} exceeds declared count")
            used.update(vs)
        missing = sorted(set(range(1, self.n_vars + 1)) - used)
        if missing:
            raise FormulaError(f"variable {missing[0]} occurs in no clause")

    @property
    def variables(self) -> List[int]:
        return list(range(1, self.n_vars + 1))

    @property
    def size(self) -> int:
        """Number of literal occurrences plus number of clauses."""
        return 4 * len(self.clauses)

    def evaluate(self, assignment: Dict[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in cl) for cl in self.clauses)

    def occurrences(self, literal: int) -> List[int]:
        return [k for k, cl in enumerate(self.clauses) if literal in cl]

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in cl) + " 0" for cl in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Formula:
    n_vars = None
    n_clauses = None
    clauses: List[Tuple[int, ...]] = []
    cur: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"line {lineno}: bad problem line")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise FormulaError(f"line {lineno}: bad token {tok!r}") from None
            if v == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(tuple(cur))
    if n_vars is None:
        n_vars = max((abs(l) for cl in clauses for l in cl), default=0)
    if n_clauses is not None and n_clauses != len(clauses):
        raise FormulaError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return Formula(n_vars, tuple(clauses))  # type: ignore[arg-type]


def random_formula(n_clauses: int, n_vars: Optional[int] = None, seed: int = 0) -> Formula:
    """Random restricted formula in which every variable occurs."""
    rng = random.Random(seed)
    if n_vars is None:
        n_vars = max(3, (3 * n_clauses) // 4)
    if not 3 <= n_vars <= 3 * n_clauses:
        raise FormulaError("need 3 <= variables <= 3 * clauses")
    pool = list(range(1, n_vars + 1))
    rng.shuffle(pool)
    clauses = []
    for k in range(n_clauses):
        forced = pool[3 * k:3 * k + 3]
        rest = [v for v in range(1, n_vars + 1) if v not in forced]
        vs = forced + rng.sample(rest, 3 - len(forced))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Formula(n_vars, tuple(clauses))


# ---------------------------------------------------------------------------------
# labels and the over/under rule


def literal_label(lit: int) -> str:
    return f"k{'+' if lit > 0 else '-'}{abs(lit)}"


def clasp_label(v: int) -> str:
    return f"g{v}"


_RING_OVER = {("A", "B"), ("B", "C"), ("C", "A")}


def _base(tag):
    while tag[0] == "cable":
        tag = tag[2]
    return tag


def resolve(tag_a: Hashable, tag_b: Hashable, point=None) -> bool:
    """True when the segment tagged tag_a passes over the one tagged tag_b."""
    if tag_a[0] == "join" and tag_b[0] == "join" and tag_a[1] == tag_b[1]:
        eps = tag_a[3]
        return (tag_a[2] == 1) == (eps > 0)
    a, b = _base(tag_a), _base(tag_b)
    ka, kb = a[0], b[0]
    if ka == "kappa" and kb == "kappa" and a[1] == b[1] and a[2] != b[2]:
        return a[2] > 0
    if ka == "gamma" and kb == "kappa":
        return a[2] == "top"
    if ka == "kappa" and kb == "gamma":
        return b[2] != "top"
    if ka == "ring" and kb == "ring" and a[1] == b[1] and a[2] != b[2]:
        return (a[2], b[2]) in _RING_OVER
    if ka == "band" and kb == "band" and a[1] != b[1]:
        return a[1] < b[1]
    raise DiagramError(f"no over/under rule for {tag_a} against {tag_b} at {point}")


def _diagram(link: PolyLink) -> LinkDiagram:
    return link.to_diagram(resolve)[0]


# ---------------------------------------------------------------------------------
# gadgets


def _kappa_plus(v: int, x0: float, ports: int, teeth: bool) -> Tuple[List, List, float]:
    wp = ports + 1
    tg = lambda part: ("kappa", v, +1, part)
    pts = [(x0, 0.0)]
    tags = [tg("bottom")]
    pts.append((x0 + wp, 0.0)); tags.append(tg("side"))
    if teeth:
        pts.append((x0 + wp, 4.0)); tags.append(tg("arm"))
        for j in range(6):
            t = x0 + wp + 1.5 + 0.5 * j
            pts += [(t - 0.1, 4.0), (t - 0.1, 2.6), (t + 0.1, 2.6), (t + 0.1, 4.0)]
            tags += [tg("tooth"), tg("tooth"), tg("tooth"), tg("arm")]
        end = x0 + wp + 4.5
        pts += [(end, 4.0), (end, 4.5)]
        tags += [tg("arm"), tg("top")]
        pts.append((x0, 4.5)); tags.append(tg("join"))
    else:
        pts.append((x0 + wp, 3.0)); tags.append(tg("top"))
        pts.append((x0, 3.0)); tags.append(tg("join"))
    return pts, tags, wp


def _kappa_minus(v: int, xm: float, width: float) -> Tuple[List, List]:
    tg = lambda part: ("kappa", v, -1, part)
    pts = [(xm, 0.0), (xm + width, 0.0), (xm + width, 3.0), (xm, 3.0)]
    tags = [tg("bottom"), tg("join"), tg("top"), tg("side")]
    return pts, tags


def _gamma(v: int, wp: float, x0: float) -> Tuple[List, List]:
    tg = lambda part: ("gamma", v, part)
    a, b = x0 + wp - 0.5, x0 + wp + 1.5
    pts = [(a, 1.2), (b, 1.2), (b, 1.8), (a, 1.8)]
    tags = [tg("bottom"), tg("side"), tg("top"), tg("side")]
    return pts, tags


def _with_ports(pts, tags, xs: Sequence[float]):
    """Insert a pair of vertices at x +- band half width on the first (bottom) edge."""
    (ax, ay), (bx, _) = pts[0], pts[1]
    extra = []
    for x in sorted(xs):
        if not ax + BAND_HALF_WIDTH < x < bx - BAND_HALF_WIDTH:
            raise ValueError("port outside the bottom edge")
        extra += [(x - BAND_HALF_WIDTH, ay), (x + BAND_HALF_WIDTH, ay)]
    return [pts[0]] + extra + pts[1:], [tags[0]] * len(extra) + tags


@dataclass
class VariablePlacement:
    var: int
    x0: float
    width: float
    ports: Dict[int, List[float]]  # literal -> port x coordinates (left to right)


def _variable_components(v: int, x0: float, n_pos: int, n_neg: int, full: bool = True):
    kp, kp_tags, wp = _kappa_plus(v, x0, n_pos, teeth=full)
    wn = max(n_neg + 1, 4)
    xm = x0 + wp + 1
    km, km_tags = _kappa_minus(v, xm, wn)
    gp, g_tags = _gamma(v, wp, x0)
    ports = {v: [x0 + 1 + i for i in range(n_pos)], -v: [xm + 1 + i for i in range(n_neg)]}
    kp, kp_tags = _with_ports(kp, kp_tags, ports[v])
    km, km_tags = _with_ports(km, km_tags, ports[-v])
    comps = [
        PolyComponent(literal_label(v), kp, kp_tags, EMPTY, {"role": "literal", "literal": v}),
        PolyComponent(literal_label(-v), km, km_tags, EMPTY, {"role": "literal", "literal": -v}),
        PolyComponent(clasp_label(v), gp, g_tags, CLASP_COEFFICIENT, {"role": "clasp", "var": v}),
    ]
    return comps, VariablePlacement(v, x0, wp + 1 + wn, ports)


def variable_gadget(v: int, n_pos: int = 1, n_neg: int = 1, full: bool = True) -> LinkDiagram:
    """The three-component variable diagram: both literals and their clasp.

    The full gadget has 16 crossings: the clasp meets each literal twice and
    a comb of six teeth on the positive literal dips across the negative one.
    """
    comps, _ = _variable_components(v, 0.0, n_pos, n_neg, full)
    return _diagram(PolyLink(comps))


CLAUSE_WIDTH = 12.0
CLAUSE_HEIGHT = 16.0
_RINGS = {  # letter: (x0, y0, x1, y1, finger x)
    "A": (0.0, 2.0, 8.0, 10.0, 1.0),
    "B": (4.0, 0.0, 12.0, 8.0, 11.0),
    "C": (2.0, 4.0, 10.0, 14.0, 6.0),
}
LETTERS_BY_X = ("A", "C", "B")


def _ring(clause: int, letter: str, cx: float, top: float) -> PolyComponent:
    """Ring with a finger rising to the port line y = top; the gadget lies below it."""
    x0, y0, x1, y1, fx = _RINGS[letter]
    dy = top - CLAUSE_HEIGHT
    X0, Y0, X1, Y1, FX = cx + x0, dy + y0, cx + x1, dy + y1, cx + fx
    f = FINGER_HALF_WIDTH
    pts = [(FX - f, top), (FX - f, Y1), (X0, Y1), (X0, Y0), (X1, Y0), (X1, Y1), (FX + f, Y1), (FX + f, top)]
    tag = ("ring", clause, letter)
    return PolyComponent(f"r{clause}{letter}", pts, [tag] * len(pts), EMPTY, {"role": "ring", "port": (FX, top)})


def clause_gadget(clause: int = 0) -> LinkDiagram:
    """Borromean rings with cyclic over/under: 6 crossings, pairwise unlinked."""
    return _diagram(PolyLink([_ring(clause, L, 0.0, 0.0) for L in "ABC"]))


# ---------------------------------------------------------------------------------
# layout


@dataclass(frozen=True)
class Arc:
    id: int
    literal: int
    clause: int
    letter: str
    start: Tuple[float, float]
    end: Tuple[float, float]


@dataclass
class GadgetLayout:
    variables: Dict[int, VariablePlacement]
    clauses: Dict[int, float]
    letters: Dict[int, Dict[int, str]]  # clause -> literal -> ring letter
    arcs: List[Arc]
    depth: float  # clause port line sits at y = -depth
    arc_crossings: int = 0

    def to_json(self) -> dict:
        return {
            "variables": {str(v): {"x0": p.x0, "width": p.width} for v, p in sorted(self.variables.items())},
            "clauses": {str(c): x for c, x in sorted(self.clauses.items())},
            "depth": self.depth,
            "arcs": [
                {"id": a.id, "literal": a.literal, "clause": a.clause, "letter": a.letter,
                 "start": list(a.start), "end": list(a.end)}
                for a in self.arcs
            ],
            "arc_crossings": self.arc_crossings,
            "over_rule": "smaller arc id passes over",
        }


def _count_arc_crossings(arcs: Sequence[Arc]) -> int:
    if len(arcs) < 2:
        return 0
    a = np.array([[*x.start, *x.end] for x in arcs], dtype=float)
    n = len(arcs)
    ia, ib, _, _ = segment_crossings(
        a[:, 0], a[:, 1], a[:, 2], a[:, 3],
        np.arange(n), np.zeros(n, dtype=np.int64), np.full(n, 1, dtype=np.int64),
    )
    return len(ia)


def route_arcs(formula: Formula, full: bool = True) -> GadgetLayout:
    """Place gadgets in two rows and join every literal occurrence by a straight arc.

    Variables sit left to right in index order with their ports on y = 0.
    Clauses are ordered by the mean x of their variables and hang below the
    port line y = -depth.  Within a clause the ring letters go to literals
    by variable position, and each literal hands out its ports in the order
    of the rings it must reach, so two arcs cross at most once and only
    when their endpoints interleave.
    """
    placements: Dict[int, VariablePlacement] = {}
    x = 0.0
    for v in formula.variables:
        n_pos = len(formula.occurrences(v))
        n_neg = len(formula.occurrences(-v))
        _, pl = _variable_components(v, x, n_pos, n_neg, full)
        placements[v] = pl
        x += pl.width + 2.0
    centre = {v: p.x0 + p.width / 2 for v, p in placements.items()}
    order = sorted(range(len(formula.clauses)),
                   key=lambda k: (sum(centre[abs(l)] for l in formula.clauses[k]) / 3, k))
    clause_x: Dict[int, float] = {}
    prev = -math.inf
    for k in order:
        want = sum(centre[abs(l)] for l in formula.clauses[k]) / 3 - CLAUSE_WIDTH / 2
        cx = max(want, prev + CLAUSE_WIDTH + 2.0)
        clause_x[k] = cx
        prev = cx
    letters: Dict[int, Dict[int, str]] = {}
    targets: Dict[int, List[Tuple[float, int]]] = {}
    for k, cl in enumerate(formula.clauses):
        lits = sorted(cl, key=lambda l: (centre[abs(l)], l))
        letters[k] = {l: L for l, L in zip(lits, LETTERS_BY_X)}
        for l, L in letters[k].items():
            targets.setdefault(l, []).append((clause_x[k] + _RINGS[L][4], k))
    span = 0.0
    pending = []
    for v in formula.variables:
        for lit in (v, -v):
            ports = placements[v].ports[lit]
            for px, (qx, k) in zip(ports, sorted(targets.get(lit, []))):
                pending.append((lit, k, px, qx))
                span = max(span, abs(px - qx))
    depth = float(max(8, math.ceil(span)))
    arcs = []
    for lit, k, px, qx in sorted(pending, key=lambda t: (t[1], t[3])):
        arcs.append(Arc(len(arcs), lit, k, letters[k][lit], (px, 0.0), (qx, -depth)))
    layout = GadgetLayout(placements, clause_x, letters, arcs, depth)
    layout.arc_crossings = _count_arc_crossings(arcs)
    return layout


# ---------------------------------------------------------------------------------
# operations on drawings


def _locate(comp: PolyComponent, point, half: float) -> Tuple[int, np.ndarray]:
    """Segment of comp whose interior holds point with room for a band; returns (index, unit dir)."""
    p = np.asarray(point, dtype=float)
    n = len(comp.points)
    for k in range(n):
        a = np.asarray(comp.points[k], dtype=float)
        b = np.asarray(comp.points[(k + 1) % n], dtype=float)
        d = b - a
        ln = float(np.hypot(*d))
        u = d / ln
        s = float(np.dot(p - a, u))
        off = abs(float(u[0] * (p - a)[1] - u[1] * (p - a)[0]))
        if off < 1e-9 and half - 1e-9 <= s <= ln - half + 1e-9:
            return k, u
    raise DiagramError(f"arc endpoint {tuple(point)} is not on component {comp.label}")


def band_sum(link: PolyLink, arc: Arc, width: float = BAND_HALF_WIDTH) -> PolyLink:
    """Merge the literal and ring components joined by arc along a thin band.

    The band is two parallel copies of the arc; the merged component keeps
    the literal's label and coefficient.
    """
    lit_i = ring_i = None
    for i, c in enumerate(link.components):
        if c.meta.get("role") == "literal" and c.meta.get("literal") == arc.literal:
            lit_i = i
    lab = f"r{arc.clause}{arc.letter}"
    for i, c in enumerate(link.components):
        if c.label == lab:
            ring_i = i
    if lit_i is None or ring_i is None:
        raise DiagramError(f"arc {arc.id} does not join a literal to a ring")
    A, B = link.components[lit_i], link.components[ring_i]
    i, ua = _locate(A, arc.start, width)
    k, ub = _locate(B, arc.end, width)
    a = np.asarray(arc.start, dtype=float)
    b = np.asarray(arc.end, dtype=float)
    a_lo, a_hi = tuple(a - width * ua), tuple(a + width * ua)
    b_lo, b_hi = tuple(b - width * ub), tuple(b + width * ub)
    # the strands a_lo -> b_hi and b_lo -> a_hi must not meet
    P = np.array([a_lo, b_lo], dtype=float)
    Q = np.array([b_hi, a_hi], dtype=float)
    ia, _, _, _ = segment_crossings(P[:, 0], P[:, 1], Q[:, 0], Q[:, 1],
                                    np.array([0, 1]), np.array([0, 0]), np.array([1, 1]))
    if len(ia):
        raise DiagramError(f"band of arc {arc.id} is twisted")
    m = len(B.points)
    ring_pts = [B.points[(k + 1 + j) % m] for j in range(m)]
    ring_tags = [B.tags[(k + 1 + j) % m] for j in range(m)]
    band = ("band", arc.id)
    pts = list(A.points[:i + 1]) + [a_lo, b_hi] + ring_pts + [b_lo, a_hi] + list(A.points[i + 1:])
    tags = (list(A.tags[:i + 1]) + [band, B.tags[k]] + ring_tags[:-1] + [B.tags[k], band, A.tags[i]]
            + list(A.tags[i + 1:]))
    pts, tags = _drop_repeats(pts, tags)
    meta = dict(A.meta)
    meta["bands"] = list(A.meta.get("bands", [])) + [arc.id]
    merged = PolyComponent(A.label, pts, tags, A.coefficient, meta)
    comps = [c for j, c in enumerate(link.components) if j != ring_i]
    comps[comps.index(A)] = merged
    return PolyLink(comps)


def _drop_repeats(pts, tags):
    out_p, out_t = [], []
    n = len(pts)
    for j in range(n):
        if np.allclose(pts[j], pts[(j + 1) % n], atol=1e-12):
            continue
        out_p.append(tuple(float(c) for c in pts[j]))
        out_t.append(tags[j])
    return out_p, out_t


def cable_2_1(link: PolyLink, label: str, eps: Optional[int] = None, s1: float = 0.4,
              s2: float = 0.6, delta: float = CABLE_OFFSET) -> PolyLink:
    """Replace a literal by two parallel copies joined by a single crossing.

    The copies sit at +-delta to either side of the original; on the segment
    tagged as the join they are cut and reconnected by two crossing
    diagonals.  The result is the boundary of a Moebius band whose core is
    the original curve.
    """
    idx = next((i for i, c in enumerate(link.components) if c.label == label), None)
    if idx is None:
        raise KeyError(label)
    C = link.components[idx]
    if C.meta.get("role") != "literal":
        raise DiagramError(f"{label} is not a literal component; only literals are cabled")
    joins = [k for k, t in enumerate(C.tags) if _base(t)[-1] == "join"]
    if len(joins) != 1:
        raise DiagramError(f"{label} needs exactly one join segment, found {len(joins)}")
    j = joins[0]
    lit = C.meta["literal"]
    if eps is None:
        eps = JOIN_HANDEDNESS[1 if lit > 0 else -1]
    n = len(C.points)
    L = offset_polyline(C.points, delta)
    R = offset_polyline(C.points, -delta)

    def at(P, s):
        a, b = np.asarray(P[j]), np.asarray(P[(j + 1) % n])
        return tuple(float(c) for c in a + s * (b - a))

    def run(P, copy):
        pts = [at(P, s2)]
        tags = [("cable", copy, C.tags[j])]
        for t in range(1, n + 1):
            pts.append(tuple(P[(j + t) % n]))
            tags.append(("cable", copy, C.tags[(j + t) % n]))
        pts.append(at(P, s1))
        tags.append(("join", label, copy, eps))  # diagonal leaving this copy
        return pts, tags

    lp, lt = run(L, 1)
    rp, rt = run(R, 2)
    pts, tags = _drop_repeats(lp + rp, lt + rt)
    meta = dict(C.meta)
    meta.update({"cabled": True, "join_sign": eps, "core": [list(p) for p in C.points]})
    comps = list(link.components)
    comps[idx] = PolyComponent(label, pts, tags, C.coefficient, meta)
    return PolyLink(comps)


# ---------------------------------------------------------------------------------
# the full construction


@dataclass
class ReductionResult:
    formula: Formula
    diagram: LinkDiagram
    layout: GadgetLayout
    drawing: PolyLink
    stats: dict
    metadata: dict = field(default_factory=dict)


def reduce_formula(formula: Formula, warmup: bool = False) -> ReductionResult:
    """Link with coefficients for the formula: literals get the empty coefficient, clasps 3/2.

    ``warmup`` builds the simplified construction instead: plain clasps
    without the comb and no cabling.
    """
    t0 = time.perf_counter()
    full = not warmup
    layout = route_arcs(formula, full=full)
    comps: List[PolyComponent] = []
    for v in formula.variables:
        pl = layout.variables[v]
        cs, _ = _variable_components(v, pl.x0, len(pl.ports[v]), len(pl.ports[-v]), full)
        comps += cs
    top = -layout.depth
    for k, cx in layout.clauses.items():
        for L in "ABC":
            comps.append(_ring(k, L, cx, top))
    link = PolyLink(comps)
    before = _diagram(link)
    per_var = {}
    for v in formula.variables:
        ids = [before.index_of(literal_label(v)), before.index_of(literal_label(-v)), before.index_of(clasp_label(v))]
        per_var[v] = sum(1 for x in range(before.n_crossings)
                         if set(before.strand_components(x)) <= set(ids))
    per_clause = {}
    for k in layout.clauses:
        ids = [before.index_of(f"r{k}{L}") for L in "ABC"]
        per_clause[k] = sum(1 for x in range(before.n_crossings)
                            if set(before.strand_components(x)) <= set(ids))
    for arc in layout.arcs:
        link = band_sum(link, arc)
    banded = _diagram(link) if not full else None
    if full:
        for v in formula.variables:
            for lit in (v, -v):
                link = cable_2_1(link, literal_label(lit))
    # fixed component order: per variable k+, k-, g
    order = []
    for v in formula.variables:
        order += [literal_label(v), literal_label(-v), clasp_label(v)]
    pos = {lab: i for i, lab in enumerate(order)}
    link = PolyLink(sorted(link.components, key=lambda c: pos[c.label]))
    diagram, prov = link.to_diagram(resolve)
    elapsed = time.perf_counter() - t0
    stats = {
        "variables": formula.n_vars,
        "clauses": len(formula.clauses),
        "size": formula.size,
        "components": diagram.n_components,
        "crossings": diagram.n_crossings,
        "variable_gadget_crossings": per_var,
        "clause_gadget_crossings": per_clause,
        "arcs": len(layout.arcs),
        "arc_crossings": layout.arc_crossings,
        "cabled": full,
        "warmup": warmup,
        "seconds": round(elapsed, 4),
    }
    if banded is not None:
        stats["banded_crossings"] = banded.n_crossings
    meta = {}
    for c in link.components:
        if c.meta.get("role") == "literal":
            meta[c.label] = {
                "role": "literal",
                "literal": c.meta["literal"],
                "bands": c.meta.get("bands", []),
                "cabled": bool(c.meta.get("cabled")),
                "join_sign": c.meta.get("join_sign"),
            }
        else:
            meta[c.label] = {"role": "clasp", "var": c.meta["var"]}
    return ReductionResult(formula, diagram, layout, link, stats, {"components": meta, "provenance": prov})
