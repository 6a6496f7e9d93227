"""Surgery calculus on diagrams: blow-downs, Rolfsen twists, homology and certificates.

A twist about an unknotted component c is carried out on the diagram, not
just on the coefficients: c must bound a flat disk that the other strands
cross as a bundle of parallel chords, and the twist inserts the full-twist
braid on that bundle.  The sign of every inserted crossing is fixed by
the rule that t > 0 adds right-handed full twists, so that linking numbers
change by t * lk(i, c) * lk(j, c).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .homology import AbelianGroup, presentation_group
from .linkdiag import (
    Component,
    DiagramError,
    LinkDiagram,
    _Map,
    _component_id,
    _through,
    linking_matrix,
    reidemeister,
    simplify_greedy,
    writhe,
)
from .slope import EMPTY, INF, Slope, parse_slope

__all__ = [
    "SurgeredLink",
    "KirbyError",
    "NotTwistReady",
    "NotSatisfying",
    "ResidualLinkage",
    "TwistSite",
    "twist_site",
    "erase_trivial",
    "fill_empty",
    "insert_ring",
    "rolfsen_twist",
    "surgery_h1",
    "hopf_pair_is_sphere",
    "braid_closure",
    "clasp_pattern",
    "CertMove",
    "Certificate",
    "replay",
    "resolve_clasp_piece",
    "verify_assignment",
]

ComponentId = Union[int, str]


class KirbyError(ValueError):
    pass


class NotTwistReady(KirbyError):
    pass


class NotSatisfying(KirbyError):
    pass


class ResidualLinkage(KirbyError):
    def __init__(self, message: str, partial: "Certificate"):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------------
# links with coefficients


class SurgeredLink:
    """A diagram read as a surgery description; lk matrix and writhes are derived lazily."""

    __slots__ = ("diagram",)

    def __init__(self, diagram: LinkDiagram):
        self.diagram = diagram

    @property
    def lk(self) -> List[List[int]]:
        return linking_matrix(self.diagram)

    @property
    def writhes(self) -> List[int]:
        return [writhe(self.diagram, c) for c in range(self.diagram.n_components)]

    @property
    def coefficients(self) -> List[Slope]:
        return [c.coefficient for c in self.diagram.components]

    @property
    def labels(self) -> List[str]:
        return self.diagram.labels()

    def index(self, c: ComponentId) -> int:
        return _component_id(self.diagram, c)

    def __repr__(self) -> str:
        parts = ", ".join(f"{c.label}:{c.coefficient}" for c in self.diagram.components)
        return f"SurgeredLink({self.diagram.n_crossings} crossings; {parts})"


def _as_diagram(link) -> LinkDiagram:
    return link.diagram if isinstance(link, SurgeredLink) else link


def erase_trivial(link: SurgeredLink, c: ComponentId) -> SurgeredLink:
    """Delete a component with coefficient 1/0; the surgered manifold is unchanged."""
    d = _as_diagram(link)
    i = _component_id(d, c)
    if not d.coefficient(i).is_inf:
        raise KirbyError(f"{d.components[i].label} has coefficient {d.coefficient(i)}, not 1/0")
    m = _Map.of(d)
    m.drop_component(i)
    return SurgeredLink(m.freeze())


def fill_empty(link: SurgeredLink, c: ComponentId, slope: Slope) -> SurgeredLink:
    """Give a drilled component a filling slope (a choice, not an equivalence)."""
    d = _as_diagram(link)
    i = _component_id(d, c)
    if not d.coefficient(i).empty:
        raise KirbyError(f"{d.components[i].label} is already filled ({d.coefficient(i)})")
    if slope.empty:
        raise KirbyError("filling slope must not be empty")
    return SurgeredLink(d.with_coefficients({i: slope}))


# ---------------------------------------------------------------------------------
# twist-ready position


@dataclass(frozen=True)
class TwistSite:
    """The bundle of chords crossing the flat disk bounded by a component.

    ``entries[j]`` and ``exits[j]`` are the ports, at crossings on c, from
    which chord j runs into the disk; chords are listed left to right when
    the disk is drawn with the entry arc on top.
    """

    component: int
    side: str
    entries: Tuple[int, ...]
    exits: Tuple[int, ...]


def _cycle(m: _Map, c: int) -> List[int]:
    """In-ports of component c at its crossings, in the order of travel."""
    starts = [p for p in m.live_ports() if m.comp[p] == c and not m.out[p]]
    if not starts:
        return []
    p0 = min(starts)
    cyc = [p0]
    p = m.nbr[_through(p0)]
    while p != p0:
        cyc.append(p)
        p = m.nbr[_through(p)]
        if len(cyc) > 4 * m.n():
            raise DiagramError(f"component {c} does not close")
    return cyc


def _twist_site(m: _Map, c: int) -> TwistSite:
    if c in m.free:
        return TwistSite(c, "free", (), ())
    ins = _cycle(m, c)
    xs = [p >> 2 for p in ins]
    if len(set(xs)) != len(xs):
        raise NotTwistReady(f"{m.components[c].label} crosses itself")
    on_c = set(xs)
    problems = []
    for side, shift in (("left", 3), ("right", 1)):
        inner = [(p & ~3) | (((p & 3) + shift) & 3) for p in ins]
        pos = {q: k for k, q in enumerate(inner)}
        partner = {}
        visits: Dict[int, int] = {}
        bad = None
        for k, q in enumerate(inner):
            r = m.nbr[q]
            steps = 0
            while (r >> 2) not in on_c:
                visits[r >> 2] = visits.get(r >> 2, 0) + 1
                r = m.nbr[_through(r)]
                steps += 1
                if steps > 4 * m.n():
                    raise DiagramError("strand inside the disk region does not return")
            if r not in pos:
                bad = "chord ends on the wrong side"
                break
            partner[k] = pos[r]
        if bad is None:
            # each inner crossing is met by two piercing subarcs, each traced from both ends
            stray = sorted(x for x, v in visits.items() if v != 4)
            if stray:
                bad = f"a strand meets crossing {stray[0]} inside the {side} region"
        if bad is None:
            over = [m.is_over(q) for q in inner]
            for k, j in partner.items():
                if over[k] == over[j]:
                    bad = "a strand crosses the disk region without piercing it once"
                    break
        if bad is None:
            n = len(inner)
            changes = sum(1 for k in range(n) if over[k] != over[(k + 1) % n])
            if changes != 2:
                bad = "entries are not contiguous along the component"
        if bad is not None:
            problems.append(f"{side}: {bad}")
            continue
        n = len(inner)
        # entries (piercing strand passes over c) form one arc; start right after the exit arc
        first = next(k for k in range(n) if over[k] and not over[k - 1])
        order = [(first + j) % n for j in range(n) if over[(first + j) % n]]
        if side == "left":
            order.reverse()  # walking with the region on the right
        entries = tuple(inner[k] for k in order)
        exits = tuple(inner[partner[k]] for k in order)
        return TwistSite(c, side, entries, exits)
    raise NotTwistReady(f"{m.components[c].label} is not in twist-ready position ({'; '.join(problems)})")


def twist_site(link, c: ComponentId) -> TwistSite:
    d = _as_diagram(link)
    return _twist_site(_Map.of(d), _component_id(d, c))


def _insert_full_twists(m: _Map, site: TwistSite, t: int):
    """Replace the chords of site by t full twists (right-handed for t > 0)."""
    k = len(site.entries)
    if k < 2 or t == 0:
        return
    inward = [m.nbr[p] for p in site.entries]
    orient = [1 if m.out[p] else -1 for p in site.entries]
    strands = [m.comp[p] for p in site.entries]
    open_port = list(site.entries)
    at = list(range(k))  # chord index currently at each position
    want = 1 if t > 0 else -1
    made = []
    for _ in range(abs(t) * k):
        for i in range(k - 1):
            X = 4 * m.new_crossing(0)
            a, b = at[i], at[i + 1]
            m.link(open_port[i], X + 0)
            m.link(open_port[i + 1], X + 3)
            # pair (0,2): chord a from upper left to lower right; (1,3): chord b
            for port, chord, top in ((X + 0, a, True), (X + 2, a, False), (X + 3, b, True), (X + 1, b, False)):
                m.comp[port] = strands[chord]
                m.out[port] = (orient[chord] < 0) if top else (orient[chord] > 0)
            open_port[i], open_port[i + 1] = X + 1, X + 2
            at[i], at[i + 1] = b, a
            made.append((X >> 2, a, b))
    for j in range(k):
        m.link(open_port[j], inward[at[j]])
    if at != list(range(k)):
        raise DiagramError("full twist did not return the strands to their positions")
    for x, a, b in made:
        if m.sign(x) != want * orient[a] * orient[b]:
            m.over[x] = 1 - m.over[x]


def rolfsen_twist(link, c: ComponentId, t: int) -> SurgeredLink:
    """t full twists about the unknotted component c.

    c gets 1/(t + 1/r_c); every other filled component gets r_i + t*lk(i,c)^2;
    drilled components keep the empty coefficient.
    """
    d = _as_diagram(link)
    ci = _component_id(d, c)
    r = d.coefficient(ci)
    if r.empty:
        raise KirbyError(f"cannot twist about the drilled component {d.components[ci].label}")
    lk = linking_matrix(d)
    m = _Map.of(d)
    site = _twist_site(m, ci)
    _insert_full_twists(m, site, t)
    coeffs = {}
    for i, comp in enumerate(d.components):
        if i == ci:
            coeffs[i] = r.twisted(t)
        elif not comp.coefficient.empty:
            coeffs[i] = comp.coefficient.add_integer(t * lk[i][ci] ** 2)
    for i, s in coeffs.items():
        m.components[i] = Component(m.components[i].label, s)
    return SurgeredLink(m.freeze())


def insert_ring(link, darts: Sequence[int], label: str, coefficient: Slope = INF) -> SurgeredLink:
    """Add an unknot encircling a bundle of parallel edges.

    ``darts[j]`` is a port whose edge is strand j of the bundle; the face
    left of darts[j] must also border strand j+1.  The ring passes over the
    bundle on one side and under it on the other, so each strand pierces
    its disk once and the ring is in twist-ready position.
    """
    d = _as_diagram(link)
    if label in d.labels():
        raise KirbyError(f"label {label} already in use")
    m = _Map.of(d)
    darts = list(darts)
    if not darts:
        raise KirbyError("a ring needs at least one strand to encircle")
    for j in range(len(darts) - 1):
        if m.nbr[darts[j + 1]] not in m.face_of(darts[j]):
            raise KirbyError(f"strands {j} and {j + 1} do not share a face")
    if len({frozenset((p, m.nbr[p])) for p in darts}) != len(darts):
        raise KirbyError("bundle repeats an edge")
    c = len(m.components)
    m.components.append(Component(label, coefficient))
    k = len(darts)
    tops, bots = [], []
    for j, p in enumerate(darts):
        q = m.nbr[p]
        T = 4 * m.new_crossing(1)  # ring (1,3) over the strand
        B = 4 * m.new_crossing(0)  # strand (0,2) over the ring
        m.link(p, T + 0)
        m.link(T + 2, B + 0)
        m.link(B + 2, q)
        down = m.out[p]
        for port, top in ((T + 0, True), (T + 2, False), (B + 0, True), (B + 2, False)):
            m.comp[port] = m.comp[p]
            m.out[port] = (not down) if top else down
        tops.append(T)
        bots.append(B)
    for j in range(k - 1):
        m.link(tops[j] + 3, tops[j + 1] + 1)
        m.link(bots[j + 1] + 1, bots[j] + 3)
    m.link(tops[-1] + 3, bots[-1] + 3)
    m.link(bots[0] + 1, tops[0] + 1)
    for T in tops:
        m.comp[T + 1] = m.comp[T + 3] = c
        m.out[T + 1], m.out[T + 3] = False, True
    for B in bots:
        m.comp[B + 1] = m.comp[B + 3] = c
        m.out[B + 3], m.out[B + 1] = False, True
    return SurgeredLink(m.freeze())


# ---------------------------------------------------------------------------------
# homology


def surgery_h1(link) -> AbelianGroup:
    """H1 of the surgered manifold from the linking matrix.

    One meridian generator per component; a component with coefficient p/q
    contributes p*mu_i + q*sum_j lk(i,j)*mu_j = 0, a drilled one nothing.
    """
    d = _as_diagram(link)
    lk = linking_matrix(d)
    rels = []
    for i, comp in enumerate(d.components):
        s = comp.coefficient
        if s.empty:
            continue
        rel = {}
        if s.p:
            rel[i] = s.p
        if s.q:
            for j, v in enumerate(lk[i]):
                if j != i and v:
                    rel[j] = rel.get(j, 0) + s.q * v
        rel = {k: v for k, v in rel.items() if v}
        if rel:
            rels.append(rel)
    return presentation_group(d.n_components, rels)


def hopf_pair_is_sphere(r1: Slope, r2: Slope, lk: int) -> bool:
    """Whether surgery on two unknots linked lk times, as a 2-braid closure, gives S^3.

    Decided by |p1 p2 - q1 q2 lk^2| = 1, the order of H1.
    """
    if r1.empty or r2.empty:
        raise KirbyError("both coefficients must be filled")
    return abs(r1.p * r2.p - r1.q * r2.q * lk * lk) == 1


# ---------------------------------------------------------------------------------
# the clasp pattern


def braid_closure(n: int, labels=("a", "b"), coefficients=(EMPTY, EMPTY)) -> LinkDiagram:
    """Closure of sigma_1^n on two strands; n > 0 gives positive crossings for parallel strands."""
    if n == 0:
        raise ValueError("need at least one crossing")
    k = abs(n)
    nbr = [0] * (4 * k)
    out = [False] * (4 * k)
    comp = [0] * (4 * k)
    # ports: 0 upper left, 1 lower left, 2 lower right, 3 upper right; strands run down
    for i in range(k):
        X, Y = 4 * i, 4 * ((i + 1) % k)
        nbr[X + 1], nbr[Y + 0] = Y + 0, X + 1
        nbr[X + 2], nbr[Y + 3] = Y + 3, X + 2
        out[X + 1] = out[X + 2] = True
    # components: follow strands from position 0 at the top of crossing 0
    ncomp = 0
    seen = set()
    for start in range(4 * k):
        if out[start] or start in seen:
            continue
        p = start
        while p not in seen:
            seen.add(p)
            seen.add(_through(p))
            comp[p] = comp[_through(p)] = ncomp
            p = nbr[_through(p)]
        ncomp += 1
    over = [1 if n > 0 else 0] * k
    comps = [Component(labels[i] if i < len(labels) else f"c{i}", coefficients[i] if i < len(coefficients) else EMPTY)
             for i in range(ncomp)]
    return LinkDiagram(nbr, out, comp, over, comps)


def _role(c: Component) -> str:
    kind = "clasp" if c.label.startswith("g") else "literal" if c.label.startswith("k") else "other"
    return f"{kind}:{c.coefficient}"


CLASP_PATTERN_NAME = "clasp-cable"


def clasp_pattern() -> LinkDiagram:
    """Catalogue entry: the positive 4-crossing 2-braid closure, clasp at 3/2, literal at 3/1."""
    return braid_closure(4, labels=("g", "k"), coefficients=(Slope(3, 2), Slope(3, 1)))


_PATTERN_CODE = None


def _pattern_code():
    global _PATTERN_CODE
    if _PATTERN_CODE is None:
        _PATTERN_CODE = clasp_pattern().canonical_code(_role)
    return _PATTERN_CODE


# ---------------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CertMove:
    """One step: fill, erase, reidemeister, ring, twist or recognize."""

    kind: str
    label: Optional[str] = None
    data: Tuple = ()

    def to_json(self) -> dict:
        d = {"move": self.kind}
        if self.label is not None:
            d["label"] = self.label
        if self.kind == "fill":
            d["coefficient"] = str(self.data[0])
        elif self.kind == "reidemeister":
            d["type"], d["site"] = self.data[0], list(self.data[1])
        elif self.kind == "ring":
            d["coefficient"], d["darts"] = str(self.data[0]), list(self.data[1])
        elif self.kind == "twist":
            d["t"], d["side"] = self.data
        elif self.kind == "recognize":
            d["components"], d["pattern"], d["verdict"] = list(self.data[0]), self.data[1], self.data[2]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CertMove":
        k = d["move"]
        lab = d.get("label")
        if k == "fill":
            return cls(k, lab, (parse_slope(d["coefficient"]),))
        if k == "erase":
            return cls(k, lab)
        if k == "reidemeister":
            site = tuple(None if x is None else x for x in d["site"])
            return cls(k, None, (d["type"], site))
        if k == "ring":
            return cls(k, lab, (parse_slope(d["coefficient"]), tuple(d["darts"])))
        if k == "twist":
            return cls(k, lab, (int(d["t"]), d["side"]))
        if k == "recognize":
            return cls(k, None, (tuple(d["components"]), d["pattern"], d["verdict"]))
        raise KirbyError(f"unknown certificate move {k!r}")


def _apply_move(d: LinkDiagram, mv: CertMove) -> LinkDiagram:
    if mv.kind == "fill":
        return fill_empty(d, mv.label, mv.data[0]).diagram
    if mv.kind == "erase":
        return erase_trivial(d, mv.label).diagram
    if mv.kind == "reidemeister":
        return reidemeister(d, mv.data[0], tuple(mv.data[1]))
    if mv.kind == "ring":
        return insert_ring(d, mv.data[1], mv.label, mv.data[0]).diagram
    if mv.kind == "twist":
        t, side = mv.data
        site = twist_site(d, mv.label)
        if site.side != side:
            raise KirbyError(f"twist about {mv.label}: expected region {side}, found {site.side}")
        return rolfsen_twist(d, mv.label, t).diagram
    if mv.kind == "recognize":
        labels, pattern, verdict = mv.data
        _check_recognized(d, labels, pattern)
        return d
    raise KirbyError(f"unknown certificate move {mv.kind!r}")


def _check_recognized(d: LinkDiagram, labels: Sequence[str], pattern: str):
    if pattern != CLASP_PATTERN_NAME:
        raise KirbyError(f"unknown pattern {pattern}")
    ids = [d.index_of(l) for l in labels]
    if sorted(ids) not in d.split_pieces():
        raise KirbyError(f"{', '.join(labels)} do not form a split piece")
    sub = d.sublink(ids)
    if sub.canonical_code(_role) != _pattern_code():
        raise KirbyError(f"{', '.join(labels)} do not match the {pattern} pattern")


@dataclass
class Certificate:
    initial: LinkDiagram
    moves: List[CertMove] = field(default_factory=list)
    final: Optional[LinkDiagram] = None
    verdict: Optional[str] = None
    log: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "initial": self.initial.to_json(),
            "moves": [m.to_json() for m in self.moves],
            "final": self.final.to_json() if self.final is not None else None,
            "verdict": self.verdict,
            "log": self.log,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data) -> "Certificate":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            LinkDiagram.from_json(data["initial"]),
            [CertMove.from_json(m) for m in data["moves"]],
            LinkDiagram.from_json(data["final"]) if data.get("final") else None,
            data.get("verdict"),
            data.get("log", []),
        )


def replay(cert: Certificate, check_homology: bool = False) -> LinkDiagram:
    """Re-run every move from the initial diagram; raises if any precondition fails.

    With check_homology, H1 is compared before and after every move that
    preserves the manifold (all but fills).
    """
    d = cert.initial
    for k, mv in enumerate(cert.moves):
        before = surgery_h1(d) if check_homology and mv.kind != "fill" else None
        try:
            d = _apply_move(d, mv)
        except (KirbyError, DiagramError) as e:
            raise KirbyError(f"move {k} ({mv.kind}) fails on replay: {e}") from e
        if before is not None and surgery_h1(d) != before:
            raise KirbyError(f"move {k} ({mv.kind}) changed H1")
    if cert.final is not None and d.to_json() != cert.final.to_json():
        raise KirbyError("replay does not reproduce the recorded final state")
    return d


class _Recorder:
    def __init__(self, d: LinkDiagram):
        self.cert = Certificate(d)
        self.d = d

    def do(self, mv: CertMove):
        self.d = _apply_move(self.d, mv)
        self.cert.moves.append(mv)

    def simplify(self, budget: int):
        res = simplify_greedy(self.d, budget=budget)
        for m in res.moves:
            self.cert.moves.append(CertMove("reidemeister", None, (m.kind, tuple(m.site))))
        self.d = res.diagram
        return res


def _bigon_between(d: LinkDiagram, a: int, b: int) -> Tuple[int, int]:
    """Darts for a ring around a bigon bounded by components a and b."""
    m = _Map.of(d)
    for f in m.all_faces():
        if len(f) != 2:
            continue
        d1, d2 = f
        if {m.comp[d1], m.comp[d2]} == {a, b}:
            return d1, m.nbr[d2]
    raise KirbyError("no bigon between the two components")


def resolve_clasp_piece(rec: _Recorder, gamma: str, kappa: str, ring: str, budget: int = 10000):
    """Reduce a recognized clasp piece to nothing by twists and blow-downs.

    A 1/0 ring around both strands, twisted by -2, undoes the four clasp
    crossings; the clasp then has coefficient -1/2 and the literal 1, so
    twisting the clasp by 2 and the literal by -1 turns both into 1/0, and
    the ring, now at 1/2, follows after a twist by -2.
    """
    g, k = rec.d.index_of(gamma), rec.d.index_of(kappa)
    rec.do(CertMove("recognize", None, ((gamma, kappa), CLASP_PATTERN_NAME, "S3")))
    darts = _bigon_between(rec.d, g, k)
    rec.do(CertMove("ring", ring, (INF, darts)))
    for label, t in ((ring, -2), (gamma, 2), (kappa, -1), (ring, -2)):
        res = rec.simplify(budget)
        if res.exhausted:
            raise KirbyError("simplification budget exhausted inside a clasp piece")
        site = twist_site(rec.d, label)
        rec.do(CertMove("twist", label, (t, site.side)))
        if label != ring or rec.d.coefficient(rec.d.index_of(ring)).is_inf:
            if rec.d.coefficient(rec.d.index_of(label)).is_inf:
                rec.do(CertMove("erase", label))
    rec.simplify(budget)


def verify_assignment(formula, assignment: Dict[int, bool], budget: int = 200000,
                      reduction=None, check_homology: bool = False) -> Certificate:
    """Certificate that the surgered manifold of the reduction embeds, from a satisfying assignment.

    Literals made true are filled with 1/0 and erased, the diagram is
    simplified until every variable keeps its own two-component piece, the
    surviving literals are filled with 3/1, and each piece is recognized and
    reduced to the empty link.
    """
    from .reduction import literal_label, clasp_label, reduce_formula

    missing = [v for v in formula.variables if v not in assignment]
    if missing:
        raise KirbyError(f"assignment misses variable {missing[0]}")
    if not formula.evaluate(assignment):
        raise NotSatisfying("not a satisfying assignment")
    red = reduction if reduction is not None else reduce_formula(formula)
    rec = _Recorder(red.diagram)
    for v in formula.variables:
        lit = v if assignment[v] else -v
        rec.do(CertMove("fill", literal_label(lit), (INF,)))
        rec.do(CertMove("erase", literal_label(lit)))
    res = rec.simplify(budget)
    want = {}
    for v in formula.variables:
        lit = -v if assignment[v] else v
        want[v] = sorted([rec.d.index_of(literal_label(lit)), rec.d.index_of(clasp_label(v))])
    pieces = rec.d.split_pieces()
    if res.exhausted or sorted(want.values()) != sorted(pieces):
        rec.cert.final = rec.d
        rec.cert.verdict = "residual linkage"
        raise ResidualLinkage("residual linkage: the diagram does not split into variable pieces", rec.cert)
    rec.cert.log.append({"after": "split", "crossings": rec.d.n_crossings, "pieces": len(pieces)})
    for v in formula.variables:
        lit = -v if assignment[v] else v
        rec.do(CertMove("fill", literal_label(lit), (Slope(3, 1),)))
    if check_homology and not surgery_h1(rec.d).is_trivial:
        raise KirbyError("filled link does not have trivial H1")
    for v in formula.variables:
        lit = -v if assignment[v] else v
        resolve_clasp_piece(rec, clasp_label(v), literal_label(lit), f"c{v}")
    rec.cert.final = rec.d
    if rec.d.n_components:
        rec.cert.verdict = "residual linkage"
        raise ResidualLinkage("pieces did not reduce to the empty link", rec.cert)
    rec.cert.verdict = "S3"
    return rec.cert
